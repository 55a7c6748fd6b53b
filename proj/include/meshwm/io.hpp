#pragma once

#include <string>
#include <string_view>

namespace meshwm {

/// Whole-file helpers; failures throw IoError naming the path.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

} // namespace meshwm
