#pragma once

#include <stdexcept>
#include <string>

namespace meshwm {

/// Coarse failure classes. The C API maps each to a distinct status code.
enum class ErrorKind {
    InvalidArgument,
    Parse,
    Config,
    Capability,
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& what) : Error(ErrorKind::InvalidArgument, what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(ErrorKind::Parse, what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

/// The request is well-formed but exceeds what the mesh or code can carry.
struct CapabilityError : Error {
    explicit CapabilityError(const std::string& what) : Error(ErrorKind::Capability, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

} // namespace meshwm
