#pragma once

#include "meshwm/capacity.hpp"
#include "meshwm/channel.hpp"
#include "meshwm/ldpc.hpp"
#include "meshwm/mesh.hpp"
#include "meshwm/qim.hpp"
#include "meshwm/runlength.hpp"
#include "meshwm/stability.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace meshwm {

/// Resolved key=value configuration shared by embedding and extraction.
struct PipelineConfig {
    double delta = 0.01;
    std::size_t L = 1;
    unsigned bits_per_symbol = 1;
    unsigned s_d = 1;
    std::string code_path; ///< absolute, or relative to the working directory
    StabilityConfig stability;
    int polarity = 1;
    double decoder_p_d = 0.02;
    int decoder_max_iter = 50;
    bool transformer = false;
    CentroidMode frame = CentroidMode::Surface;
    std::optional<std::size_t> payload_bits;

    /// `code` paths are resolved against `base_dir` when relative.
    static PipelineConfig parse(std::string_view text, const std::string& base_dir = "");
    static PipelineConfig load(const std::string& path);
    /// Sets one key from its textual value (same rules as the file format).
    void set(std::string_view key, std::string_view value, const std::string& base_dir = "");
    /// key=value lines for every key, in a fixed order.
    std::string dump() const;
    void validate() const;

    RunAlphabet alphabet() const;
    QimConfig qim(std::uint64_t key) const;
};

/// Payload bits are packed into the code's message: zero-padded to k
/// (or shaped by the distribution transformer first).
struct Framing {
    std::size_t k = 0;
    std::size_t n = 0;
    std::size_t symbols = 0;       ///< ceil(n / b)
    std::size_t channel_bits = 0;  ///< symbols * max run + one terminating run
    std::size_t selection_size = 0; ///< channel_bits * L
};

Framing framing_for(const LdpcCode& code, const PipelineConfig& cfg);

struct EmbedReport {
    std::vector<std::uint32_t> selection; ///< carrier vertices in embedding order
    std::string selection_digest;
    std::size_t payload_bits = 0;
    std::size_t padding_bits = 0;
    std::size_t data_channel_bits = 0; ///< bits produced by the runlength encoder
    Framing framing;
    double hausdorff = 0.0;
    double scale_ref = 0.0;
    double hausdorff_bound = 0.0; ///< delta / 2 * scale_ref
    std::string config;

    std::string to_json() const;
    /// Only the fields extraction needs (selection, payload length) are required.
    static EmbedReport from_json(std::string_view text);
};

struct EmbedResult {
    Mesh mesh;
    EmbedReport report;
};

EmbedResult embed_watermark(const Mesh& mesh, std::span<const std::uint8_t> payload, std::uint64_t key,
                            const PipelineConfig& cfg, const LdpcCode& code);

struct ExtractReport {
    std::vector<std::uint8_t> payload;
    bool converged = false;
    int iterations = 0;
    std::size_t carriers = 0;        ///< vertices read
    std::size_t carriers_expected = 0;
    std::size_t runs_observed = 0;
    std::size_t erased_symbols = 0;  ///< missing or impossible runs
    std::optional<double> p_hat;     ///< oracle mode only
    std::optional<std::size_t> max_consecutive_deleted;
    std::string mode;
    std::string config;

    std::string to_json() const;
};

/// Reads only the received mesh, the key and the configuration.
ExtractReport extract_blind(const Mesh& mesh, std::uint64_t key, const PipelineConfig& cfg, const LdpcCode& code);

/// Carrier order comes from the embed report, survival from the attack.
ExtractReport extract_oracle(const Mesh& attacked, std::span<const std::uint32_t> selection, const SurvivalMap& map,
                             std::uint64_t key, const PipelineConfig& cfg, const LdpcCode& code);

/// Channel bits read in order from the carriers -> payload.
ExtractReport decode_channel_bits(std::span<const std::uint8_t> channel_bits, const PipelineConfig& cfg,
                                  const LdpcCode& code);

struct SweepRow {
    double p_d = 0.0;
    std::size_t frames = 0;
    std::size_t bit_errors = 0;
    std::size_t frame_errors = 0;
    double ber = 0.0;
    double fer = 0.0;
    double mean_iterations = 0.0;
    std::size_t unsound = 0; ///< converged frames whose decision fails a check (must stay 0)
};

struct SweepOptions {
    std::size_t frames = 1000;
    std::uint64_t seed = 1;
    int max_iter = 50;
    int polarity = 1;
};

/// Random message -> encode -> runlength -> deletion channel -> parse -> LLR
/// -> decode, per frame with seed hash(seed, point, frame).
std::vector<SweepRow> run_sweep(const LdpcCode& code, const RunAlphabet& alphabet, std::span<const double> p_list,
                                const SweepOptions& opt);
/// Header `p_d,frames,bit_errors,frame_errors,ber,fer,mean_iterations`.
std::string sweep_csv(std::span<const SweepRow> rows);

struct CapacityRow {
    double p_d = 0.0;
    std::size_t alphabet_size = 0;
    CapacityResult result;
};

/// Alphabet of size |X| (a power of two) with costs s_d+1 .. s_d+|X|.
std::vector<CapacityRow> capacity_sweep(std::span<const std::size_t> alphabet_sizes, std::span<const double> p_list,
                                        unsigned s_d = 1, double tol = 1e-9, int max_iter = 10000);
/// Header `p_d,alphabet_size,c_unit,iterations,converged,p_star`; p_star is ';'-joined.
std::string capacity_csv(std::span<const CapacityRow> rows);

/// Effective rate of the runlength-modulated code: R * b / mean run length.
double effective_rate(double rate, const RunAlphabet& alphabet);

struct CodegenReport {
    std::size_t n = 0, m = 0, k = 0, rank = 0;
    unsigned q = 0, mu = 0, eta = 0;
    std::uint64_t seed = 0;
    double rate = 0.0;
    double rate_bound = 0.0; ///< 1 - mu / eta
    double effective_rate = 0.0;
    bool girth6 = false;
    bool regular = false; ///< column weight mu and row weight eta everywhere

    std::string to_json() const;
};

CodegenReport describe_code(const LdpcCode& code, const RunAlphabet& alphabet);

/// Bits of a payload string: either a 0/1 string or, with a "hex:" prefix, hex digits (MSB first).
std::vector<std::uint8_t> parse_payload(std::string_view text);
std::string format_payload(std::span<const std::uint8_t> bits);

} // namespace meshwm
