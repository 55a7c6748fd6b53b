#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace meshwm {

inline constexpr double kLlrClip = 25.0;

struct RunAlphabet {
    unsigned bits_per_symbol = 1;
    std::vector<unsigned> run_lengths; ///< indexed by symbol value; also the symbol costs
    unsigned s_d = 1;

    /// Symbol v is sent as a run of s_d + 1 + v bits.
    static RunAlphabet standard(unsigned bits_per_symbol, unsigned s_d = 1);

    std::size_t size() const noexcept { return run_lengths.size(); }
    unsigned min_run() const;
    unsigned max_run() const;
    /// Mean run length under equiprobable symbols.
    double mean_cost() const;
    void validate() const;
};

struct RunObservation {
    std::vector<unsigned> lengths;
    int polarity_start = 1;
};

/// Alternating-polarity runs; the first run carries bit `polarity_start`.
std::vector<std::uint8_t> rl_encode(std::span<const std::uint32_t> symbols, const RunAlphabet& alphabet,
                                    int polarity_start = 1);

RunObservation parse_runs(std::span<const std::uint8_t> bits);

struct HardDecision {
    std::vector<std::uint32_t> symbols;
    std::vector<bool> ambiguous;
};

/// Each run maps to the shortest symbol run that can produce it with at most
/// s_d deletions; lengths reachable from more than one symbol are flagged.
HardDecision rl_decode_hard(const RunObservation& obs, const RunAlphabet& alphabet);

/// P(observed length | symbol) for every run, one row per run, using the
/// per-run event law P(j) = p_d^j (1 <= j <= s_d). Rows are all zero for
/// lengths no symbol can produce. A nonzero `overflow` is the likelihood given
/// to a run that lost s_d + 1 bits, an event outside the channel model.
std::vector<std::vector<double>> rl_likelihoods(const RunObservation& obs, const RunAlphabet& alphabet, double p_d,
                                                unsigned s_d, double overflow = 0.0);

/// Bitwise LLRs (MSB first) from likelihood rows as returned by rl_likelihoods.
std::vector<double> bit_llr_from_likelihoods(const std::vector<std::vector<double>>& likelihoods,
                                             const RunAlphabet& alphabet, std::span<const double> priors = {},
                                             bool strict = true);

/// Binary alphabet: log(P(l|0)P(0)) - log(P(l|1)P(1)) per run, clipped to
/// +-kLlrClip. Positive favours 0. With `strict` false an impossible length
/// gives 0 (erasure) instead of throwing.
std::vector<double> rl_llr(const RunObservation& obs, const RunAlphabet& alphabet, double p_d, unsigned s_d,
                           std::span<const double> priors = {}, bool strict = true);

/// Any alphabet: bitwise LLRs (MSB of each symbol first) obtained by
/// marginalizing the symbol posteriors. Equiprobable symbols unless `priors` given.
std::vector<double> rl_bit_llr(const RunObservation& obs, const RunAlphabet& alphabet, double p_d, unsigned s_d,
                               std::span<const double> priors = {}, bool strict = true);

/// Groups bits into b-bit symbols, MSB first; |bits| must be a multiple of b.
std::vector<std::uint32_t> bits_to_symbols(std::span<const std::uint8_t> bits, unsigned bits_per_symbol);
std::vector<std::uint8_t> symbols_to_bits(std::span<const std::uint32_t> symbols, unsigned bits_per_symbol);

} // namespace meshwm
