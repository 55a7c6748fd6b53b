#include "meshwm/runlength.hpp"

#include "meshwm/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace meshwm {

RunAlphabet RunAlphabet::standard(unsigned bits_per_symbol, unsigned s_d)
{
    if (bits_per_symbol < 1 || bits_per_symbol > 16)
        throw InvalidArgument("run alphabet: bits per symbol must be in [1, 16]");
    RunAlphabet a;
    a.bits_per_symbol = bits_per_symbol;
    a.s_d = s_d;
    a.run_lengths.resize(std::size_t{1} << bits_per_symbol);
    for (std::size_t v = 0; v < a.run_lengths.size(); ++v)
        a.run_lengths[v] = s_d + 1 + static_cast<unsigned>(v);
    return a;
}

unsigned RunAlphabet::min_run() const { return *std::min_element(run_lengths.begin(), run_lengths.end()); }
unsigned RunAlphabet::max_run() const { return *std::max_element(run_lengths.begin(), run_lengths.end()); }

double RunAlphabet::mean_cost() const
{
    return std::accumulate(run_lengths.begin(), run_lengths.end(), 0.0) / static_cast<double>(run_lengths.size());
}

void RunAlphabet::validate() const
{
    if (bits_per_symbol < 1 || bits_per_symbol > 16)
        throw InvalidArgument("run alphabet: bits per symbol must be in [1, 16]");
    if (run_lengths.size() != (std::size_t{1} << bits_per_symbol))
        throw InvalidArgument("run alphabet: need exactly 2^b run lengths");
    std::vector<unsigned> sorted = run_lengths;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InvalidArgument("run alphabet: run lengths must be distinct");
    if (sorted.front() <= s_d)
        throw InvalidArgument("run alphabet: every run length must exceed s_d=" + std::to_string(s_d));
}

std::vector<std::uint8_t> rl_encode(std::span<const std::uint32_t> symbols, const RunAlphabet& alphabet,
                                    int polarity_start)
{
    alphabet.validate();
    if (polarity_start != 0 && polarity_start != 1)
        throw InvalidArgument("rl_encode: polarity must be 0 or 1");
    std::vector<std::uint8_t> out;
    std::uint8_t bit = static_cast<std::uint8_t>(polarity_start);
    for (auto s : symbols) {
        if (s >= alphabet.size())
            throw InvalidArgument("rl_encode: invalid symbol " + std::to_string(s));
        out.insert(out.end(), alphabet.run_lengths[s], bit);
        bit ^= 1u;
    }
    return out;
}

RunObservation parse_runs(std::span<const std::uint8_t> bits)
{
    RunObservation obs;
    if (bits.empty())
        return obs;
    obs.polarity_start = bits[0] ? 1 : 0;
    unsigned len = 1;
    for (std::size_t i = 1; i < bits.size(); ++i) {
        if ((bits[i] != 0) == (bits[i - 1] != 0)) {
            ++len;
        } else {
            obs.lengths.push_back(len);
            len = 1;
        }
    }
    obs.lengths.push_back(len);
    return obs;
}

HardDecision rl_decode_hard(const RunObservation& obs, const RunAlphabet& alphabet)
{
    alphabet.validate();
    HardDecision out;
    out.symbols.reserve(obs.lengths.size());
    out.ambiguous.reserve(obs.lengths.size());
    for (auto len : obs.lengths) {
        std::uint32_t best = 0;
        unsigned best_run = 0;
        int sources = 0;
        for (std::uint32_t s = 0; s < alphabet.size(); ++s) {
            const unsigned run = alphabet.run_lengths[s];
            if (run >= len && run - len <= alphabet.s_d) {
                ++sources;
                if (sources == 1 || run < best_run) {
                    best = s;
                    best_run = run;
                }
            }
        }
        if (sources == 0)
            throw InvalidArgument("rl_decode_hard: run length " + std::to_string(len) +
                                  " cannot come from any symbol");
        out.symbols.push_back(best);
        out.ambiguous.push_back(sources > 1);
    }
    return out;
}

namespace {

std::vector<double> event_law(double p_d, unsigned s_d)
{
    if (!(p_d >= 0.0 && p_d < 1.0))
        throw InvalidArgument("deletion probability must lie in [0, 1)");
    if (s_d < 1)
        throw InvalidArgument("s_d must be at least 1");
    std::vector<double> law(s_d + 1);
    double total = 0.0, pj = 1.0;
    for (unsigned j = 1; j <= s_d; ++j) {
        pj *= p_d;
        law[j] = pj;
        total += pj;
    }
    if (!(total < 1.0))
        throw InvalidArgument("deletion event probabilities sum to 1 or more");
    law[0] = 1.0 - total;
    return law;
}

std::vector<double> normalized_priors(std::span<const double> priors, std::size_t n)
{
    if (priors.empty())
        return std::vector<double>(n, 1.0 / static_cast<double>(n));
    if (priors.size() != n)
        throw InvalidArgument("priors must have one entry per symbol");
    double s = 0.0;
    for (double p : priors) {
        if (!(p >= 0.0))
            throw InvalidArgument("priors must be non-negative");
        s += p;
    }
    if (!(s > 0.0))
        throw InvalidArgument("priors must not all be zero");
    std::vector<double> out(priors.begin(), priors.end());
    for (double& p : out)
        p /= s;
    return out;
}

double clip_llr(double v) { return std::clamp(v, -kLlrClip, kLlrClip); }

} // namespace

std::vector<std::vector<double>> rl_likelihoods(const RunObservation& obs, const RunAlphabet& alphabet, double p_d,
                                                unsigned s_d, double overflow)
{
    alphabet.validate();
    if (alphabet.min_run() <= s_d)
        throw InvalidArgument("rl_likelihoods: run lengths must exceed s_d");
    if (!(overflow >= 0.0 && overflow < 1.0))
        throw InvalidArgument("rl_likelihoods: overflow must be in [0, 1)");
    const auto law = event_law(p_d, s_d);
    std::vector<std::vector<double>> out(obs.lengths.size(), std::vector<double>(alphabet.size(), 0.0));
    for (std::size_t r = 0; r < obs.lengths.size(); ++r) {
        const unsigned len = obs.lengths[r];
        for (std::size_t s = 0; s < alphabet.size(); ++s) {
            const unsigned run = alphabet.run_lengths[s];
            if (run >= len && run - len <= s_d)
                out[r][s] = law[run - len];
            else if (run >= len && run - len == s_d + 1)
                out[r][s] = overflow;
        }
    }
    return out;
}

std::vector<double> rl_llr(const RunObservation& obs, const RunAlphabet& alphabet, double p_d, unsigned s_d,
                           std::span<const double> priors, bool strict)
{
    if (alphabet.size() != 2)
        throw InvalidArgument("rl_llr: binary alphabet required");
    return rl_bit_llr(obs, alphabet, p_d, s_d, priors, strict);
}

std::vector<double> rl_bit_llr(const RunObservation& obs, const RunAlphabet& alphabet, double p_d, unsigned s_d,
                               std::span<const double> priors, bool strict)
{
    return bit_llr_from_likelihoods(rl_likelihoods(obs, alphabet, p_d, s_d), alphabet, priors, strict);
}

std::vector<double> bit_llr_from_likelihoods(const std::vector<std::vector<double>>& lik, const RunAlphabet& alphabet,
                                             std::span<const double> priors, bool strict)
{
    const auto prior = normalized_priors(priors, alphabet.size());
    const unsigned b = alphabet.bits_per_symbol;
    std::vector<double> out;
    out.reserve(lik.size() * b);
    for (std::size_t r = 0; r < lik.size(); ++r) {
        double any = 0.0;
        for (std::size_t s = 0; s < alphabet.size(); ++s)
            any += lik[r][s] * prior[s];
        if (!(any > 0.0)) {
            if (strict)
                throw InvalidArgument("rl_llr: run " + std::to_string(r) + " has a length no symbol can produce");
            out.insert(out.end(), b, 0.0);
            continue;
        }
        for (unsigned k = 0; k < b; ++k) {
            const unsigned shift = b - 1 - k;
            double p0 = 0.0, p1 = 0.0;
            for (std::size_t s = 0; s < alphabet.size(); ++s)
                ((s >> shift) & 1u ? p1 : p0) += lik[r][s] * prior[s];
            double llr;
            if (p0 > 0.0 && p1 > 0.0)
                llr = std::log(p0) - std::log(p1);
            else
                llr = p0 > 0.0 ? kLlrClip : -kLlrClip;
            out.push_back(clip_llr(llr));
        }
    }
    return out;
}

std::vector<std::uint32_t> bits_to_symbols(std::span<const std::uint8_t> bits, unsigned bits_per_symbol)
{
    if (bits_per_symbol < 1 || bits_per_symbol > 32)
        throw InvalidArgument("bits_to_symbols: bad symbol width");
    if (bits.size() % bits_per_symbol != 0)
        throw InvalidArgument("bits_to_symbols: bit count is not a multiple of the symbol width");
    std::vector<std::uint32_t> out(bits.size() / bits_per_symbol, 0);
    for (std::size_t i = 0; i < out.size(); ++i)
        for (unsigned k = 0; k < bits_per_symbol; ++k)
            out[i] = (out[i] << 1) | (bits[i * bits_per_symbol + k] ? 1u : 0u);
    return out;
}

std::vector<std::uint8_t> symbols_to_bits(std::span<const std::uint32_t> symbols, unsigned bits_per_symbol)
{
    if (bits_per_symbol < 1 || bits_per_symbol > 32)
        throw InvalidArgument("symbols_to_bits: bad symbol width");
    std::vector<std::uint8_t> out;
    out.reserve(symbols.size() * bits_per_symbol);
    for (auto s : symbols)
        for (unsigned k = 0; k < bits_per_symbol; ++k)
            out.push_back(static_cast<std::uint8_t>((s >> (bits_per_symbol - 1 - k)) & 1u));
    return out;
}

} // namespace meshwm
