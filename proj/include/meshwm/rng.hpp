#pragma once

#include <cstdint>
#include <random>

namespace meshwm {

// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_seed(std::uint64_t a, std::uint64_t b) noexcept
{
    return mix64(mix64(a) ^ (b + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t hash_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept
{
    return hash_seed(hash_seed(a, b), c);
}

/// mt19937_64 with platform-independent conversions (the std distributions
/// are implementation-defined, which would break byte-identical outputs).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n); n > 0. Lemire-style rejection keeps it unbiased.
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    bool bit() { return (engine_() >> 63) != 0; }

    /// Standard normal via Box-Muller (one sample per call, cached pair discarded).
    double normal();

private:
    std::mt19937_64 engine_;
};

template <typename Container>
void shuffle(Container& c, Rng& rng)
{
    using std::swap;
    for (std::size_t i = c.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        swap(c[i - 1], c[j]);
    }
}

} // namespace meshwm
