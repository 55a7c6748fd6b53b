#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace meshwm {

using TransitionMatrix = std::vector<std::vector<double>>; ///< rows: inputs, columns: outputs

/// I(p) in bits; 0 log 0 = 0.
double mutual_information(std::span<const double> p, const TransitionMatrix& P);

struct CapacityResult {
    double c_unit = 0.0; ///< bits per unit cost
    std::vector<double> p_star;
    int iterations = 0;
    bool converged = false;
    double upper_bound = 0.0;   ///< max_x D(P_x || q) / c(x) at the final iterate
    std::vector<double> trace;  ///< I(p_t) / (c . p_t) for every iterate
};

/// Maximizes I(p) / (c . p) with the multiplicative update
/// p(x) <- p(x) exp(D(P_x || q_p) - s c(x)), s = current ratio. Converged when
/// the bound gap drops below tol.
CapacityResult unit_cost_capacity(const TransitionMatrix& P, std::span<const double> costs, double tol = 1e-9,
                                  int max_iter = 10000);

/// Arithmetic-decoder shaping of uniform bits into symbols with the target
/// law (16-bit quantized frequencies, 32-bit interval arithmetic).
class DistributionTransformer {
public:
    explicit DistributionTransformer(std::span<const double> target);

    /// Symbols whose re-encoding reproduces every input bit.
    std::vector<std::uint32_t> transform(std::span<const std::uint8_t> bits) const;
    /// First `bit_count` bits of the arithmetic encoding of `symbols`.
    std::vector<std::uint8_t> inverse(std::span<const std::uint32_t> symbols, std::size_t bit_count) const;

    const std::vector<std::uint32_t>& frequencies() const noexcept { return freq_; }

private:
    std::vector<std::uint32_t> freq_;
    std::vector<std::uint32_t> cum_; ///< size + 1 entries, cum_.back() == 65536
};

std::vector<std::uint32_t> distribution_transform(std::span<const std::uint8_t> bits, std::span<const double> target);
std::vector<std::uint8_t> inverse_transform(std::span<const std::uint32_t> symbols, std::span<const double> target,
                                            std::size_t bit_count);

} // namespace meshwm
