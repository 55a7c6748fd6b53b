#pragma once

#include "meshwm/mesh.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace meshwm {

struct QimConfig {
    double delta = 0.01;              ///< step in normalized radial units
    std::size_t spreading_length = 1; ///< L
    std::uint64_t key = 0;

    void validate() const;
};

double qim_quantize(double x, int u, double delta);
/// Nearest coset; an exact midpoint resolves to 0.
int qim_detect(double w, double delta);

std::vector<double> sqim_embed(std::span<const double> x, std::span<const double> p, int u, double delta);
int sqim_detect(std::span<const double> r, std::span<const double> p, double delta);

/// +-1/sqrt(L) entries drawn from (key, block).
std::vector<double> generate_projection(std::uint64_t key, std::size_t length, std::uint64_t block = 0);

/// Marks a selection entry whose vertex did not survive an attack.
inline constexpr std::uint32_t kMissingVertex = 0xffffffffu;
/// Detection result for a block whose vertices were all deleted.
inline constexpr std::int8_t kDeletedBit = -1;

/// Quantizes the radii of `selection` in blocks of L, measured in `frame`.
/// Angles and all unselected vertices are left untouched.
Mesh embed_bits_with_frame(const Mesh& mesh, std::span<const std::uint32_t> selection,
                           std::span<const std::uint8_t> bits, const QimConfig& cfg, const NormalizationFrame& frame);

/// Embeds so that the radii lie on the lattice of the output mesh's own frame:
/// the frame is recomputed from the marked mesh and the embedding repeated
/// until it stops moving. A block whose own flip moves the frame across its
/// decision midpoint has no consistent lattice point and may end up more than
/// delta/2 from its original radius; its vertices are listed in `unsettled`.
Mesh embed_bits_in_mesh(const Mesh& mesh, std::span<const std::uint32_t> selection, std::span<const std::uint8_t> bits,
                        const QimConfig& cfg, CentroidMode mode = CentroidMode::Surface,
                        std::vector<std::uint32_t>* unsettled = nullptr);

/// Entries equal to kMissingVertex are skipped; a block with survivors is
/// detected with the surviving part of p renormalized, an empty block yields kDeletedBit.
std::vector<std::int8_t> extract_bits_with_frame(const Mesh& mesh, std::span<const std::uint32_t> selection,
                                                 const QimConfig& cfg, const NormalizationFrame& frame);

std::vector<std::int8_t> extract_bits_from_mesh(const Mesh& mesh, std::span<const std::uint32_t> selection,
                                                const QimConfig& cfg, CentroidMode mode = CentroidMode::Surface);

/// Distance of r/delta to the nearest point of either coset, in units of delta.
double lattice_residual(double r, double delta);

/// Residual below which a radius counts as lying on the lattice. Embedded
/// radii sit within about 1e-13 after a full-precision OBJ round trip.
inline constexpr double kLatticeTolerance = 1e-10;

} // namespace meshwm
