#pragma once

#include "meshwm/mesh.hpp"
#include "meshwm/rng.hpp"
#include "meshwm/runlength.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace meshwm {

struct DeletionChannelSpec {
    double p_d = 0.0;
    unsigned s_d = 1;
    std::uint64_t rng_seed = 0;

    void validate() const;
    /// P(j deletions in a run) for j = 0..s_d.
    std::vector<double> event_probabilities() const;
};

struct DeletionOutput {
    std::vector<std::uint8_t> bits;
    std::vector<std::size_t> deleted_positions; ///< indices into the input
    std::size_t capped_runs = 0; ///< runs too short for the sampled event (at most len - 1 bits removed)
};

/// One event per maximal run; the trailing j bits of the run are removed.
DeletionOutput apply_deletion_channel(std::span<const std::uint8_t> bits, const DeletionChannelSpec& spec);
DeletionOutput apply_deletion_channel(std::span<const std::uint8_t> bits, const DeletionChannelSpec& spec, Rng& rng);

struct DmcModel {
    std::vector<unsigned> input_costs;   ///< run length per input symbol
    std::vector<unsigned> output_lengths; ///< attainable run lengths, ascending
    std::vector<std::vector<double>> P;   ///< P[x][y] = p(output_lengths[y] | x)
};

DmcModel dmc_matrix(const RunAlphabet& alphabet, const DeletionChannelSpec& spec);

inline constexpr std::int64_t kDeleted = -1;

struct SurvivalMap {
    std::vector<std::int64_t> new_index; ///< per original vertex, kDeleted if removed
    /// Faces kept / original faces (meaningful for simplification).
    double achieved_face_fraction = 1.0;

    std::size_t original_count() const noexcept { return new_index.size(); }
    std::size_t survivor_count() const;
    std::size_t deleted_count() const { return original_count() - survivor_count(); }
    bool survived(std::uint32_t v) const { return new_index.at(v) != kDeleted; }

    /// Header `original_index,survived,new_index`; deleted rows carry -1.
    std::string to_csv() const;
    static SurvivalMap from_csv(std::string_view text);
};

struct AttackResult {
    Mesh mesh;
    SurvivalMap survival;
};

/// Quadric-error half-edge collapse until face count <= face_fraction * original.
/// Stops early (and reports the achieved fraction) when no collapse keeps the
/// mesh manifold and free of flipped faces.
AttackResult simplify_mesh(const Mesh& mesh, double face_fraction);

/// Removes every vertex within `radius_hops` edges of `center` plus incident faces.
AttackResult region_delete(const Mesh& mesh, std::uint32_t center, unsigned radius_hops);

struct DeletionPattern {
    std::vector<std::uint8_t> survived; ///< per selected vertex, in selection order
    double p_hat = 0.0;
    std::size_t max_consecutive = 0;
};

DeletionPattern deletion_pattern(std::span<const std::uint32_t> selection, const SurvivalMap& map);

/// Selection remapped into the attacked mesh; deleted entries become kMissingVertex.
std::vector<std::uint32_t> remap_selection(std::span<const std::uint32_t> selection, const SurvivalMap& map);

} // namespace meshwm
