#pragma once

#include "meshwm/mesh.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace meshwm {

struct VertexMetrics {
    double gaussian_curvature = 0.0; ///< angle deficit / mixed area
    double mean_curvature = 0.0;     ///< signed; positive where the surface bulges along the outward normal
    double angle_deficit = 0.0;
    double mixed_area = 0.0;         ///< one third of the incident triangle areas
    bool is_boundary = false;
    bool is_nonmanifold = false;
    bool is_isolated = false;
};

/// Angle deficit 2*pi - sum(angles) for interior, pi - sum for boundary vertices.
double angle_deficit(const Mesh& mesh, std::uint32_t v);
double gaussian_curvature(const Mesh& mesh, std::uint32_t v);
/// Half the norm of the cotangent Laplace vector over the mixed area, signed by
/// agreement with the area-weighted outward vertex normal. Throws for boundary vertices.
double mean_curvature(const Mesh& mesh, std::uint32_t v);

std::vector<std::uint32_t> boundary_vertices(const Mesh& mesh);
std::vector<std::uint32_t> nonmanifold_vertices(const Mesh& mesh);

/// Metrics for every vertex in one pass. Boundary and nonmanifold vertices get
/// mean_curvature = 0 (undefined there); isolated vertices are flagged.
std::vector<VertexMetrics> compute_vertex_metrics(const Mesh& mesh);

/// Sum of interior angle deficits plus boundary turning deficits.
double total_angle_deficit(const Mesh& mesh);
/// V - E + F.
long euler_characteristic(const Mesh& mesh);

struct StabilityConfig {
    double w_gauss = 0.5;
    double w_mean = 0.3;
    double w_concave = 0.2;
    /// Vertices whose |kappa_G| and |kappa_H| percentiles are both below this are risky.
    double risky_percentile = 20.0;
    std::size_t min_vertices = 4;

    std::string digest() const;
};

struct StabilityRanking {
    std::vector<double> scores;          ///< non-increasing
    std::vector<std::uint32_t> indices;  ///< vertex ids, same length as scores
    std::string config_digest;

    std::size_t size() const noexcept { return indices.size(); }
};

StabilityRanking stability_rank(const Mesh& mesh, const StabilityConfig& config = {});

/// First `count` ranked vertices, in ranking order. `key` does not affect the result.
std::vector<std::uint32_t> select_embedding_vertices(const StabilityRanking& ranking, std::size_t count,
                                                     std::uint64_t key = 0);

/// Canonical carrier order: ascending vertex index, then a key-seeded shuffle.
/// Depends only on the set, so extraction can rebuild it from the carrier set.
std::vector<std::uint32_t> interleave_selection(std::vector<std::uint32_t> selection, std::uint64_t key);

/// CSV with header `index,score,gaussian_curvature,mean_curvature`.
std::string ranking_csv(const StabilityRanking& ranking, const std::vector<VertexMetrics>& metrics);

} // namespace meshwm
