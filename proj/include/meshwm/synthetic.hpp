#pragma once

#include "meshwm/mesh.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace meshwm {

/// Closed geodesic sphere (10 f^2 + 2 vertices) with seeded bumps, dents and spikes.
Mesh make_feature_sphere(std::uint64_t seed, unsigned frequency = 55);

/// Height-field grid (open, with boundary): flat plains, ridges and peaks.
Mesh make_terrain(std::uint64_t seed, unsigned grid = 173);

/// Torus (major x minor samples) with seeded outward spikes.
Mesh make_spiky_torus(std::uint64_t seed, unsigned major = 240, unsigned minor = 125);

/// The three ~30k-vertex test meshes, named "sphere", "terrain", "torus".
struct NamedMesh {
    std::string name;
    Mesh mesh;
};
std::vector<NamedMesh> standard_test_meshes(std::uint64_t seed);

Mesh make_tetrahedron();
Mesh make_icosahedron();
/// n x n unit grid in the xy-plane; the center vertex is raised to `spike`.
Mesh make_spike_grid(unsigned n, double spike);

} // namespace meshwm
