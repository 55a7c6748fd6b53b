#pragma once

#include "meshwm/mesh.hpp"
#include "meshwm/synthetic.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <utility>

namespace testutil {

using meshwm::Face;
using meshwm::Mesh;
using meshwm::Point3;

// Loop-style 4:1 subdivision of the icosahedron, projected onto radius R.
inline Mesh geodesic_sphere(unsigned levels, double radius)
{
    const Mesh ico = meshwm::make_icosahedron();
    std::vector<Point3> verts = ico.vertices();
    std::vector<Face> faces(ico.faces().begin(), ico.faces().end());
    for (auto& p : verts)
        p = p.normalized();
    for (unsigned l = 0; l < levels; ++l) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
        auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
            const auto k = std::minmax(a, b);
            auto it = mid.find(k);
            if (it != mid.end())
                return it->second;
            verts.push_back((verts[a] + verts[b]).normalized());
            const auto id = static_cast<std::uint32_t>(verts.size() - 1);
            mid.emplace(k, id);
            return id;
        };
        std::vector<Face> next;
        for (const auto& f : faces) {
            const auto ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    for (auto& p : verts)
        p *= radius;
    return Mesh(std::move(verts), std::move(faces));
}

// (n+1)x(n+1) samples of z = f(x, y) over [-1, 1]^2, counter-clockwise faces.
inline Mesh height_field(unsigned n, const std::function<double(double, double)>& f)
{
    std::vector<Point3> verts;
    std::vector<Face> faces;
    for (unsigned j = 0; j <= n; ++j)
        for (unsigned i = 0; i <= n; ++i) {
            const double x = -1.0 + 2.0 * i / n, y = -1.0 + 2.0 * j / n;
            verts.emplace_back(x, y, f(x, y));
        }
    auto id = [n](unsigned i, unsigned j) { return static_cast<std::uint32_t>(j * (n + 1) + i); };
    for (unsigned j = 0; j < n; ++j)
        for (unsigned i = 0; i < n; ++i) {
            faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return Mesh(std::move(verts), std::move(faces));
}

inline std::uint32_t grid_center(unsigned n)
{
    return static_cast<std::uint32_t>((n / 2) * (n + 1) + n / 2);
}

} // namespace testutil
