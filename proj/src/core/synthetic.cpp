#include "meshwm/synthetic.hpp"

#include "meshwm/error.hpp"
#include "meshwm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

namespace meshwm {

namespace {

constexpr double kPi = std::numbers::pi;

struct Feature {
    Point3 dir;
    double amplitude;
    double width; // angular, radians
};

Point3 random_direction(Rng& rng)
{
    for (;;) {
        Point3 p(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        const double n = p.norm();
        if (n > 1e-3 && n <= 1.0)
            return p / n;
    }
}

} // namespace

Mesh make_tetrahedron()
{
    std::vector<Point3> v{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    std::vector<Face> f{{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    return Mesh(std::move(v), std::move(f));
}

Mesh make_icosahedron()
{
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Point3> v{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                          {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto& p : v)
        p.normalize();
    std::vector<Face> f{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                        {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    return Mesh(std::move(v), std::move(f));
}

Mesh make_feature_sphere(std::uint64_t seed, unsigned frequency)
{
    if (frequency < 1)
        throw InvalidArgument("make_feature_sphere: frequency must be positive");
    const Mesh ico = make_icosahedron();
    const unsigned f = frequency;
    std::vector<Point3> verts(ico.vertices());
    std::vector<Face> faces;
    std::map<std::tuple<std::uint32_t, std::uint32_t, unsigned>, std::uint32_t> edge_points;

    // Lattice point (i, j) of a face with corners a, b, c: a + i/f (b - a) + j/f (c - a).
    auto edge_point = [&](std::uint32_t a, std::uint32_t b, unsigned t) -> std::uint32_t {
        if (t == 0)
            return a;
        if (t == f)
            return b;
        if (a > b) {
            std::swap(a, b);
            t = f - t;
        }
        const auto key = std::make_tuple(a, b, t);
        auto it = edge_points.find(key);
        if (it != edge_points.end())
            return it->second;
        const Point3 p = ico.vertex(a) + (ico.vertex(b) - ico.vertex(a)) * (static_cast<double>(t) / f);
        verts.push_back(p.normalized());
        const auto id = static_cast<std::uint32_t>(verts.size() - 1);
        edge_points.emplace(key, id);
        return id;
    };

    for (const auto& tri : ico.faces()) {
        const auto a = tri[0], b = tri[1], c = tri[2];
        std::vector<std::vector<std::uint32_t>> idx(f + 1);
        for (unsigned i = 0; i <= f; ++i) {
            idx[i].resize(f + 1 - i);
            for (unsigned j = 0; i + j <= f; ++j) {
                std::uint32_t id;
                if (j == 0)
                    id = edge_point(a, b, i);
                else if (i == 0)
                    id = edge_point(a, c, j);
                else if (i + j == f)
                    id = edge_point(b, c, j);
                else {
                    const Point3 p = ico.vertex(a) + (ico.vertex(b) - ico.vertex(a)) * (static_cast<double>(i) / f) +
                                     (ico.vertex(c) - ico.vertex(a)) * (static_cast<double>(j) / f);
                    verts.push_back(p.normalized());
                    id = static_cast<std::uint32_t>(verts.size() - 1);
                }
                idx[i][j] = id;
            }
        }
        for (unsigned i = 0; i < f; ++i) {
            for (unsigned j = 0; i + j < f; ++j) {
                faces.push_back({idx[i][j], idx[i + 1][j], idx[i][j + 1]});
                if (i + j + 1 < f)
                    faces.push_back({idx[i + 1][j], idx[i + 1][j + 1], idx[i][j + 1]});
            }
        }
    }

    Rng rng(hash_seed(seed, 0x5be7e));
    std::vector<Feature> feats;
    for (int i = 0; i < 14; ++i) // broad bumps and dents
        feats.push_back({random_direction(rng), rng.uniform(0.04, 0.12) * (rng.bit() ? 1.0 : -1.0), rng.uniform(0.12, 0.3)});
    for (int i = 0; i < 40; ++i) // narrow spikes
        feats.push_back({random_direction(rng), rng.uniform(0.06, 0.2), rng.uniform(0.02, 0.045)});
    for (auto& p : verts) {
        double r = 1.0;
        for (const auto& ft : feats) {
            const double ang = std::acos(std::clamp(p.dot(ft.dir), -1.0, 1.0));
            r += ft.amplitude * std::exp(-0.5 * (ang / ft.width) * (ang / ft.width));
        }
        r += rng.uniform(-2e-4, 2e-4);
        p *= r;
    }
    return Mesh(std::move(verts), std::move(faces));
}

Mesh make_terrain(std::uint64_t seed, unsigned grid)
{
    if (grid < 2)
        throw InvalidArgument("make_terrain: grid must be at least 2");
    Rng rng(hash_seed(seed, 0x7e55a1));
    struct Peak {
        double x, y, h, w;
    };
    struct Ridge {
        double x0, y0, x1, y1, h, w;
    };
    std::vector<Peak> peaks;
    std::vector<Ridge> ridges;
    for (int i = 0; i < 30; ++i)
        peaks.push_back({rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95), rng.uniform(0.03, 0.15), rng.uniform(0.01, 0.04)});
    for (int i = 0; i < 6; ++i)
        ridges.push_back({rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9),
                          rng.uniform(0.02, 0.06), rng.uniform(0.008, 0.02)});

    std::vector<Point3> verts;
    verts.reserve(static_cast<std::size_t>(grid) * grid);
    const double h = 1.0 / (grid - 1);
    for (unsigned j = 0; j < grid; ++j) {
        for (unsigned i = 0; i < grid; ++i) {
            const double x = i * h, y = j * h;
            double z = 0.0;
            for (const auto& p : peaks) {
                const double d2 = (x - p.x) * (x - p.x) + (y - p.y) * (y - p.y);
                const double g = p.h * std::exp(-0.5 * d2 / (p.w * p.w));
                if (g > 1e-7)
                    z += g;
            }
            for (const auto& r : ridges) {
                const double dx = r.x1 - r.x0, dy = r.y1 - r.y0;
                const double t = std::clamp(((x - r.x0) * dx + (y - r.y0) * dy) / (dx * dx + dy * dy), 0.0, 1.0);
                const double ex = x - (r.x0 + t * dx), ey = y - (r.y0 + t * dy);
                const double g = r.h * std::exp(-0.5 * (ex * ex + ey * ey) / (r.w * r.w));
                if (g > 1e-7)
                    z += g;
            }
            verts.emplace_back(x, y, z);
        }
    }
    std::vector<Face> faces;
    for (unsigned j = 0; j + 1 < grid; ++j) {
        for (unsigned i = 0; i + 1 < grid; ++i) {
            const std::uint32_t a = j * grid + i, b = a + 1, c = a + grid, d = c + 1;
            faces.push_back({a, b, d});
            faces.push_back({a, d, c});
        }
    }
    return Mesh(std::move(verts), std::move(faces));
}

Mesh make_spiky_torus(std::uint64_t seed, unsigned major, unsigned minor)
{
    if (major < 3 || minor < 3)
        throw InvalidArgument("make_spiky_torus: need at least 3 samples per direction");
    const double R = 1.0, r = 0.35;
    Rng rng(hash_seed(seed, 0x70125));
    struct Spike {
        double u, v, h, w;
    };
    std::vector<Spike> spikes;
    for (int i = 0; i < 45; ++i)
        spikes.push_back({rng.uniform(0, 2 * kPi), rng.uniform(0, 2 * kPi), rng.uniform(0.04, 0.15), rng.uniform(0.03, 0.07)});
    auto wrap = [](double a) { return std::remainder(a, 2 * kPi); };

    std::vector<Point3> verts;
    for (unsigned i = 0; i < major; ++i) {
        const double u = 2 * kPi * i / major;
        for (unsigned j = 0; j < minor; ++j) {
            const double v = 2 * kPi * j / minor;
            double rr = r;
            for (const auto& s : spikes) {
                const double du = wrap(u - s.u) * R, dv = wrap(v - s.v) * r;
                const double g = s.h * std::exp(-0.5 * (du * du + dv * dv) / (s.w * s.w));
                if (g > 1e-7)
                    rr += g;
            }
            rr += rng.uniform(-1e-4, 1e-4);
            verts.emplace_back((R + rr * std::cos(v)) * std::cos(u), (R + rr * std::cos(v)) * std::sin(u), rr * std::sin(v));
        }
    }
    std::vector<Face> faces;
    for (unsigned i = 0; i < major; ++i) {
        for (unsigned j = 0; j < minor; ++j) {
            const std::uint32_t a = i * minor + j, b = ((i + 1) % major) * minor + j;
            const std::uint32_t c = i * minor + (j + 1) % minor, d = ((i + 1) % major) * minor + (j + 1) % minor;
            faces.push_back({a, b, d});
            faces.push_back({a, d, c});
        }
    }
    return Mesh(std::move(verts), std::move(faces));
}

std::vector<NamedMesh> standard_test_meshes(std::uint64_t seed)
{
    std::vector<NamedMesh> out;
    out.push_back({"sphere", make_feature_sphere(seed)});
    out.push_back({"terrain", make_terrain(seed)});
    out.push_back({"torus", make_spiky_torus(seed)});
    return out;
}

Mesh make_spike_grid(unsigned n, double spike)
{
    if (n < 3 || n % 2 == 0)
        throw InvalidArgument("make_spike_grid: n must be odd and at least 3");
    std::vector<Point3> verts;
    for (unsigned j = 0; j < n; ++j)
        for (unsigned i = 0; i < n; ++i)
            verts.emplace_back(static_cast<double>(i) / (n - 1), static_cast<double>(j) / (n - 1), 0.0);
    verts[(n / 2) * n + n / 2].z() = spike;
    std::vector<Face> faces;
    for (unsigned j = 0; j + 1 < n; ++j)
        for (unsigned i = 0; i + 1 < n; ++i) {
            const std::uint32_t a = j * n + i, b = a + 1, c = a + n, d = c + 1;
            faces.push_back({a, b, d});
            faces.push_back({a, d, c});
        }
    return Mesh(std::move(verts), std::move(faces));
}

} // namespace meshwm
