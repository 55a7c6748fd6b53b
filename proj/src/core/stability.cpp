#include "meshwm/stability.hpp"

#include "meshwm/error.hpp"
#include "meshwm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <sstream>

namespace meshwm {

namespace {

constexpr double kPi = std::numbers::pi;

double corner_angle(const Point3& at, const Point3& a, const Point3& b)
{
    const Point3 u = a - at, w = b - at;
    return std::atan2(u.cross(w).norm(), u.dot(w));
}

double cotangent(const Point3& at, const Point3& a, const Point3& b)
{
    const Point3 u = a - at, w = b - at;
    const double s = u.cross(w).norm();
    return s > 0.0 ? u.dot(w) / s : 0.0;
}

// Undirected edge -> number of incident faces, stored sorted for lookup.
struct EdgeTable {
    std::vector<std::uint64_t> keys;
    std::vector<std::uint32_t> counts;

    static std::uint64_t key(std::uint32_t a, std::uint32_t b)
    {
        if (a > b)
            std::swap(a, b);
        return (static_cast<std::uint64_t>(a) << 32) | b;
    }

    explicit EdgeTable(const Mesh& mesh)
    {
        std::vector<std::uint64_t> all;
        all.reserve(mesh.face_count() * 3);
        for (const auto& f : mesh.faces())
            for (int c = 0; c < 3; ++c)
                all.push_back(key(f[c], f[(c + 1) % 3]));
        std::sort(all.begin(), all.end());
        for (std::size_t i = 0; i < all.size();) {
            std::size_t j = i;
            while (j < all.size() && all[j] == all[i])
                ++j;
            keys.push_back(all[i]);
            counts.push_back(static_cast<std::uint32_t>(j - i));
            i = j;
        }
    }

    std::uint32_t count(std::uint32_t a, std::uint32_t b) const
    {
        const auto k = key(a, b);
        auto it = std::lower_bound(keys.begin(), keys.end(), k);
        return (it != keys.end() && *it == k) ? counts[static_cast<std::size_t>(it - keys.begin())] : 0;
    }
};

struct TopologyFlags {
    std::vector<char> boundary;
    std::vector<char> nonmanifold;
};

// Faces around v must form one edge-connected fan.
bool single_fan(const Mesh& mesh, std::uint32_t v)
{
    const auto& vf = mesh.adjacency().vertex_faces[v];
    if (vf.size() <= 1)
        return true;
    std::vector<std::uint32_t> parent(vf.size());
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    auto others = [&](std::uint32_t f) {
        const Face& t = mesh.faces()[f];
        std::array<std::uint32_t, 2> o{};
        int k = 0;
        for (auto x : t)
            if (x != v)
                o[k++] = x;
        return o;
    };
    for (std::size_t i = 0; i < vf.size(); ++i) {
        const auto oi = others(vf[i]);
        for (std::size_t j = i + 1; j < vf.size(); ++j) {
            const auto oj = others(vf[j]);
            const bool share = oi[0] == oj[0] || oi[0] == oj[1] || oi[1] == oj[0] || oi[1] == oj[1];
            if (share)
                parent[find(static_cast<std::uint32_t>(i))] = find(static_cast<std::uint32_t>(j));
        }
    }
    const auto root = find(0);
    for (std::uint32_t i = 1; i < vf.size(); ++i)
        if (find(i) != root)
            return false;
    return true;
}

TopologyFlags topology_flags(const Mesh& mesh)
{
    const EdgeTable edges(mesh);
    TopologyFlags t;
    t.boundary.assign(mesh.vertex_count(), 0);
    t.nonmanifold.assign(mesh.vertex_count(), 0);
    for (std::size_t i = 0; i < edges.keys.size(); ++i) {
        const auto a = static_cast<std::uint32_t>(edges.keys[i] >> 32);
        const auto b = static_cast<std::uint32_t>(edges.keys[i] & 0xffffffffu);
        if (edges.counts[i] == 1)
            t.boundary[a] = t.boundary[b] = 1;
        else if (edges.counts[i] >= 3)
            t.nonmanifold[a] = t.nonmanifold[b] = 1;
    }
    for (std::uint32_t v = 0; v < mesh.vertex_count(); ++v)
        if (!t.nonmanifold[v] && !single_fan(mesh, v))
            t.nonmanifold[v] = 1;
    return t;
}

struct LocalGeometry {
    double angle_sum = 0.0;
    double area = 0.0;
    Point3 laplace = Point3::Zero(); // sum of cot weights * (p_v - p_j)
    Point3 normal = Point3::Zero();  // area-weighted
};

LocalGeometry local_geometry(const Mesh& mesh, std::uint32_t v)
{
    LocalGeometry g;
    const Point3& pv = mesh.vertex(v);
    for (auto f : mesh.adjacency().vertex_faces[v]) {
        const Face& t = mesh.faces()[f];
        int c = 0;
        while (t[c] != v)
            ++c;
        const Point3& pa = mesh.vertex(t[(c + 1) % 3]);
        const Point3& pb = mesh.vertex(t[(c + 2) % 3]);
        g.angle_sum += corner_angle(pv, pa, pb);
        const Point3 n2 = (pa - pv).cross(pb - pv);
        g.area += n2.norm() / 6.0;
        g.normal += n2;
        // cot at b weights edge (v,a); cot at a weights edge (v,b)
        g.laplace += cotangent(pb, pv, pa) * (pv - pa) + cotangent(pa, pv, pb) * (pv - pb);
    }
    return g;
}

double signed_mean_curvature(const LocalGeometry& g)
{
    if (!(g.area > 0.0))
        return 0.0;
    const Point3 k = g.laplace / (2.0 * g.area);
    const double h = 0.5 * k.norm();
    return k.dot(g.normal) < 0.0 ? -h : h;
}

void require_vertex(const Mesh& mesh, std::uint32_t v)
{
    if (v >= mesh.vertex_count())
        throw InvalidArgument("vertex " + std::to_string(v) + " out of range");
    if (mesh.adjacency().vertex_faces[v].empty())
        throw InvalidArgument("vertex " + std::to_string(v) + " is isolated");
}

bool vertex_on_boundary(const Mesh& mesh, std::uint32_t v)
{
    // an edge (v,w) is a boundary edge when exactly one face around v contains w
    const auto& vf = mesh.adjacency().vertex_faces[v];
    for (auto w : mesh.adjacency().vertex_neighbors[v]) {
        int n = 0;
        for (auto f : vf) {
            const Face& t = mesh.faces()[f];
            if (t[0] == w || t[1] == w || t[2] == w)
                ++n;
        }
        if (n == 1)
            return true;
    }
    return false;
}

// Fraction of values strictly below each entry.
std::vector<double> percentiles(const std::vector<double>& values)
{
    const std::size_t n = values.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<double> pct(n, 0.0);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && values[order[j]] == values[order[i]])
            ++j;
        for (std::size_t k = i; k < j; ++k)
            pct[order[k]] = static_cast<double>(i) / static_cast<double>(n);
        i = j;
    }
    return pct;
}

} // namespace

double angle_deficit(const Mesh& mesh, std::uint32_t v)
{
    require_vertex(mesh, v);
    const auto g = local_geometry(mesh, v);
    return (vertex_on_boundary(mesh, v) ? kPi : 2.0 * kPi) - g.angle_sum;
}

double gaussian_curvature(const Mesh& mesh, std::uint32_t v)
{
    require_vertex(mesh, v);
    const auto g = local_geometry(mesh, v);
    if (!(g.area > 0.0))
        throw InvalidArgument("vertex " + std::to_string(v) + " has a degenerate one-ring");
    return ((vertex_on_boundary(mesh, v) ? kPi : 2.0 * kPi) - g.angle_sum) / g.area;
}

double mean_curvature(const Mesh& mesh, std::uint32_t v)
{
    require_vertex(mesh, v);
    if (vertex_on_boundary(mesh, v))
        throw InvalidArgument("mean_curvature: vertex " + std::to_string(v) + " is on the boundary");
    return signed_mean_curvature(local_geometry(mesh, v));
}

std::vector<std::uint32_t> boundary_vertices(const Mesh& mesh)
{
    const auto t = topology_flags(mesh);
    std::vector<std::uint32_t> out;
    for (std::uint32_t v = 0; v < mesh.vertex_count(); ++v)
        if (t.boundary[v])
            out.push_back(v);
    return out;
}

std::vector<std::uint32_t> nonmanifold_vertices(const Mesh& mesh)
{
    const auto t = topology_flags(mesh);
    std::vector<std::uint32_t> out;
    for (std::uint32_t v = 0; v < mesh.vertex_count(); ++v)
        if (t.nonmanifold[v])
            out.push_back(v);
    return out;
}

std::vector<VertexMetrics> compute_vertex_metrics(const Mesh& mesh)
{
    const auto flags = topology_flags(mesh);
    std::vector<VertexMetrics> out(mesh.vertex_count());
    for (std::uint32_t v = 0; v < mesh.vertex_count(); ++v) {
        VertexMetrics& m = out[v];
        m.is_boundary = flags.boundary[v] != 0;
        m.is_nonmanifold = flags.nonmanifold[v] != 0;
        if (mesh.adjacency().vertex_faces[v].empty()) {
            m.is_isolated = true;
            continue;
        }
        const auto g = local_geometry(mesh, v);
        m.mixed_area = g.area;
        m.angle_deficit = (m.is_boundary ? kPi : 2.0 * kPi) - g.angle_sum;
        m.gaussian_curvature = g.area > 0.0 ? m.angle_deficit / g.area : 0.0;
        if (!m.is_boundary && !m.is_nonmanifold)
            m.mean_curvature = signed_mean_curvature(g);
    }
    return out;
}

double total_angle_deficit(const Mesh& mesh)
{
    double sum = 0.0;
    for (const auto& m : compute_vertex_metrics(mesh))
        if (!m.is_isolated)
            sum += m.angle_deficit;
    return sum;
}

long euler_characteristic(const Mesh& mesh)
{
    const EdgeTable edges(mesh);
    return static_cast<long>(mesh.vertex_count()) - static_cast<long>(edges.keys.size()) +
           static_cast<long>(mesh.face_count());
}

std::string StabilityConfig::digest() const
{
    char buf[128];
    std::snprintf(buf, sizeof buf, "stability-v1/wg=%.6g/wh=%.6g/wc=%.6g/risky=%.6g", w_gauss, w_mean, w_concave,
                  risky_percentile);
    return buf;
}

StabilityRanking stability_rank(const Mesh& mesh, const StabilityConfig& config)
{
    if (mesh.vertex_count() < config.min_vertices)
        throw CapabilityError("stability_rank: mesh has " + std::to_string(mesh.vertex_count()) +
                              " vertices, need at least " + std::to_string(config.min_vertices));

    const auto metrics = compute_vertex_metrics(mesh);
    std::vector<std::uint32_t> eligible;
    std::vector<double> abs_g, abs_h;
    for (std::uint32_t v = 0; v < metrics.size(); ++v) {
        const auto& m = metrics[v];
        if (m.is_boundary || m.is_nonmanifold || m.is_isolated || !(m.mixed_area > 0.0))
            continue;
        eligible.push_back(v);
        abs_g.push_back(std::abs(m.gaussian_curvature));
        abs_h.push_back(std::abs(m.mean_curvature));
    }

    const auto pct_g = percentiles(abs_g);
    const auto pct_h = percentiles(abs_h);
    const double risky = config.risky_percentile / 100.0;

    struct Entry {
        double score;
        std::uint32_t v;
    };
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < eligible.size(); ++i) {
        const auto& m = metrics[eligible[i]];
        // scale-free flatness: angle deficit in radians, H times a length
        const bool flat = std::abs(m.angle_deficit) <= 1e-9 && std::abs(m.mean_curvature) * std::sqrt(m.mixed_area) <= 1e-9;
        if (flat || (pct_g[i] < risky && pct_h[i] < risky))
            continue;
        const double concave = m.mean_curvature < 0.0 ? pct_h[i] : 0.0;
        entries.push_back({config.w_gauss * pct_g[i] + config.w_mean * pct_h[i] + config.w_concave * concave, eligible[i]});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.v < b.v;
    });

    StabilityRanking r;
    r.config_digest = config.digest();
    r.scores.reserve(entries.size());
    r.indices.reserve(entries.size());
    for (const auto& e : entries) {
        r.scores.push_back(e.score);
        r.indices.push_back(e.v);
    }
    return r;
}

std::vector<std::uint32_t> select_embedding_vertices(const StabilityRanking& ranking, std::size_t count,
                                                     std::uint64_t /*key*/)
{
    if (count == 0)
        throw InvalidArgument("select_embedding_vertices: count must be positive");
    if (count > ranking.size())
        throw CapabilityError("select_embedding_vertices: requested " + std::to_string(count) +
                              " vertices but only " + std::to_string(ranking.size()) + " are stable");
    return {ranking.indices.begin(), ranking.indices.begin() + static_cast<std::ptrdiff_t>(count)};
}

std::vector<std::uint32_t> interleave_selection(std::vector<std::uint32_t> selection, std::uint64_t key)
{
    std::sort(selection.begin(), selection.end());
    Rng rng(hash_seed(key, 0x1e7e41eaULL, selection.size()));
    shuffle(selection, rng);
    return selection;
}

std::string ranking_csv(const StabilityRanking& ranking, const std::vector<VertexMetrics>& metrics)
{
    std::ostringstream out;
    out.precision(17);
    out << "index,score,gaussian_curvature,mean_curvature\n";
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        const auto v = ranking.indices[i];
        out << v << ',' << ranking.scores[i] << ',' << metrics.at(v).gaussian_curvature << ','
            << metrics.at(v).mean_curvature << '\n';
    }
    return out.str();
}

} // namespace meshwm
