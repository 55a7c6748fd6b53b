#include "meshwm/qim.hpp"

#include "meshwm/error.hpp"
#include "meshwm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace meshwm {

void QimConfig::validate() const
{
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw InvalidArgument("qim: delta must be positive and finite");
    if (spreading_length < 1)
        throw InvalidArgument("qim: spreading length must be at least 1");
}

namespace {

void require_delta(double delta)
{
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw InvalidArgument("qim: delta must be positive and finite");
}

double dither(int u, double delta) { return (u == 0 ? 0.25 : -0.25) * delta; }

double dot(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw InvalidArgument("sqim: length mismatch (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
    if (a.empty())
        throw InvalidArgument("sqim: empty vector");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

void check_selection(std::span<const std::uint32_t> selection, std::size_t vertex_count, bool allow_missing)
{
    std::vector<std::uint32_t> sorted;
    sorted.reserve(selection.size());
    for (auto v : selection) {
        if (v == kMissingVertex && allow_missing)
            continue;
        if (v >= vertex_count)
            throw InvalidArgument("qim: selected vertex " + std::to_string(v) + " out of range");
        sorted.push_back(v);
    }
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InvalidArgument("qim: duplicate vertex in selection");
}

double normalized_radius(const Point3& p, const NormalizationFrame& frame)
{
    return (p - frame.origin).norm() / frame.scale_ref;
}

} // namespace

double qim_quantize(double x, int u, double delta)
{
    require_delta(delta);
    if (!std::isfinite(x))
        throw InvalidArgument("qim_quantize: non-finite input");
    if (u != 0 && u != 1)
        throw InvalidArgument("qim_quantize: bit must be 0 or 1");
    const double d = dither(u, delta);
    return delta * std::round((x - d) / delta) + d;
}

int qim_detect(double w, double delta)
{
    require_delta(delta);
    if (!std::isfinite(w))
        throw InvalidArgument("qim_detect: non-finite input");
    const double e0 = std::abs(w - qim_quantize(w, 0, delta));
    const double e1 = std::abs(w - qim_quantize(w, 1, delta));
    return e1 < e0 ? 1 : 0;
}

std::vector<double> sqim_embed(std::span<const double> x, std::span<const double> p, int u, double delta)
{
    const double proj = dot(x, p);
    const double shift = qim_quantize(proj, u, delta) - proj;
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] += shift * p[i];
    return y;
}

int sqim_detect(std::span<const double> r, std::span<const double> p, double delta)
{
    return qim_detect(dot(r, p), delta);
}

std::vector<double> generate_projection(std::uint64_t key, std::size_t length, std::uint64_t block)
{
    if (length < 1)
        throw InvalidArgument("generate_projection: length must be at least 1");
    Rng rng(hash_seed(key, 0x9f0ec7104ULL, block));
    const double a = 1.0 / std::sqrt(static_cast<double>(length));
    std::vector<double> p(length);
    for (auto& v : p)
        v = rng.bit() ? a : -a;
    return p;
}

double lattice_residual(double r, double delta)
{
    // both cosets together form the lattice delta/4 + k*delta/2
    const double t = r / delta - 0.25;
    return std::abs(t - 0.5 * std::round(2.0 * t));
}

namespace {

// Lattice index n of a quantized value: Q = n * delta + dither(u).
std::int64_t lattice_index(double q, int u, double delta)
{
    return static_cast<std::int64_t>(std::llround((q - dither(u, delta)) / delta));
}

enum class IndexMode {
    Nearest, ///< pick the nearest coset point and record its lattice index
    Sticky,  ///< keep the recorded index unless it is more than delta/2 away
    Frozen,  ///< always use the recorded index
};

using Projections = std::vector<std::vector<double>>;

Projections block_projections(const QimConfig& cfg, std::size_t blocks)
{
    Projections out;
    out.reserve(blocks);
    for (std::size_t j = 0; j < blocks; ++j)
        out.push_back(generate_projection(cfg.key, cfg.spreading_length, j));
    return out;
}

Mesh embed_blocks(const Mesh& mesh, std::span<const std::uint32_t> selection, std::span<const std::uint8_t> bits,
                  const QimConfig& cfg, const Projections& proj_vectors, const NormalizationFrame& frame,
                  std::vector<std::int64_t>& indices, IndexMode mode, std::size_t* changed = nullptr)
{
    cfg.validate();
    const std::size_t L = cfg.spreading_length;
    if (selection.size() < bits.size() * L)
        throw CapabilityError("embed: selection holds " + std::to_string(selection.size()) + " vertices, need " +
                              std::to_string(bits.size() * L));
    check_selection(selection, mesh.vertex_count(), false);
    if (indices.size() != bits.size()) {
        indices.assign(bits.size(), 0);
        mode = IndexMode::Nearest;
    }
    if (changed)
        *changed = 0;

    std::vector<Point3> out = mesh.vertices();
    std::vector<double> x(L);
    for (std::size_t j = 0; j < bits.size(); ++j) {
        for (std::size_t i = 0; i < L; ++i) {
            x[i] = normalized_radius(mesh.vertex(selection[j * L + i]), frame);
            if (!(x[i] > 0.0))
                throw CapabilityError("embed: selected vertex " + std::to_string(selection[j * L + i]) +
                                      " sits at the frame origin");
        }
        const int u = bits[j] ? 1 : 0;
        const auto& p = proj_vectors[j];
        const double proj = dot(x, p);
        double target = static_cast<double>(indices[j]) * cfg.delta + dither(u, cfg.delta);
        if (mode == IndexMode::Nearest || (mode == IndexMode::Sticky && std::abs(target - proj) > 0.5 * cfg.delta)) {
            const double q = qim_quantize(proj, u, cfg.delta);
            const auto idx = lattice_index(q, u, cfg.delta);
            if (changed && idx != indices[j])
                ++*changed;
            indices[j] = idx;
            target = q;
        }
        for (std::size_t i = 0; i < L; ++i) {
            const double y = x[i] + (target - proj) * p[i];
            if (!(y > 0.0))
                throw CapabilityError("embed: quantized radius would be non-positive");
            const auto v = selection[j * L + i];
            out[v] = frame.origin + (mesh.vertex(v) - frame.origin) * (y / x[i]);
        }
    }
    return mesh.with_vertices(std::move(out));
}

} // namespace

Mesh embed_bits_with_frame(const Mesh& mesh, std::span<const std::uint32_t> selection,
                           std::span<const std::uint8_t> bits, const QimConfig& cfg, const NormalizationFrame& frame)
{
    std::vector<std::int64_t> indices;
    return embed_blocks(mesh, selection, bits, cfg, block_projections(cfg, bits.size()), frame, indices,
                        IndexMode::Nearest);
}

Mesh embed_bits_in_mesh(const Mesh& mesh, std::span<const std::uint32_t> selection, std::span<const std::uint8_t> bits,
                        const QimConfig& cfg, CentroidMode mode, std::vector<std::uint32_t>* unsettled)
{
    if (unsettled)
        unsettled->clear();
    // Radii depend only on origin and scale, so only those need to settle.
    // Lattice indices move only when the current one drifts past delta/2,
    // which damps the collective flipping of radii near decision midpoints;
    // once no index moves they are frozen and the frame converges.
    const Projections projections = block_projections(cfg, bits.size());
    NormalizationFrame frame = compute_frame_center(mesh, mode);
    std::vector<std::int64_t> indices;
    Mesh marked = embed_blocks(mesh, selection, bits, cfg, projections, frame, indices, IndexMode::Nearest);
    const auto settle = [&](int free_passes) {
        for (int iter = 0; iter < 256; ++iter) {
            const NormalizationFrame next = compute_frame_center(marked, mode);
            const double moved = (next.origin - frame.origin).norm() / frame.scale_ref +
                                 std::abs(next.scale_ref - frame.scale_ref) / frame.scale_ref;
            frame = next;
            std::size_t changed = 0;
            const bool free = iter < free_passes;
            marked = embed_blocks(mesh, selection, bits, cfg, projections, frame, indices,
                                  free ? IndexMode::Sticky : IndexMode::Frozen, &changed);
            if (moved <= 1e-15 && changed == 0)
                return;
        }
    };
    settle(32);

    // Flipping every stale index at once can cycle, so repair one block per
    // round. A block that keeps flipping back sits on a decision midpoint in
    // both frames and is left alone.
    const std::size_t L = cfg.spreading_length;
    std::vector<int> flips(bits.size(), 0);
    std::vector<double> x(L);
    for (int round = 0; round < 64; ++round) {
        double worst = 0.0;
        std::size_t worst_j = bits.size();
        for (std::size_t j = 0; j < bits.size(); ++j) {
            if (flips[j] >= 2)
                continue;
            const auto& p = projections[j];
            for (std::size_t i = 0; i < L; ++i)
                x[i] = normalized_radius(mesh.vertex(selection[j * L + i]), frame);
            const double target = static_cast<double>(indices[j]) * cfg.delta + dither(bits[j] ? 1 : 0, cfg.delta);
            const double excess = std::abs(target - dot(x, p)) - 0.5 * cfg.delta;
            if (excess > worst) {
                worst = excess;
                worst_j = j;
            }
        }
        if (worst_j == bits.size()) {
            if (unsettled) {
                for (std::size_t j = 0; j < bits.size(); ++j) {
                    if (flips[j] < 2)
                        continue;
                    const auto& p = projections[j];
                    for (std::size_t i = 0; i < L; ++i)
                        x[i] = normalized_radius(mesh.vertex(selection[j * L + i]), frame);
                    const double target =
                        static_cast<double>(indices[j]) * cfg.delta + dither(bits[j] ? 1 : 0, cfg.delta);
                    if (std::abs(target - dot(x, p)) > 0.5 * cfg.delta)
                        unsettled->insert(unsettled->end(), selection.begin() + j * L, selection.begin() + (j + 1) * L);
                }
            }
            return marked;
        }
        const auto& p = projections[worst_j];
        for (std::size_t i = 0; i < L; ++i)
            x[i] = normalized_radius(mesh.vertex(selection[worst_j * L + i]), frame);
        const int u = bits[worst_j] ? 1 : 0;
        indices[worst_j] = lattice_index(qim_quantize(dot(x, p), u, cfg.delta), u, cfg.delta);
        ++flips[worst_j];
        marked = embed_blocks(mesh, selection, bits, cfg, projections, frame, indices, IndexMode::Frozen);
        settle(0);
    }
    // accept a slow tail when every carrier block already decodes on the lattice of its own frame
    const NormalizationFrame own = compute_frame_center(marked, mode);
    std::vector<double> r(L);
    for (std::size_t j = 0; j < bits.size(); ++j) {
        const auto p = generate_projection(cfg.key, L, j);
        for (std::size_t i = 0; i < L; ++i)
            r[i] = normalized_radius(marked.vertex(selection[j * L + i]), own);
        if (lattice_residual(dot(r, p), cfg.delta) > kLatticeTolerance)
            throw CapabilityError("embed: normalization frame did not settle");
    }
    return marked;
}

std::vector<std::int8_t> extract_bits_with_frame(const Mesh& mesh, std::span<const std::uint32_t> selection,
                                                 const QimConfig& cfg, const NormalizationFrame& frame)
{
    cfg.validate();
    const std::size_t L = cfg.spreading_length;
    if (selection.size() % L != 0)
        throw InvalidArgument("extract: selection size " + std::to_string(selection.size()) +
                              " is not a multiple of L=" + std::to_string(L));
    check_selection(selection, mesh.vertex_count(), true);

    std::vector<std::int8_t> bits(selection.size() / L);
    std::vector<double> r, p;
    for (std::size_t j = 0; j < bits.size(); ++j) {
        const auto full = generate_projection(cfg.key, L, j);
        r.clear();
        p.clear();
        for (std::size_t i = 0; i < L; ++i) {
            const auto v = selection[j * L + i];
            if (v == kMissingVertex)
                continue;
            r.push_back(normalized_radius(mesh.vertex(v), frame));
            p.push_back(full[i]);
        }
        if (r.empty()) {
            bits[j] = kDeletedBit;
            continue;
        }
        if (r.size() < L) {
            double n2 = 0.0;
            for (double v : p)
                n2 += v * v;
            const double s = 1.0 / std::sqrt(n2);
            for (double& v : p)
                v *= s;
        }
        bits[j] = static_cast<std::int8_t>(sqim_detect(r, p, cfg.delta));
    }
    return bits;
}

std::vector<std::int8_t> extract_bits_from_mesh(const Mesh& mesh, std::span<const std::uint32_t> selection,
                                                const QimConfig& cfg, CentroidMode mode)
{
    return extract_bits_with_frame(mesh, selection, cfg, compute_frame(mesh, mode));
}

} // namespace meshwm
