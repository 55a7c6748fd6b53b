#include "meshwm/channel.hpp"

#include "meshwm/error.hpp"
#include "meshwm/qim.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <tuple>

namespace meshwm {

void DeletionChannelSpec::validate() const { (void)event_probabilities(); }

std::vector<double> DeletionChannelSpec::event_probabilities() const
{
    if (!(p_d >= 0.0 && p_d < 1.0))
        throw InvalidArgument("deletion channel: p_d must lie in [0, 1)");
    if (s_d < 1)
        throw InvalidArgument("deletion channel: s_d must be at least 1");
    std::vector<double> law(s_d + 1);
    double total = 0.0, pj = 1.0;
    for (unsigned j = 1; j <= s_d; ++j) {
        pj *= p_d;
        law[j] = pj;
        total += pj;
    }
    if (!(total < 1.0))
        throw InvalidArgument("deletion channel: event probabilities sum to 1 or more");
    law[0] = 1.0 - total;
    return law;
}

DeletionOutput apply_deletion_channel(std::span<const std::uint8_t> bits, const DeletionChannelSpec& spec)
{
    Rng rng(spec.rng_seed);
    return apply_deletion_channel(bits, spec, rng);
}

DeletionOutput apply_deletion_channel(std::span<const std::uint8_t> bits, const DeletionChannelSpec& spec, Rng& rng)
{
    const auto law = spec.event_probabilities();
    DeletionOutput out;
    out.bits.reserve(bits.size());
    std::size_t i = 0;
    while (i < bits.size()) {
        std::size_t end = i + 1;
        while (end < bits.size() && (bits[end] != 0) == (bits[i] != 0))
            ++end;
        const std::size_t len = end - i;
        std::size_t j = 0;
        if (spec.p_d > 0.0) {
            const double u = rng.uniform();
            double acc = law[0];
            while (j < spec.s_d && u >= acc)
                acc += law[++j];
        }
        if (j >= len) {
            j = len - 1;
            ++out.capped_runs;
        }
        out.bits.insert(out.bits.end(), bits.begin() + static_cast<std::ptrdiff_t>(i),
                        bits.begin() + static_cast<std::ptrdiff_t>(end - j));
        for (std::size_t k = end - j; k < end; ++k)
            out.deleted_positions.push_back(k);
        i = end;
    }
    return out;
}

DmcModel dmc_matrix(const RunAlphabet& alphabet, const DeletionChannelSpec& spec)
{
    alphabet.validate();
    const auto law = spec.event_probabilities();
    if (alphabet.min_run() <= spec.s_d)
        throw InvalidArgument("dmc_matrix: every run length must exceed s_d");
    DmcModel m;
    m.input_costs = alphabet.run_lengths;
    for (auto run : alphabet.run_lengths)
        for (unsigned j = 0; j <= spec.s_d; ++j)
            m.output_lengths.push_back(run - j);
    std::sort(m.output_lengths.begin(), m.output_lengths.end());
    m.output_lengths.erase(std::unique(m.output_lengths.begin(), m.output_lengths.end()), m.output_lengths.end());
    m.P.assign(alphabet.size(), std::vector<double>(m.output_lengths.size(), 0.0));
    for (std::size_t x = 0; x < alphabet.size(); ++x) {
        for (unsigned j = 0; j <= spec.s_d; ++j) {
            const auto y = std::lower_bound(m.output_lengths.begin(), m.output_lengths.end(),
                                            alphabet.run_lengths[x] - j) -
                           m.output_lengths.begin();
            m.P[x][static_cast<std::size_t>(y)] += law[j];
        }
    }
    return m;
}

std::size_t SurvivalMap::survivor_count() const
{
    return static_cast<std::size_t>(
        std::count_if(new_index.begin(), new_index.end(), [](auto i) { return i != kDeleted; }));
}

std::string SurvivalMap::to_csv() const
{
    std::ostringstream out;
    out << "original_index,survived,new_index\n";
    for (std::size_t v = 0; v < new_index.size(); ++v)
        out << v << ',' << (new_index[v] != kDeleted ? 1 : 0) << ',' << new_index[v] << '\n';
    return out.str();
}

SurvivalMap SurvivalMap::from_csv(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line.rfind("original_index,survived,new_index", 0) != 0)
        throw ParseError("survival map: missing header original_index,survived,new_index");
    SurvivalMap m;
    std::size_t line_no = 1;
    std::vector<char> used;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        long long orig, surv, idx;
        char c1, c2;
        std::istringstream ls(line);
        if (!(ls >> orig >> c1 >> surv >> c2 >> idx) || c1 != ',' || c2 != ',')
            throw ParseError("survival map: malformed line " + std::to_string(line_no));
        if (orig != static_cast<long long>(m.new_index.size()))
            throw ParseError("survival map: rows must list original indices in order (line " +
                             std::to_string(line_no) + ")");
        if ((surv == 1) != (idx >= 0) || (surv != 0 && surv != 1) || idx < -1)
            throw ParseError("survival map: inconsistent row at line " + std::to_string(line_no));
        if (idx >= 0) {
            if (static_cast<std::size_t>(idx) >= used.size())
                used.resize(static_cast<std::size_t>(idx) + 1, 0);
            if (used[static_cast<std::size_t>(idx)])
                throw ParseError("survival map: new index " + std::to_string(idx) + " used twice");
            used[static_cast<std::size_t>(idx)] = 1;
        }
        m.new_index.push_back(idx);
    }
    return m;
}

namespace {

Mesh compact(const Mesh& mesh, const std::vector<char>& keep_vertex, const std::vector<Face>& faces,
             SurvivalMap& map)
{
    map.new_index.assign(mesh.vertex_count(), kDeleted);
    std::vector<Point3> verts;
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        if (keep_vertex[v]) {
            map.new_index[v] = static_cast<std::int64_t>(verts.size());
            verts.push_back(mesh.vertex(v));
        }
    }
    std::vector<Face> out;
    out.reserve(faces.size());
    for (const auto& f : faces)
        out.push_back({static_cast<std::uint32_t>(map.new_index[f[0]]), static_cast<std::uint32_t>(map.new_index[f[1]]),
                       static_cast<std::uint32_t>(map.new_index[f[2]])});
    return Mesh(std::move(verts), std::move(out));
}

class Simplifier {
public:
    explicit Simplifier(const Mesh& mesh) : mesh_(mesh), pos_(mesh.vertices())
    {
        const std::size_t nv = mesh.vertex_count();
        faces_.assign(mesh.faces().begin(), mesh.faces().end());
        face_alive_.assign(faces_.size(), 1);
        vf_ = mesh.adjacency().vertex_faces;
        vertex_alive_.assign(nv, 1);
        version_.assign(nv, 0);
        alive_faces_ = faces_.size();
        alive_vertices_ = nv;
        build_quadrics();
    }

    void run(std::size_t target_faces)
    {
        for (std::uint32_t v = 0; v < vf_.size(); ++v)
            push_best(v);
        while (alive_faces_ > target_faces && !heap_.empty() && alive_vertices_ > 4) {
            const auto [cost, v, u, ver] = heap_.top();
            heap_.pop();
            (void)cost;
            if (!vertex_alive_[v] || ver != version_[v])
                continue;
            if (!vertex_alive_[u] || !valid(v, u)) {
                ++version_[v];
                push_best(v);
                continue;
            }
            collapse(v, u);
        }
    }

    AttackResult finish(std::size_t original_faces)
    {
        std::vector<char> referenced(pos_.size(), 0);
        std::vector<Face> kept;
        for (std::size_t f = 0; f < faces_.size(); ++f) {
            if (!face_alive_[f])
                continue;
            kept.push_back(faces_[f]);
            for (auto v : faces_[f])
                referenced[v] = 1;
        }
        for (std::size_t v = 0; v < pos_.size(); ++v)
            referenced[v] = referenced[v] && vertex_alive_[v];
        AttackResult r;
        r.mesh = compact(mesh_, referenced, kept, r.survival);
        r.survival.achieved_face_fraction =
            original_faces ? static_cast<double>(kept.size()) / static_cast<double>(original_faces) : 1.0;
        return r;
    }

private:
    using Entry = std::tuple<double, std::uint32_t, std::uint32_t, std::uint32_t>; // cost, v, u, version

    void build_quadrics()
    {
        Q_.assign(pos_.size(), Eigen::Matrix4d::Zero());
        for (const auto& f : faces_) {
            const Point3 n2 = (pos_[f[1]] - pos_[f[0]]).cross(pos_[f[2]] - pos_[f[0]]);
            const double len = n2.norm();
            if (!(len > 0.0))
                continue;
            const Point3 n = n2 / len;
            Eigen::Vector4d plane(n.x(), n.y(), n.z(), -n.dot(pos_[f[0]]));
            const Eigen::Matrix4d K = (0.5 * len) * plane * plane.transpose();
            for (auto v : f)
                Q_[v] += K;
        }
        // constraint planes perpendicular to boundary edges keep the border in place
        for (std::size_t fi = 0; fi < faces_.size(); ++fi) {
            const auto& f = faces_[fi];
            const Point3 n2 = (pos_[f[1]] - pos_[f[0]]).cross(pos_[f[2]] - pos_[f[0]]);
            if (!(n2.norm() > 0.0))
                continue;
            for (int c = 0; c < 3; ++c) {
                const auto a = f[c], b = f[(c + 1) % 3];
                if (edge_faces(a, b).size() != 1)
                    continue;
                const Point3 e = pos_[b] - pos_[a];
                Point3 m = e.cross(n2);
                const double ml = m.norm();
                if (!(ml > 0.0))
                    continue;
                m /= ml;
                Eigen::Vector4d plane(m.x(), m.y(), m.z(), -m.dot(pos_[a]));
                const Eigen::Matrix4d K = (10.0 * e.squaredNorm()) * plane * plane.transpose();
                Q_[a] += K;
                Q_[b] += K;
            }
        }
    }

    std::vector<std::uint32_t> edge_faces(std::uint32_t a, std::uint32_t b) const
    {
        std::vector<std::uint32_t> out;
        for (auto f : vf_[a]) {
            const auto& t = faces_[f];
            if (t[0] == b || t[1] == b || t[2] == b)
                out.push_back(f);
        }
        return out;
    }

    std::vector<std::uint32_t> neighbors(std::uint32_t v) const
    {
        std::vector<std::uint32_t> out;
        for (auto f : vf_[v])
            for (auto w : faces_[f])
                if (w != v)
                    out.push_back(w);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    bool on_boundary(std::uint32_t v) const
    {
        for (auto w : neighbors(v))
            if (edge_faces(v, w).size() == 1)
                return true;
        return false;
    }

    bool valid(std::uint32_t v, std::uint32_t u) const
    {
        const auto shared = edge_faces(v, u);
        if (shared.empty() || shared.size() > 2)
            return false;
        if (shared.size() == 2 && on_boundary(v))
            return false;
        if (shared.size() == 1 && !on_boundary(u))
            return false;

        std::vector<std::uint32_t> opposite;
        for (auto f : shared)
            for (auto w : faces_[f])
                if (w != u && w != v)
                    opposite.push_back(w);
        std::sort(opposite.begin(), opposite.end());
        const auto nu = neighbors(u), nv = neighbors(v);
        std::vector<std::uint32_t> common;
        std::set_intersection(nu.begin(), nu.end(), nv.begin(), nv.end(), std::back_inserter(common));
        if (common != opposite)
            return false;

        const Point3& target = pos_[u];
        for (auto f : vf_[v]) {
            const auto& t = faces_[f];
            if (t[0] == u || t[1] == u || t[2] == u)
                continue;
            std::array<Point3, 3> p{pos_[t[0]], pos_[t[1]], pos_[t[2]]};
            const Point3 n0 = (p[1] - p[0]).cross(p[2] - p[0]);
            for (int c = 0; c < 3; ++c)
                if (t[c] == v)
                    p[c] = target;
            const Point3 n1 = (p[1] - p[0]).cross(p[2] - p[0]);
            const double l0 = n0.norm(), l1 = n1.norm();
            if (!(l1 > 1e-12 * l0) || n0.dot(n1) < 0.2 * l0 * l1)
                return false;
        }
        return true;
    }

    double cost(std::uint32_t v, std::uint32_t u) const
    {
        const Eigen::Vector4d p(pos_[u].x(), pos_[u].y(), pos_[u].z(), 1.0);
        return std::max(0.0, p.dot((Q_[u] + Q_[v]) * p));
    }

    void push_best(std::uint32_t v)
    {
        if (!vertex_alive_[v] || vf_[v].empty())
            return;
        double best = 0.0;
        std::uint32_t best_u = 0;
        bool found = false;
        for (auto u : neighbors(v)) {
            const double c = cost(v, u);
            if (found && !(c < best))
                continue;
            if (!valid(v, u))
                continue;
            best = c;
            best_u = u;
            found = true;
        }
        if (found)
            heap_.emplace(best, v, best_u, version_[v]);
    }

    void collapse(std::uint32_t v, std::uint32_t u)
    {
        for (auto f : edge_faces(v, u)) {
            face_alive_[f] = 0;
            --alive_faces_;
            for (auto w : faces_[f]) {
                auto& lst = vf_[w];
                lst.erase(std::remove(lst.begin(), lst.end(), f), lst.end());
            }
        }
        for (auto f : vf_[v]) {
            for (auto& w : faces_[f])
                if (w == v)
                    w = u;
            vf_[u].push_back(f);
        }
        std::sort(vf_[u].begin(), vf_[u].end());
        vf_[v].clear();
        vertex_alive_[v] = 0;
        --alive_vertices_;
        Q_[u] += Q_[v];

        auto ring = neighbors(u);
        ring.push_back(u);
        for (auto w : ring) {
            ++version_[w];
            push_best(w);
        }
    }

    const Mesh& mesh_;
    std::vector<Point3> pos_;
    std::vector<Face> faces_;
    std::vector<char> face_alive_;
    std::vector<std::vector<std::uint32_t>> vf_;
    std::vector<char> vertex_alive_;
    std::vector<std::uint32_t> version_;
    std::vector<Eigen::Matrix4d> Q_;
    std::size_t alive_faces_ = 0;
    std::size_t alive_vertices_ = 0;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap_;
};

} // namespace

AttackResult simplify_mesh(const Mesh& mesh, double face_fraction)
{
    if (!(face_fraction > 0.0 && face_fraction <= 1.0))
        throw InvalidArgument("simplify_mesh: face fraction must lie in (0, 1]");
    const std::size_t target =
        static_cast<std::size_t>(std::floor(face_fraction * static_cast<double>(mesh.face_count()) + 1e-9));
    Simplifier s(mesh);
    if (target < mesh.face_count())
        s.run(target);
    return s.finish(mesh.face_count());
}

AttackResult region_delete(const Mesh& mesh, std::uint32_t center, unsigned radius_hops)
{
    if (center >= mesh.vertex_count())
        throw InvalidArgument("region_delete: center " + std::to_string(center) + " out of range");
    const auto& nbrs = mesh.adjacency().vertex_neighbors;
    std::vector<int> hops(mesh.vertex_count(), -1);
    std::vector<std::uint32_t> frontier{center};
    hops[center] = 0;
    for (unsigned h = 1; h <= radius_hops && !frontier.empty(); ++h) {
        std::vector<std::uint32_t> next;
        for (auto v : frontier)
            for (auto w : nbrs[v])
                if (hops[w] < 0) {
                    hops[w] = static_cast<int>(h);
                    next.push_back(w);
                }
        frontier = std::move(next);
    }
    std::vector<char> keep(mesh.vertex_count());
    std::size_t kept = 0;
    for (std::size_t v = 0; v < keep.size(); ++v) {
        keep[v] = hops[v] < 0;
        kept += keep[v];
    }
    if (kept == 0)
        throw CapabilityError("region_delete: region covers the whole mesh");
    std::vector<Face> faces;
    for (const auto& f : mesh.faces())
        if (keep[f[0]] && keep[f[1]] && keep[f[2]])
            faces.push_back(f);
    AttackResult r;
    r.mesh = compact(mesh, keep, faces, r.survival);
    r.survival.achieved_face_fraction =
        mesh.face_count() ? static_cast<double>(faces.size()) / static_cast<double>(mesh.face_count()) : 1.0;
    return r;
}

DeletionPattern deletion_pattern(std::span<const std::uint32_t> selection, const SurvivalMap& map)
{
    DeletionPattern d;
    d.survived.reserve(selection.size());
    std::size_t deleted = 0, run = 0;
    for (auto v : selection) {
        if (v >= map.original_count())
            throw InvalidArgument("deletion_pattern: vertex " + std::to_string(v) + " not in the original mesh");
        const bool ok = map.survived(v);
        d.survived.push_back(ok ? 1 : 0);
        if (ok) {
            run = 0;
        } else {
            ++deleted;
            d.max_consecutive = std::max(d.max_consecutive, ++run);
        }
    }
    d.p_hat = selection.empty() ? 0.0 : static_cast<double>(deleted) / static_cast<double>(selection.size());
    return d;
}

std::vector<std::uint32_t> remap_selection(std::span<const std::uint32_t> selection, const SurvivalMap& map)
{
    std::vector<std::uint32_t> out;
    out.reserve(selection.size());
    for (auto v : selection) {
        if (v >= map.original_count())
            throw InvalidArgument("remap_selection: vertex " + std::to_string(v) + " not in the original mesh");
        const auto n = map.new_index[v];
        out.push_back(n == kDeleted ? kMissingVertex : static_cast<std::uint32_t>(n));
    }
    return out;
}

} // namespace meshwm
