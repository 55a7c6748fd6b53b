#include "meshwm/mesh.hpp"

#include "meshwm/error.hpp"
#include "meshwm/io.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace meshwm {

Adjacency Adjacency::build(std::size_t vertex_count, std::span<const Face> faces)
{
    Adjacency adj;
    adj.vertex_faces.assign(vertex_count, {});
    adj.vertex_neighbors.assign(vertex_count, {});
    for (std::uint32_t f = 0; f < faces.size(); ++f) {
        const Face& tri = faces[f];
        for (int c = 0; c < 3; ++c) {
            adj.vertex_faces[tri[c]].push_back(f);
            adj.vertex_neighbors[tri[c]].push_back(tri[(c + 1) % 3]);
            adj.vertex_neighbors[tri[c]].push_back(tri[(c + 2) % 3]);
        }
    }
    for (auto& n : adj.vertex_neighbors) {
        std::sort(n.begin(), n.end());
        n.erase(std::unique(n.begin(), n.end()), n.end());
    }
    return adj;
}

Mesh::Mesh(std::vector<Point3> vertices, std::vector<Face> faces) : vertices_(std::move(vertices))
{
    const auto n = vertices_.size();
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const Face& t = faces[f];
        for (auto idx : t) {
            if (idx >= n)
                throw InvalidArgument("face " + std::to_string(f) + " references vertex " + std::to_string(idx) +
                                      " but mesh has " + std::to_string(n) + " vertices");
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw InvalidArgument("face " + std::to_string(f) + " is degenerate (repeated vertex)");
    }
    auto topo = std::make_shared<Topology>();
    topo->adjacency = Adjacency::build(n, faces);
    topo->faces = std::move(faces);
    topology_ = std::move(topo);
}

std::span<const Face> Mesh::faces() const noexcept
{
    if (!topology_)
        return {};
    return topology_->faces;
}

const Adjacency& Mesh::adjacency() const
{
    static const Adjacency empty;
    return topology_ ? topology_->adjacency : empty;
}

Mesh Mesh::with_vertices(std::vector<Point3> vertices) const
{
    if (vertices.size() != vertices_.size())
        throw InvalidArgument("with_vertices: vertex count mismatch");
    Mesh m;
    m.vertices_ = std::move(vertices);
    m.topology_ = topology_;
    return m;
}

// ---------------------------------------------------------------------------
// OBJ

namespace {

std::string_view next_token(std::string_view& line)
{
    std::size_t b = 0;
    while (b < line.size() && (line[b] == ' ' || line[b] == '\t' || line[b] == '\r'))
        ++b;
    std::size_t e = b;
    while (e < line.size() && line[e] != ' ' && line[e] != '\t' && line[e] != '\r')
        ++e;
    auto tok = line.substr(b, e - b);
    line.remove_prefix(e);
    return tok;
}

double parse_double(std::string_view tok, std::size_t line_no)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
        throw ParseError("line " + std::to_string(line_no) + ": bad number '" + std::string(tok) + "'");
    return v;
}

} // namespace

Mesh parse_obj(std::string_view text)
{
    std::vector<Point3> verts;
    std::vector<Face> faces;
    std::size_t line_no = 0;

    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        auto kw = next_token(line);
        if (kw.empty())
            continue;

        if (kw == "v") {
            Point3 p;
            for (int i = 0; i < 3; ++i) {
                auto tok = next_token(line);
                if (tok.empty())
                    throw ParseError("line " + std::to_string(line_no) + ": vertex needs 3 coordinates");
                p[i] = parse_double(tok, line_no);
            }
            verts.push_back(p);
        } else if (kw == "f") {
            std::vector<std::uint32_t> poly;
            for (auto tok = next_token(line); !tok.empty(); tok = next_token(line)) {
                auto idx_part = tok.substr(0, tok.find('/'));
                long long idx = 0;
                auto [ptr, ec] = std::from_chars(idx_part.data(), idx_part.data() + idx_part.size(), idx);
                if (ec != std::errc() || ptr != idx_part.data() + idx_part.size() || idx == 0)
                    throw ParseError("line " + std::to_string(line_no) + ": bad face index '" + std::string(tok) + "'");
                // negative indices are relative to the vertices read so far
                const long long resolved = idx > 0 ? idx - 1 : static_cast<long long>(verts.size()) + idx;
                if (resolved < 0 || resolved >= static_cast<long long>(verts.size()))
                    throw ParseError("line " + std::to_string(line_no) + ": face index " + std::to_string(idx) +
                                     " out of range (" + std::to_string(verts.size()) + " vertices)");
                poly.push_back(static_cast<std::uint32_t>(resolved));
            }
            if (poly.size() < 3)
                throw ParseError("line " + std::to_string(line_no) + ": face needs at least 3 vertices");
            for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
                Face t{poly[0], poly[i], poly[i + 1]};
                if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
                    throw ParseError("line " + std::to_string(line_no) + ": degenerate face");
                faces.push_back(t);
            }
        }
        // vt, vn, g, o, s, usemtl, mtllib and friends carry nothing we need
    }
    return Mesh(std::move(verts), std::move(faces));
}

std::string write_obj(const Mesh& mesh)
{
    std::string out;
    out.reserve(mesh.vertex_count() * 64 + mesh.face_count() * 24);
    char buf[64];
    auto append_num = [&](double v) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general,
                                       std::numeric_limits<double>::max_digits10);
        out.append(buf, ptr);
    };
    for (const auto& p : mesh.vertices()) {
        out += "v ";
        append_num(p.x());
        out += ' ';
        append_num(p.y());
        out += ' ';
        append_num(p.z());
        out += '\n';
    }
    for (const auto& f : mesh.faces()) {
        out += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' + std::to_string(f[2] + 1) + '\n';
    }
    return out;
}

Mesh read_obj_file(const std::string& path) { return parse_obj(read_text_file(path)); }

void write_obj_file(const Mesh& mesh, const std::string& path) { write_text_file(path, write_obj(mesh)); }

// ---------------------------------------------------------------------------
// Normalization

Point3 center_of_mass(const Mesh& mesh)
{
    if (mesh.vertex_count() == 0)
        throw InvalidArgument("center_of_mass: empty mesh");
    Point3 sum = Point3::Zero();
    for (const auto& p : mesh.vertices())
        sum += p;
    return sum / static_cast<double>(mesh.vertex_count());
}

namespace {

double triangle_area(const Point3& a, const Point3& b, const Point3& c)
{
    return 0.5 * (b - a).cross(c - a).norm();
}

// Second moment of a triangle about `o`, integrated exactly (linear interpolation).
Eigen::Matrix3d triangle_second_moment(const Point3& a, const Point3& b, const Point3& c, const Point3& o, double area)
{
    const Point3 da = a - o, db = b - o, dc = c - o;
    const Point3 s = da + db + dc;
    Eigen::Matrix3d m = da * da.transpose() + db * db.transpose() + dc * dc.transpose() + s * s.transpose();
    return m * (area / 12.0);
}

} // namespace

Point3 surface_centroid(const Mesh& mesh)
{
    Point3 acc = Point3::Zero();
    double area = 0.0;
    for (const auto& f : mesh.faces()) {
        const auto& a = mesh.vertex(f[0]);
        const auto& b = mesh.vertex(f[1]);
        const auto& c = mesh.vertex(f[2]);
        const double w = triangle_area(a, b, c);
        acc += w * (a + b + c) / 3.0;
        area += w;
    }
    if (!(area > 0.0))
        throw InvalidArgument("surface_centroid: mesh has no surface area");
    return acc / area;
}

NormalizationFrame compute_frame_center(const Mesh& mesh, CentroidMode mode)
{
    if (mesh.vertex_count() == 0)
        throw InvalidArgument("compute_frame: empty mesh");

    NormalizationFrame frame;
    if (mode == CentroidMode::VertexMean) {
        frame.origin = center_of_mass(mesh);
        double radial = 0.0;
        for (const auto& p : mesh.vertices())
            radial += (p - frame.origin).norm();
        frame.scale_ref = radial / static_cast<double>(mesh.vertex_count());
    } else {
        frame.origin = surface_centroid(mesh);
        // RMS radius: |p - o|^2 integrates exactly over each face, so
        // decimating a flat region leaves it unchanged (a mean of |p - o|
        // does not, near the origin).
        double area = 0.0, second = 0.0;
        for (const auto& f : mesh.faces()) {
            const auto& a = mesh.vertex(f[0]);
            const auto& b = mesh.vertex(f[1]);
            const auto& c = mesh.vertex(f[2]);
            const double w = triangle_area(a, b, c);
            second += triangle_second_moment(a, b, c, frame.origin, w).trace();
            area += w;
        }
        frame.scale_ref = std::sqrt(second / area);
    }
    if (!(frame.scale_ref > 0.0))
        throw InvalidArgument("compute_frame: all vertices coincide with the origin");
    return frame;
}

NormalizationFrame compute_frame(const Mesh& mesh, CentroidMode mode)
{
    NormalizationFrame frame = compute_frame_center(mesh, mode);
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    if (mode == CentroidMode::VertexMean) {
        for (const auto& p : mesh.vertices()) {
            const Point3 d = p - frame.origin;
            cov += d * d.transpose();
        }
        cov /= static_cast<double>(mesh.vertex_count());
    } else {
        double area = 0.0;
        for (const auto& f : mesh.faces()) {
            const auto& a = mesh.vertex(f[0]);
            const auto& b = mesh.vertex(f[1]);
            const auto& c = mesh.vertex(f[2]);
            const double w = triangle_area(a, b, c);
            cov += triangle_second_moment(a, b, c, frame.origin, w);
            area += w;
        }
        cov /= area;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    // ascending eigenvalues: column 2 is the principal axis
    const Eigen::Vector3d lambda = eig.eigenvalues();
    Eigen::Matrix3d vecs = eig.eigenvectors();

    const double tol = 1e-8 * std::max(std::abs(lambda[2]), std::numeric_limits<double>::min());
    frame.degenerate = (lambda[2] - lambda[1]) < tol || (lambda[1] - lambda[0]) < tol;

    auto orient = [&](Eigen::Vector3d axis) {
        // vertex with the largest |projection| must project positively
        double best = -1.0, sign = 1.0;
        for (const auto& p : mesh.vertices()) {
            const double proj = axis.dot(p - frame.origin);
            if (std::abs(proj) > best + 1e-12 * frame.scale_ref) {
                best = std::abs(proj);
                sign = proj < 0 ? -1.0 : 1.0;
            }
        }
        if (best <= 1e-12 * frame.scale_ref) {
            // all projections vanish: fall back to lexicographic orientation
            for (int i = 0; i < 3; ++i) {
                if (std::abs(axis[i]) > 1e-12) {
                    sign = axis[i] < 0 ? -1.0 : 1.0;
                    break;
                }
            }
        }
        return Eigen::Vector3d(axis * sign);
    };

    const Eigen::Vector3d ez = orient(vecs.col(2));
    const Eigen::Vector3d ex = orient(vecs.col(1));
    const Eigen::Vector3d ey = ez.cross(ex);
    frame.rotation.row(0) = ex.transpose();
    frame.rotation.row(1) = ey.transpose();
    frame.rotation.row(2) = ez.transpose();
    return frame;
}

AlignedMesh pca_align(const Mesh& mesh)
{
    if (mesh.vertex_count() < 3)
        throw InvalidArgument("pca_align: need at least 3 vertices");
    NormalizationFrame frame = compute_frame(mesh, CentroidMode::VertexMean);
    std::vector<Point3> out;
    out.reserve(mesh.vertex_count());
    for (const auto& p : mesh.vertices())
        out.push_back(frame.apply(p));
    return {mesh.with_vertices(std::move(out)), frame};
}

SphericalCoord to_spherical(const Point3& p, const NormalizationFrame& frame)
{
    const Point3 q = frame.apply(p);
    const double rho = q.norm();
    SphericalCoord s;
    s.r = rho / frame.scale_ref;
    if (rho == 0.0) {
        s.at_origin = true;
        return s;
    }
    s.theta = std::acos(std::clamp(q.z() / rho, -1.0, 1.0));
    s.phi = std::atan2(q.y(), q.x());
    if (s.phi >= std::numbers::pi)
        s.phi -= 2.0 * std::numbers::pi;
    return s;
}

Point3 from_spherical(const SphericalCoord& s, const NormalizationFrame& frame)
{
    const double rho = s.r * frame.scale_ref;
    const double st = std::sin(s.theta);
    const Point3 q(rho * st * std::cos(s.phi), rho * st * std::sin(s.phi), rho * std::cos(s.theta));
    return frame.invert(q);
}

// ---------------------------------------------------------------------------
// Hausdorff distance via a uniform grid over the target set.

namespace {

class PointGrid {
public:
    explicit PointGrid(std::span<const Point3> pts) : pts_(pts)
    {
        lo_ = hi_ = pts[0];
        for (const auto& p : pts) {
            lo_ = lo_.cwiseMin(p);
            hi_ = hi_.cwiseMax(p);
        }
        const Point3 ext = (hi_ - lo_).cwiseMax(1e-300);
        const double vol_per_pt = ext.prod() / static_cast<double>(pts.size());
        cell_ = std::max({std::cbrt(vol_per_pt) * 2.0, ext.maxCoeff() / 256.0, 1e-300});
        for (int i = 0; i < 3; ++i)
            dims_[i] = std::max<long>(1, static_cast<long>(ext[i] / cell_) + 1);
        for (std::uint32_t i = 0; i < pts.size(); ++i)
            cells_[key(cell_of(pts[i]))].push_back(i);
    }

    double nearest(const Point3& q) const
    {
        const auto c = cell_of(q);
        double best = std::numeric_limits<double>::infinity();
        long maxr = 1;
        for (int i = 0; i < 3; ++i)
            maxr = std::max(maxr, std::labs(c[i]) + dims_[i] + 1);
        for (long r = 0; r <= maxr; ++r) {
            // shell at Chebyshev radius r
            for (long dx = -r; dx <= r; ++dx)
                for (long dy = -r; dy <= r; ++dy)
                    for (long dz = -r; dz <= r; ++dz) {
                        if (std::max({std::labs(dx), std::labs(dy), std::labs(dz)}) != r)
                            continue;
                        auto it = cells_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
                        if (it == cells_.end())
                            continue;
                        for (auto i : it->second)
                            best = std::min(best, (pts_[i] - q).squaredNorm());
                    }
            // everything outside the shell is at least r * cell away (minus in-cell offset)
            const double guard = static_cast<double>(r) * cell_;
            if (best < std::numeric_limits<double>::infinity() && best <= guard * guard)
                break;
        }
        return std::sqrt(best);
    }

private:
    std::array<long, 3> cell_of(const Point3& p) const
    {
        return {static_cast<long>(std::floor((p.x() - lo_.x()) / cell_)),
                static_cast<long>(std::floor((p.y() - lo_.y()) / cell_)),
                static_cast<long>(std::floor((p.z() - lo_.z()) / cell_))};
    }
    static std::uint64_t key(const std::array<long, 3>& c)
    {
        auto u = [](long v) { return static_cast<std::uint64_t>(v + (1L << 20)) & 0x1fffffULL; };
        return (u(c[0]) << 42) | (u(c[1]) << 21) | u(c[2]);
    }

    std::span<const Point3> pts_;
    Point3 lo_, hi_;
    double cell_ = 1.0;
    std::array<long, 3> dims_{};
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

double directed(std::span<const Point3> from, const PointGrid& to)
{
    double worst = 0.0;
    for (const auto& p : from)
        worst = std::max(worst, to.nearest(p));
    return worst;
}

} // namespace

double hausdorff(std::span<const Point3> a, std::span<const Point3> b)
{
    if (a.empty() || b.empty())
        throw InvalidArgument("hausdorff: point sets must be non-empty");
    const PointGrid ga(a), gb(b);
    return std::max(directed(a, gb), directed(b, ga));
}

} // namespace meshwm
