#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace meshwm {

using Point3 = Eigen::Vector3d;
using Face = std::array<std::uint32_t, 3>;

/// Per-vertex incidence derived from the face list. Neighbor and face lists
/// are sorted ascending so a rebuild is bit-identical.
struct Adjacency {
    std::vector<std::vector<std::uint32_t>> vertex_faces;
    std::vector<std::vector<std::uint32_t>> vertex_neighbors;

    static Adjacency build(std::size_t vertex_count, std::span<const Face> faces);
    bool operator==(const Adjacency&) const = default;
};

/// Triangle mesh. Topology (faces + adjacency) is immutable and shared between
/// meshes that differ only in vertex positions.
class Mesh {
public:
    Mesh() = default;
    /// Validates that every index is in range and no face repeats a vertex.
    Mesh(std::vector<Point3> vertices, std::vector<Face> faces);

    std::size_t vertex_count() const noexcept { return vertices_.size(); }
    std::size_t face_count() const noexcept { return topology_ ? topology_->faces.size() : 0; }

    const std::vector<Point3>& vertices() const noexcept { return vertices_; }
    const Point3& vertex(std::size_t v) const { return vertices_[v]; }
    std::span<const Face> faces() const noexcept;
    const Adjacency& adjacency() const;

    /// Same topology, new positions (size must match).
    Mesh with_vertices(std::vector<Point3> vertices) const;

private:
    struct Topology {
        std::vector<Face> faces;
        Adjacency adjacency;
    };

    std::vector<Point3> vertices_;
    std::shared_ptr<const Topology> topology_;
};

Mesh parse_obj(std::string_view text);
std::string write_obj(const Mesh& mesh);
Mesh read_obj_file(const std::string& path);
void write_obj_file(const Mesh& mesh, const std::string& path);

/// Unweighted vertex mean.
Point3 center_of_mass(const Mesh& mesh);

/// Area-weighted centroid of the triangulated surface.
Point3 surface_centroid(const Mesh& mesh);

enum class CentroidMode {
    VertexMean, ///< arithmetic mean of the vertices
    Surface,    ///< area-weighted surface integrals; stable under decimation
};

struct NormalizationFrame {
    Point3 origin = Point3::Zero();
    /// Rows are the new x, y, z axes; z is the principal component.
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    double scale_ref = 1.0;
    /// Set when covariance eigenvalues coincide and the axes are not unique.
    bool degenerate = false;

    Point3 apply(const Point3& p) const { return rotation * (p - origin); }
    Point3 invert(const Point3& q) const { return rotation.transpose() * q + origin; }
};

/// Origin, PCA rotation and reference radius of the mesh. VertexMean uses the
/// mean vertex distance. Surface uses area-weighted integrals over the faces,
/// with the RMS radius as scale.
NormalizationFrame compute_frame(const Mesh& mesh, CentroidMode mode = CentroidMode::VertexMean);

/// Origin and scale_ref only, as in compute_frame; rotation is the identity.
NormalizationFrame compute_frame_center(const Mesh& mesh, CentroidMode mode = CentroidMode::VertexMean);

struct AlignedMesh {
    Mesh mesh;
    NormalizationFrame frame;
};

/// Centers on the vertex mean and rotates the principal axis onto +z.
AlignedMesh pca_align(const Mesh& mesh);

struct SphericalCoord {
    double r = 0.0;     ///< radial distance in units of scale_ref
    double theta = 0.0; ///< inclination from +z, [0, pi]
    double phi = 0.0;   ///< azimuth, [-pi, pi)
    bool at_origin = false;
};

SphericalCoord to_spherical(const Point3& p, const NormalizationFrame& frame);
Point3 from_spherical(const SphericalCoord& s, const NormalizationFrame& frame);

/// Symmetric Hausdorff distance between two point sets (Euclidean metric).
double hausdorff(std::span<const Point3> a, std::span<const Point3> b);

} // namespace meshwm
