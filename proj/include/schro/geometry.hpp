#pragma once

#include <array>
#include <filesystem>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace schro {

enum class MeshKind { FlatTorus, TriangleSurface };

using Triangle = std::array<int, 3>;

/// Discrete closed manifold (M, g, mu): connectivity plus lumped per-vertex
/// measure weights. Immutable once built; use the factory functions below.
class ManifoldMesh {
public:
    MeshKind kind() const { return kind_; }
    int dim() const { return dim_; }
    int vertex_count() const { return static_cast<int>(weights_.size()); }
    const Eigen::VectorXd& weights() const { return weights_; }
    /// mu(M), the sum of the vertex weights.
    double volume() const { return volume_; }

    // FlatTorus only.
    const std::vector<int>& grid() const { return grid_; }
    const std::vector<double>& lengths() const { return lengths_; }
    /// Grid coordinate of a vertex along one axis, in [0, L_axis).
    double coordinate(int vertex, int axis) const;

    // TriangleSurface only.
    const std::vector<Eigen::Vector3d>& positions() const { return positions_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }

    friend ManifoldMesh build_flat_torus(const std::vector<std::pair<int, double>>& dims);
    friend ManifoldMesh make_surface(std::vector<Eigen::Vector3d> positions, std::vector<Triangle> triangles);

private:
    ManifoldMesh() = default;

    MeshKind kind_ = MeshKind::FlatTorus;
    int dim_ = 2;
    std::vector<int> grid_;
    std::vector<double> lengths_;
    std::vector<Eigen::Vector3d> positions_;
    std::vector<Triangle> triangles_;
    Eigen::VectorXd weights_;
    double volume_ = 0.0;
};

struct CurvatureField {
    Eigen::VectorXd gauss;  // K_v, angle defect over vertex weight
    Eigen::VectorXd mean;   // H_v, positive on a sphere with outward normals
};

/// Uniform periodic tensor grid; dims are (grid size m_i >= 4, side length L_i > 0), 2 or 3 axes.
ManifoldMesh build_flat_torus(const std::vector<std::pair<int, double>>& dims);

/// Validated closed triangle surface: every undirected edge has exactly two incident triangles.
/// Weights are one third of the incident triangle areas.
ManifoldMesh make_surface(std::vector<Eigen::Vector3d> positions, std::vector<Triangle> triangles);

/// Icosahedron refined `subdivisions` times by midpoint splitting and projected to the sphere.
ManifoldMesh build_icosphere(int subdivisions, double radius);

/// Reads the triangle-only OFF subset and validates it as a closed surface.
ManifoldMesh load_mesh(const std::filesystem::path& path);
void save_mesh(const ManifoldMesh& mesh, const std::filesystem::path& path);

/// Symmetric edge weight 0.5 * (cot alpha + cot beta) from the two opposite angles.
struct EdgeWeight {
    int a;
    int b;
    double weight;
};

/// One entry per undirected edge, a < b, sorted. Weights may be negative on obtuse meshes.
std::vector<EdgeWeight> cotangent_weights(const ManifoldMesh& mesh);

CurvatureField curvature(const ManifoldMesh& mesh);

/// V - E + F; surfaces only.
int euler_characteristic(const ManifoldMesh& mesh);

/// Area-weighted, outward (for consistently oriented input) unit vertex normals.
std::vector<Eigen::Vector3d> vertex_normals(const ManifoldMesh& mesh);

}  // namespace schro
