#include <cmath>
#include <map>
#include <string>

#include <Eigen/Geometry>

#include "schro/errors.hpp"
#include "schro/geometry.hpp"

namespace schro {

ManifoldMesh build_flat_torus(const std::vector<std::pair<int, double>>& dims) {
    if (dims.size() < 2 || dims.size() > 3) {
        throw InputError("flat torus: dimension must be 2 or 3, got " + std::to_string(dims.size()));
    }
    ManifoldMesh mesh;
    mesh.kind_ = MeshKind::FlatTorus;
    mesh.dim_ = static_cast<int>(dims.size());
    double cell = 1.0;
    double volume = 1.0;
    long long count = 1;
    for (const auto& [m, length] : dims) {
        if (m < 4) throw InputError("flat torus: grid size " + std::to_string(m) + " is below 4");
        if (!(length > 0.0) || !std::isfinite(length)) throw InputError("flat torus: side length must be positive");
        mesh.grid_.push_back(m);
        mesh.lengths_.push_back(length);
        cell *= length / m;
        volume *= length;
        count *= m;
    }
    mesh.weights_ = Eigen::VectorXd::Constant(count, cell);
    mesh.volume_ = volume;
    return mesh;
}

double ManifoldMesh::coordinate(int vertex, int axis) const {
    int stride = 1;
    for (int a = dim_ - 1; a > axis; --a) stride *= grid_[a];
    const int index = (vertex / stride) % grid_[axis];
    return index * (lengths_[axis] / grid_[axis]);
}

ManifoldMesh make_surface(std::vector<Eigen::Vector3d> positions, std::vector<Triangle> triangles) {
    const int n = static_cast<int>(positions.size());
    if (n < 4) throw InputError("surface: need at least 4 vertices");
    if (triangles.empty()) throw InputError("surface: no triangles");

    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& t : triangles) {
        for (int c = 0; c < 3; ++c) {
            const int a = t[c];
            const int b = t[(c + 1) % 3];
            if (a < 0 || a >= n || b < 0 || b >= n) throw InputError("surface: vertex index out of range");
            if (a == b) throw InputError("surface: degenerate triangle");
            ++edge_use[{std::min(a, b), std::max(a, b)}];
        }
    }
    for (const auto& [edge, uses] : edge_use) {
        if (uses == 1) {
            throw InputError("surface has boundary edge (" + std::to_string(edge.first) + ", " +
                             std::to_string(edge.second) + "); closed manifolds only");
        }
        if (uses > 2) throw InputError("surface: non-manifold edge");
    }

    Eigen::VectorXd weights = Eigen::VectorXd::Zero(n);
    double total = 0.0;
    for (const auto& t : triangles) {
        const Eigen::Vector3d& p0 = positions[t[0]];
        const double area = 0.5 * (positions[t[1]] - p0).cross(positions[t[2]] - p0).norm();
        for (int c = 0; c < 3; ++c) weights[t[c]] += area / 3.0;
        total += area;
    }
    for (int v = 0; v < n; ++v) {
        if (!(weights[v] > 0.0)) throw InputError("surface: vertex " + std::to_string(v) + " has zero measure");
    }

    ManifoldMesh mesh;
    mesh.kind_ = MeshKind::TriangleSurface;
    mesh.dim_ = 2;
    mesh.positions_ = std::move(positions);
    mesh.triangles_ = std::move(triangles);
    mesh.weights_ = std::move(weights);
    mesh.volume_ = total;
    return mesh;
}

int euler_characteristic(const ManifoldMesh& mesh) {
    if (mesh.kind() != MeshKind::TriangleSurface) throw InputError("euler characteristic needs a triangle surface");
    // Closed surface: each edge is shared by two triangles.
    const auto f = static_cast<long long>(mesh.triangles().size());
    const long long e = 3 * f / 2;
    return static_cast<int>(mesh.vertex_count() - e + f);
}

std::vector<Eigen::Vector3d> vertex_normals(const ManifoldMesh& mesh) {
    if (mesh.kind() != MeshKind::TriangleSurface) throw InputError("normals need a triangle surface");
    const auto& p = mesh.positions();
    std::vector<Eigen::Vector3d> normals(p.size(), Eigen::Vector3d::Zero());
    for (const auto& t : mesh.triangles()) {
        // Cross product length is twice the area: area weighting for free.
        const Eigen::Vector3d n = (p[t[1]] - p[t[0]]).cross(p[t[2]] - p[t[0]]);
        for (int c = 0; c < 3; ++c) normals[t[c]] += n;
    }
    for (auto& n : normals) n.normalize();
    return normals;
}

}  // namespace schro
