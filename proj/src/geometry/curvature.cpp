#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "schro/errors.hpp"
#include "schro/geometry.hpp"

namespace schro {

namespace {

double cot_at(const Eigen::Vector3d& apex, const Eigen::Vector3d& x, const Eigen::Vector3d& y) {
    const Eigen::Vector3d u = x - apex;
    const Eigen::Vector3d v = y - apex;
    return u.dot(v) / u.cross(v).norm();
}

double angle_at(const Eigen::Vector3d& apex, const Eigen::Vector3d& x, const Eigen::Vector3d& y) {
    const Eigen::Vector3d u = x - apex;
    const Eigen::Vector3d v = y - apex;
    return std::atan2(u.cross(v).norm(), u.dot(v));
}

}  // namespace

std::vector<EdgeWeight> cotangent_weights(const ManifoldMesh& mesh) {
    if (mesh.kind() != MeshKind::TriangleSurface) throw InputError("cotangent weights need a triangle surface");
    const auto& p = mesh.positions();
    std::vector<EdgeWeight> half;
    half.reserve(mesh.triangles().size() * 3);
    for (const auto& t : mesh.triangles()) {
        for (int c = 0; c < 3; ++c) {
            const int apex = t[c];
            const int a = t[(c + 1) % 3];
            const int b = t[(c + 2) % 3];
            half.push_back({std::min(a, b), std::max(a, b), 0.5 * cot_at(p[apex], p[a], p[b])});
        }
    }
    std::sort(half.begin(), half.end(), [](const EdgeWeight& l, const EdgeWeight& r) {
        return l.a != r.a ? l.a < r.a : l.b < r.b;
    });
    std::vector<EdgeWeight> edges;
    edges.reserve(half.size() / 2);
    for (const auto& h : half) {
        if (!edges.empty() && edges.back().a == h.a && edges.back().b == h.b) {
            edges.back().weight += h.weight;
        } else {
            edges.push_back(h);
        }
    }
    return edges;
}

CurvatureField curvature(const ManifoldMesh& mesh) {
    if (mesh.kind() != MeshKind::TriangleSurface) {
        throw InputError("curvature needs an embedded triangle surface; a flat torus has K = 0 and no H");
    }
    const int n = mesh.vertex_count();
    const auto& p = mesh.positions();
    const auto& w = mesh.weights();

    Eigen::VectorXd defect = Eigen::VectorXd::Constant(n, 2.0 * std::numbers::pi);
    for (const auto& t : mesh.triangles()) {
        for (int c = 0; c < 3; ++c) defect[t[c]] -= angle_at(p[t[c]], p[t[(c + 1) % 3]], p[t[(c + 2) % 3]]);
    }

    // (S x)_v = sum_j w_vj (x_v - x_j) = 2 H_v n_v w_v
    std::vector<Eigen::Vector3d> laplace(n, Eigen::Vector3d::Zero());
    for (const auto& e : cotangent_weights(mesh)) {
        const Eigen::Vector3d d = e.weight * (p[e.a] - p[e.b]);
        laplace[e.a] += d;
        laplace[e.b] -= d;
    }
    const auto normals = vertex_normals(mesh);

    CurvatureField field;
    field.gauss.resize(n);
    field.mean.resize(n);
    for (int v = 0; v < n; ++v) {
        field.gauss[v] = defect[v] / w[v];
        field.mean[v] = laplace[v].dot(normals[v]) / (2.0 * w[v]);
    }
    return field;
}

}  // namespace schro
