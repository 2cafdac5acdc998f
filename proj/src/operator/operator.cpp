#include <cmath>
#include <string>

#include "schro/errors.hpp"
#include "schro/kernels.hpp"
#include "schro/operator.hpp"

namespace schro {

Potential::Potential(Eigen::VectorXd values, double cap) : values_(std::move(values)), cap_(cap) {
    if (!(cap_ > 0.0) || !std::isfinite(cap_)) throw InputError("potential cap must be positive and finite");
    for (Eigen::Index v = 0; v < values_.size(); ++v) {
        if (!std::isfinite(values_[v]) || std::abs(values_[v]) > cap_) {
            throw InputError("potential value at vertex " + std::to_string(v) + " violates |V| <= cap");
        }
    }
}

Potential Potential::constant(int vertex_count, double value, double cap) {
    return Potential(Eigen::VectorXd::Constant(vertex_count, value), cap);
}

Potential Potential::with_auto_cap(Eigen::VectorXd values) {
    const double peak = values.size() > 0 ? values.cwiseAbs().maxCoeff() : 0.0;
    const double cap = peak > 0.0 ? peak : 1.0;
    return Potential(std::move(values), cap);
}

double integrate(const Eigen::VectorXd& f, const ManifoldMesh& mesh) {
    if (f.size() != mesh.vertex_count()) throw InputError("integrate: size mismatch");
    return kernels::weighted_sum({f.data(), static_cast<std::size_t>(f.size())},
                                 {mesh.weights().data(), static_cast<std::size_t>(f.size())});
}

namespace {

Stiffness torus_stiffness(const ManifoldMesh& mesh) {
    const int n = mesh.vertex_count();
    const int dim = mesh.dim();
    const double cell = mesh.weights()[0];
    std::vector<int> stride(dim, 1);
    for (int a = dim - 2; a >= 0; --a) stride[a] = stride[a + 1] * mesh.grid()[a + 1];

    std::vector<Eigen::Triplet<double, int>> entries;
    entries.reserve(static_cast<std::size_t>(n) * (2 * dim + 1) * 2);
    for (int v = 0; v < n; ++v) {
        for (int a = 0; a < dim; ++a) {
            const int m = mesh.grid()[a];
            const double h = mesh.lengths()[a] / m;
            const double c = cell / (h * h);
            const int i = (v / stride[a]) % m;
            const int up = v + (((i + 1) % m) - i) * stride[a];
            const int down = v + (((i + m - 1) % m) - i) * stride[a];
            entries.emplace_back(v, v, 2.0 * c);
            entries.emplace_back(v, up, -c);
            entries.emplace_back(v, down, -c);
        }
    }
    Stiffness s;
    s.matrix.resize(n, n);
    s.matrix.setFromTriplets(entries.begin(), entries.end());
    s.matrix.makeCompressed();
    return s;
}

Stiffness surface_stiffness(const ManifoldMesh& mesh) {
    const int n = mesh.vertex_count();
    const auto edges = cotangent_weights(mesh);
    std::vector<Eigen::Triplet<double, int>> entries;
    entries.reserve(edges.size() * 4);
    Stiffness s;
    for (const auto& e : edges) {
        if (e.weight < 0.0) ++s.negative_weights;
        entries.emplace_back(e.a, e.b, -e.weight);
        entries.emplace_back(e.b, e.a, -e.weight);
        entries.emplace_back(e.a, e.a, e.weight);
        entries.emplace_back(e.b, e.b, e.weight);
    }
    s.matrix.resize(n, n);
    s.matrix.setFromTriplets(entries.begin(), entries.end());
    s.matrix.makeCompressed();
    return s;
}

}  // namespace

Stiffness stiffness_matrix(const ManifoldMesh& mesh) {
    return mesh.kind() == MeshKind::FlatTorus ? torus_stiffness(mesh) : surface_stiffness(mesh);
}

SchrodingerSystem assemble(const Stiffness& stiffness, const ManifoldMesh& mesh, const Eigen::VectorXd& V) {
    const int n = mesh.vertex_count();
    if (V.size() != n || stiffness.matrix.rows() != n) {
        throw InputError("assemble: potential has " + std::to_string(V.size()) + " values for " +
                         std::to_string(n) + " vertices");
    }
    SchrodingerSystem sys;
    sys.stiffness = stiffness.matrix;
    sys.weight = mesh.weights();
    sys.potential = V;
    sys.negative_weights = stiffness.negative_weights;

    SparseMatrix diag(n, n);
    diag.reserve(Eigen::VectorXi::Ones(n));
    for (int v = 0; v < n; ++v) diag.insert(v, v) = sys.weight[v] * V[v];
    sys.matrix = stiffness.matrix - diag;
    sys.matrix.makeCompressed();

    double scale = 0.0;
    for (int r = 0; r < n; ++r) {
        double row = 0.0;
        for (SparseMatrix::InnerIterator it(stiffness.matrix, r); it; ++it) row += std::abs(it.value());
        scale = std::max(scale, row / sys.weight[r]);
    }
    sys.spectral_scale = scale > 0.0 ? scale : 1.0;
    return sys;
}

SchrodingerSystem assemble(const ManifoldMesh& mesh, const Potential& V) {
    if (V.size() != mesh.vertex_count()) {
        throw InputError("assemble: potential has " + std::to_string(V.size()) + " values for " +
                         std::to_string(mesh.vertex_count()) + " vertices");
    }
    return assemble(stiffness_matrix(mesh), mesh, V.values());
}

void multiply(const SparseMatrix& A, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y.resize(A.rows());
    kernels::active().csr_matvec(A.outerIndexPtr(), A.innerIndexPtr(), A.valuePtr(),
                                 static_cast<std::size_t>(A.rows()), x.data(), y.data());
}

double rayleigh_quotient(const SchrodingerSystem& system, const Eigen::VectorXd& u) {
    Eigen::VectorXd Au;
    multiply(system.matrix, u, Au);
    const std::size_t n = static_cast<std::size_t>(u.size());
    const double num = kernels::dot({u.data(), n}, {Au.data(), n});
    const double den = kernels::weighted_dot({u.data(), n}, {u.data(), n}, {system.weight.data(), n});
    return num / den;
}

}  // namespace schro
