#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "schro/geometry.hpp"

namespace schro {

// Row-major so the CSR kernels run on it directly; all matrices here are symmetric.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Per-vertex bounded potential V with its L-infinity cap N: |V_v| <= cap everywhere.
class Potential {
public:
    Potential(Eigen::VectorXd values, double cap);

    static Potential constant(int vertex_count, double value, double cap);
    static Potential zero(int vertex_count, double cap = 1.0) { return constant(vertex_count, 0.0, cap); }
    /// Cap set to max|V| (or 1 when V vanishes).
    static Potential with_auto_cap(Eigen::VectorXd values);

    const Eigen::VectorXd& values() const { return values_; }
    double cap() const { return cap_; }
    int size() const { return static_cast<int>(values_.size()); }
    double operator[](int v) const { return values_[v]; }

private:
    Eigen::VectorXd values_;
    double cap_;
};

/// sum_v V_v w_v, the discrete integral against the vertex measure.
double integrate(const Eigen::VectorXd& f, const ManifoldMesh& mesh);

struct Stiffness {
    SparseMatrix matrix;
    /// Edges with a negative cotangent weight (obtuse opposite angles). Kept, not clamped.
    int negative_weights = 0;
};

/// Discrete Dirichlet energy in weak form: x^T S x approximates the integral of |grad u|^2.
/// Flat torus: periodic (2n+1)-point stencil times the cell measure. Surface: cotangent Laplacian.
Stiffness stiffness_matrix(const ManifoldMesh& mesh);

/// The pair (A, W) with A = S - W diag(V); eigenvalues of A u = lambda W u are lambda_k(V).
struct SchrodingerSystem {
    SparseMatrix stiffness;
    Eigen::VectorXd weight;
    Eigen::VectorXd potential;
    SparseMatrix matrix;  // A
    int negative_weights = 0;
    /// Gershgorin bound on the spectrum of W^{-1} S; tolerances are relative to it.
    double spectral_scale = 1.0;

    int size() const { return static_cast<int>(weight.size()); }
};

SchrodingerSystem assemble(const ManifoldMesh& mesh, const Potential& V);
/// Reuses a precomputed stiffness matrix; the optimizer reassembles many potentials on one mesh.
SchrodingerSystem assemble(const Stiffness& stiffness, const ManifoldMesh& mesh, const Eigen::VectorXd& V);

/// y = A x through the dispatched CSR kernel.
void multiply(const SparseMatrix& A, const Eigen::VectorXd& x, Eigen::VectorXd& y);

/// (u^T A u) / (u^T W u)
double rayleigh_quotient(const SchrodingerSystem& system, const Eigen::VectorXd& u);

}  // namespace schro
