#pragma once

#include <vector>

#include <Eigen/Core>

#include "schro/geometry.hpp"
#include "schro/spectrum.hpp"

namespace schro {

/// A run of (numerically) equal eigenvalues occupying 0-based positions
/// base_index .. base_index + multiplicity - 1, i.e. lambda_{k+1} .. lambda_{k+m} with k = base_index.
struct Cluster {
    int base_index = 0;
    int multiplicity = 1;

    bool operator==(const Cluster&) const = default;
};

/// First-order splitting of a degenerate eigenvalue under V(t) = V + t g.
struct ClusterShift {
    int base_index = 0;
    int multiplicity = 1;
    double lambda0 = 0.0;
    Eigen::MatrixXd q_matrix;  // Q_ij = sum_v g_v u_i(v) u_j(v) w_v
    Eigen::VectorXd alphas;    // eigenvalues of Q, ascending
};

/// Maximal runs whose span (last - first) is within cluster_tol; singletons included.
std::vector<Cluster> detect_clusters(const Eigen::VectorXd& eigenvalues, double cluster_tol);
std::vector<Cluster> detect_clusters(const SpectralResult& spec, double cluster_tol);

/// 1e-6 of the spectral diameter of the computed eigenvalues.
double default_cluster_tol(const SpectralResult& spec);

/// The cluster containing 0-based position `index`.
Cluster cluster_containing(const std::vector<Cluster>& clusters, int index);

/// sum_v g_v w_v u_v u_v^T over the rows of a W-orthonormal basis (n x m).
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& basis, const Eigen::VectorXd& direction,
                              const Eigen::VectorXd& weights);

/// Throws InputError if the cluster's eigenvectors are not W-orthonormal to 1e-8.
ClusterShift q_matrix(const SpectralResult& spec, const Cluster& cluster, const Eigen::VectorXd& direction,
                      const ManifoldMesh& mesh);

/// First-order prediction of the i-th (1-based, ascending) eigenvalue of the cluster at V + t g.
/// For t > 0 the i-th branch is lambda0 - t alpha_{m+1-i}; for t < 0 it is lambda0 - t alpha_i,
/// so predictions stay sorted on both sides.
double predict_lambda(const ClusterShift& shift, int i, double t);

}  // namespace schro
