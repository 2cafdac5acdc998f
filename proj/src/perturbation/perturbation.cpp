#include "schro/perturbation.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "schro/errors.hpp"
#include "schro/kernels.hpp"

namespace schro {

std::vector<Cluster> detect_clusters(const Eigen::VectorXd& eigenvalues, double cluster_tol) {
    std::vector<Cluster> out;
    const int n = static_cast<int>(eigenvalues.size());
    int start = 0;
    while (start < n) {
        int end = start + 1;
        while (end < n && eigenvalues[end] - eigenvalues[start] <= cluster_tol) ++end;
        out.push_back({start, end - start});
        start = end;
    }
    return out;
}

std::vector<Cluster> detect_clusters(const SpectralResult& spec, double cluster_tol) {
    return detect_clusters(spec.eigenvalues, cluster_tol);
}

double default_cluster_tol(const SpectralResult& spec) {
    if (spec.size() == 0) return 0.0;
    return 1e-6 * (spec.eigenvalues.maxCoeff() - spec.eigenvalues.minCoeff());
}

Cluster cluster_containing(const std::vector<Cluster>& clusters, int index) {
    for (const auto& c : clusters) {
        if (index >= c.base_index && index < c.base_index + c.multiplicity) return c;
    }
    throw InputError("no cluster contains eigenvalue position " + std::to_string(index));
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& basis, const Eigen::VectorXd& direction,
                              const Eigen::VectorXd& weights) {
    const auto n = static_cast<std::size_t>(basis.rows());
    const int m = static_cast<int>(basis.cols());
    const Eigen::VectorXd gw = direction.cwiseProduct(weights);
    std::span<const double> gws{gw.data(), n};
    Eigen::MatrixXd Q(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            Q(i, j) = kernels::weighted_dot({basis.col(i).data(), n}, {basis.col(j).data(), n}, gws);
            Q(j, i) = Q(i, j);
        }
    }
    return Q;
}

ClusterShift q_matrix(const SpectralResult& spec, const Cluster& cluster, const Eigen::VectorXd& direction,
                      const ManifoldMesh& mesh) {
    if (cluster.multiplicity < 1 || cluster.base_index < 0 || cluster.base_index + cluster.multiplicity > spec.size()) {
        throw InputError("q_matrix: cluster outside the computed spectrum");
    }
    if (direction.size() != mesh.vertex_count() || spec.eigenvectors.rows() != mesh.vertex_count()) {
        throw InputError("q_matrix: size mismatch");
    }
    const Eigen::MatrixXd basis = spec.eigenvectors.middleCols(cluster.base_index, cluster.multiplicity);
    const Eigen::MatrixXd gram = weighted_gram(basis, Eigen::VectorXd::Ones(mesh.vertex_count()), mesh.weights());
    const double err = (gram - Eigen::MatrixXd::Identity(cluster.multiplicity, cluster.multiplicity)).cwiseAbs().maxCoeff();
    if (err > 1e-8) throw InputError("q_matrix: cluster basis is not W-orthonormal (error " + std::to_string(err) + ")");

    ClusterShift out;
    out.base_index = cluster.base_index;
    out.multiplicity = cluster.multiplicity;
    out.lambda0 = spec.eigenvalues.segment(cluster.base_index, cluster.multiplicity).mean();
    out.q_matrix = weighted_gram(basis, direction, mesh.weights());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(out.q_matrix, Eigen::EigenvaluesOnly);
    out.alphas = solver.eigenvalues();
    return out;
}

double predict_lambda(const ClusterShift& shift, int i, double t) {
    const int m = shift.multiplicity;
    if (i < 1 || i > m) throw InputError("predict_lambda: index " + std::to_string(i) + " outside cluster");
    const double alpha = t > 0.0 ? shift.alphas[m - i] : shift.alphas[i - 1];
    return shift.lambda0 - t * alpha;
}

}  // namespace schro
