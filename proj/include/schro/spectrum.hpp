#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "schro/operator.hpp"

namespace schro {

/// Ascending eigenpairs of A u = lambda W u with W-orthonormal eigenvectors (columns).
struct SpectralResult {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    int k_requested = 0;
    Eigen::VectorXd residual_norms;  // |A u - lambda W u| / |W u|
    bool valid = true;               // false: iterative solver hit its iteration cap
    int iterations = 0;

    int size() const { return static_cast<int>(eigenvalues.size()); }
};

struct EigenOptions {
    double tol = 1e-8;
    int max_iterations = 500;
    std::uint64_t seed = 0x5eed;
    /// Below this many vertices, solve densely.
    int dense_threshold = 2000;
};

/// Default zero-eigenvalue guard band: 1e-9 times the spectral scale.
double default_guard_band(const SchrodingerSystem& system);

/// Number of eigenvalues strictly below -shift, from the inertia of LDL^T(A + shift W).
/// Throws FactorizationBreakdown if a pivot is exactly zero.
int count_negative(const SchrodingerSystem& system, double shift);
/// Same with the default guard band, retrying with a nudged shift after a breakdown.
int count_negative(const SchrodingerSystem& system);

SpectralResult lowest_eigenpairs(const SchrodingerSystem& system, int k, const EigenOptions& options = {});
/// Every eigenvalue (dense), no vectors. Meant for meshes below the dense threshold.
Eigen::VectorXd all_eigenvalues(const SchrodingerSystem& system);

/// lambda_k, 1-indexed with multiplicity.
double lambda_k(const SchrodingerSystem& system, int k, const EigenOptions& options = {});

/// max of the Rayleigh quotient over span(basis): the top generalized eigenvalue of the projected pair.
double sup_rayleigh(const SchrodingerSystem& system, const Eigen::MatrixXd& basis);

/// min over `trials` random k-dimensional subspaces of sup_E R(u) - lambda_k; never below -tol by minmax.
double minmax_gap(const SchrodingerSystem& system, int k, int trials, std::uint64_t seed = 1);
/// The same gap for one given subspace.
double minmax_gap(const SchrodingerSystem& system, const Eigen::MatrixXd& basis);

}  // namespace schro
