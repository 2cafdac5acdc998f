#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "schro/geometry.hpp"
#include "schro/operator.hpp"
#include "schro/spectrum.hpp"

namespace schro {

/// Tolerances marked "relative" are multiplied by the spectral scale of (S, W).
struct MaximizerParams {
    int max_iterations = 500;
    /// Stop once an accepted step gains less than min_gain * mu(M).
    double min_gain = 1e-8;
    double feasibility_tol = 1e-8;  // relative
    double activation_tol = 1e-6;   // relative: above this, lambda_k is treated as inactive
    double push_tol = 1e-9;         // relative: the uniform push lands lambda_k in [0, push_tol]
    double backtracking = 0.5;
    double cluster_tol = 1e-4;      // relative: eigenvalues this close to lambda_k form the active cluster
    /// Threshold c of F = {V <= -c}; non-positive means 1e-3 * cap.
    double nonneg_c = 0.0;
    int frank_wolfe_iterations = 200;
    std::uint64_t seed = 0;

    bool operator==(const MaximizerParams&) const = default;
};

enum class StopReason { Running, Stationary, MinGain, AtCap, IterationCap };
std::string to_string(StopReason reason);

struct MaximizerState {
    Potential potential = Potential::zero(1);
    int k = 1;
    double cap = 1.0;
    double lambda_k = 0.0;
    double integral = 0.0;
    int iteration = 0;
    bool converged = false;
    StopReason reason = StopReason::Running;

    double lambda_k_free = 0.0;  // lambda_k of the free Laplacian; the cap must exceed it
    double spectral_scale = 1.0;
    std::vector<double> integral_history;  // one entry per accepted iterate, starting with V0
    std::vector<double> lambda_history;
    int improvement_invocations = 0;
    int improvement_successes = 0;
    std::vector<std::string> log;
};

struct Improvement {
    std::optional<Eigen::VectorXd> direction;
    double alpha_min = 0.0;  // extreme eigenvalues of Q(d) on the cluster
    double alpha_max = 0.0;
    double integral = 0.0;   // sum_v d_v w_v
    std::string candidate;   // which phi heuristic produced the direction
};

MaximizerState optimize_potential(const ManifoldMesh& mesh, int k, double cap, const Potential& V0,
                                  const MaximizerParams& params = {});

/// d = phi0 - phi with phi0 = 1_F / mu(F) on F = {V <= -c} and phi >= 0 off F, sum phi w = 1,
/// accepted when Q(d) is negative definite on the cluster spanned by `cluster_basis`
/// (W-orthonormal columns). Empty direction when no heuristic phi works. Throws if F is empty.
Improvement improvement_direction(const ManifoldMesh& mesh, const Eigen::VectorXd& V,
                                  const Eigen::MatrixXd& cluster_basis, double c);
/// Same, taking the zero cluster around lambda_k from a spectral result.
Improvement improvement_direction(const MaximizerState& state, const SpectralResult& spec, const ManifoldMesh& mesh,
                                  double c);

struct SublevelMeasure {
    double c;
    double measure;  // mu{V <= -c}
};
std::vector<SublevelMeasure> nonnegativity_report(const Potential& V, const ManifoldMesh& mesh,
                                                  const std::vector<double>& c_grid);

struct Lemma2Check {
    bool holds = false;
    std::string reason;
};
/// True iff the run converged, cap > lambda_k(-Laplacian) and |lambda_k(V)| <= tol * spectral scale.
Lemma2Check lemma2_check(const MaximizerState& state, double tol = 1e-6);

}  // namespace schro
