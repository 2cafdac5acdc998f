#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "schro/errors.hpp"
#include "schro/maximizer.hpp"
#include "schro/perturbation.hpp"
#include "schro/spectrum.hpp"

using namespace schro;

namespace {

const double L = oracle::two_pi();

ManifoldMesh torus16() { return build_flat_torus({{16, L}, {16, L}}); }

// Negative Gaussian bump of depth `depth` centred at (pi, pi).
Eigen::VectorXd bump(const ManifoldMesh& mesh, double depth) {
    Eigen::VectorXd V(mesh.vertex_count());
    for (int v = 0; v < V.size(); ++v) {
        const double dx = mesh.coordinate(v, 0) - L / 2;
        const double dy = mesh.coordinate(v, 1) - L / 2;
        V[v] = -depth * std::exp(-(dx * dx + dy * dy) / 0.5);
    }
    return V;
}

void check_history(const MaximizerState& s) {
    const double feas = 1e-8 * s.spectral_scale;
    for (std::size_t i = 1; i < s.integral_history.size(); ++i) CHECK(s.integral_history[i] >= s.integral_history[i - 1]);
    for (double l : s.lambda_history) CHECK(l >= -feas);
    CHECK(s.potential.values().cwiseAbs().maxCoeff() <= s.cap);
}

}  // namespace

TEST_CASE("k = 1 maximizer is the zero potential") {
    const auto mesh = torus16();
    const int n = mesh.vertex_count();
    const MaximizerState s = optimize_potential(mesh, 1, 10.0, Potential::zero(n, 10.0));
    CHECK(s.converged);
    CHECK(s.integral <= 1e-6);
    check_history(s);

    // brute force over low Fourier modes: no feasible potential beats zero
    double best = -1e300;
    for (double a0 : {-0.5, -0.1, 0.0, 0.1, 0.5}) {
        for (double a1 : {0.0, 0.5, 1.0}) {
            for (double a2 : {0.0, 0.7}) {
                Eigen::VectorXd V(n);
                for (int v = 0; v < n; ++v)
                    V[v] = a0 + a1 * std::cos(mesh.coordinate(v, 0)) + a2 * std::sin(mesh.coordinate(v, 1));
                const auto sys = assemble(mesh, Potential::with_auto_cap(V));
                if (lambda_k(sys, 1) >= -default_guard_band(sys)) best = std::max(best, integrate(V, mesh));
            }
        }
    }
    CHECK(best <= 1e-9);
    CHECK(s.integral >= best - 1e-6);
}

TEST_CASE("k = 2 run activates the constraint and stays nonnegative") {
    const auto mesh = torus16();
    const MaximizerState s = optimize_potential(mesh, 2, 10.0, Potential(bump(mesh, 5.0), 10.0));
    CHECK(s.converged);
    CHECK(std::abs(s.lambda_k) <= 1e-6 * s.spectral_scale);
    CHECK(s.potential.values().minCoeff() >= -1e-4 * 10.0);
    CHECK(lemma2_check(s).holds);
    check_history(s);
    CHECK(s.improvement_invocations > 0);
    CHECK(s.improvement_successes >= 0.9 * s.improvement_invocations);
    for (const auto& r : nonnegativity_report(s.potential, mesh, {1e-3 * 10.0, 1e-2 * 10.0})) {
        CHECK(r.measure <= 1e-3 * mesh.volume());
    }
    // the default start lands on a constant, already stationary
    const MaximizerState z = optimize_potential(mesh, 2, 10.0, Potential::zero(mesh.vertex_count(), 10.0));
    CHECK(z.converged);
    CHECK(std::abs(z.lambda_k) <= 1e-6 * z.spectral_scale);
    // both are stationary points; the constant lambda_2(-Delta) is the larger one here
    CHECK(std::abs(z.integral - s.integral) <= 0.02 * z.integral);
}

TEST_CASE("infeasible start is rejected") {
    const auto mesh = torus16();
    const Potential V = Potential::constant(mesh.vertex_count(), 3.0, 10.0);
    CHECK_THROWS_AS(optimize_potential(mesh, 2, 10.0, V), InfeasibleError);
    CHECK_THROWS_AS(optimize_potential(mesh, 2, 2.0, V), InputError);
}

TEST_CASE("improvement direction on a simple eigenvalue") {
    const auto mesh = torus16();
    const Eigen::VectorXd V = bump(mesh, 5.0);
    const auto sys = assemble(mesh, Potential(V, 10.0));
    const SpectralResult spec = lowest_eigenpairs(sys, 3);
    const Eigen::MatrixXd u = spec.eigenvectors.leftCols(1);
    const Improvement imp = improvement_direction(mesh, V, u, 1.0);
    REQUIRE(imp.direction);
    const Eigen::VectorXd& d = *imp.direction;
    CHECK(imp.candidate == "eigen_density");
    CHECK(std::abs(d.dot(mesh.weights())) <= 1e-12);
    double q = 0.0;
    for (int v = 0; v < d.size(); ++v) q += d[v] * u(v, 0) * u(v, 0) * mesh.weights()[v];
    CHECK(q < 0.0);
    CHECK(imp.alpha_min < 0.0);

    // V + t d keeps the integral and raises lambda_1 to first order
    const ClusterShift shift = q_matrix(spec, Cluster{0, 1}, d, mesh);
    for (double t : {1e-3, 5e-4}) {
        const Eigen::VectorXd Vt = V + t * d;
        CHECK(std::abs(integrate(Vt, mesh) - integrate(V, mesh)) <= 1e-12 * mesh.volume());
        const double l = lambda_k(assemble(mesh, Potential::with_auto_cap(Vt)), 1);
        CHECK(l > spec.eigenvalues[0]);
        CHECK(std::abs(l - predict_lambda(shift, 1, t)) <= 50.0 * t * t);
    }
}

TEST_CASE("improvement direction preconditions") {
    const auto mesh = torus16();
    const Eigen::VectorXd V = Eigen::VectorXd::Constant(mesh.vertex_count(), 0.5);
    const Eigen::MatrixXd basis = Eigen::MatrixXd::Constant(mesh.vertex_count(), 1, 1.0 / std::sqrt(mesh.volume()));
    CHECK_THROWS_AS(improvement_direction(mesh, V, basis, 0.1), InputError);
    CHECK_THROWS_AS(improvement_direction(mesh, V, basis, 0.0), InputError);
}

TEST_CASE("improvement direction on a degenerate zero cluster") {
    const auto mesh = torus16();
    const int n = mesh.vertex_count();
    // V = lambda_2(-Delta) - a small dip: the 4-fold first level sits at zero
    const double l2 = lambda_k(assemble(mesh, Potential::zero(n)), 2);
    Eigen::VectorXd V = Eigen::VectorXd::Constant(n, l2);
    V[0] = -1.0;
    const auto sys = assemble(mesh, Potential(V, 10.0));
    const SpectralResult spec = lowest_eigenpairs(sys, 8);
    MaximizerState state;
    state.potential = Potential(V, 10.0);
    state.k = 2;
    state.spectral_scale = sys.spectral_scale;
    const Improvement imp = improvement_direction(state, spec, mesh, 0.5);
    if (imp.direction) {
        CHECK(imp.alpha_max < 0.0);
        CHECK(std::abs(imp.integral) <= 1e-12);
    } else {
        MESSAGE("no heuristic phi found; best alpha_max " << imp.alpha_max);
    }
}

TEST_CASE("nonnegativity report examples") {
    const auto mesh = build_flat_torus({{8, 1.0}, {8, 1.0}});
    const int n = mesh.vertex_count();
    for (const auto& r : nonnegativity_report(Potential::zero(n), mesh, {0.1, 1.0})) CHECK(r.measure == 0.0);
    Eigen::VectorXd V = Eigen::VectorXd::Zero(n);
    V[5] = -5.0;
    const auto rep = nonnegativity_report(Potential(V, 5.0), mesh, {1.0});
    REQUIRE(rep.size() == 1);
    CHECK(rep[0].c == 1.0);
    CHECK(rep[0].measure == mesh.weights()[5]);
}

TEST_CASE("lemma2_check examples") {
    MaximizerState s;
    s.cap = 10.0;
    s.lambda_k_free = 1.0;
    s.lambda_k = 3e-7;
    s.spectral_scale = 1.0;
    s.converged = true;
    CHECK(lemma2_check(s).holds);

    MaximizerState small = s;
    small.cap = 0.5;
    const auto r = lemma2_check(small);
    CHECK_FALSE(r.holds);
    CHECK(r.reason == "cap below lambda_k(-Delta)");

    MaximizerState running = s;
    running.converged = false;
    CHECK_FALSE(lemma2_check(running).holds);

    MaximizerState off = s;
    off.lambda_k = 0.1;
    CHECK_FALSE(lemma2_check(off).holds);
}

TEST_CASE("restart robustness (diagnostic)") {
    const auto mesh = torus16();
    const int n = mesh.vertex_count();
    MaximizerParams params;
    params.max_iterations = 200;
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(-10.0, 0.0);
    std::vector<double> finals;
    for (int r = 0; r < 5; ++r) {
        Eigen::VectorXd V(n);
        for (int v = 0; v < n; ++v) V[v] = u(rng);
        const MaximizerState s = optimize_potential(mesh, 2, 10.0, Potential(V, 10.0), params);
        check_history(s);
        finals.push_back(s.integral);
    }
    const auto [lo, hi] = std::minmax_element(finals.begin(), finals.end());
    MESSAGE("restart integrals span [" << *lo << ", " << *hi << "]");
    if (*hi - *lo > 0.02 * std::abs(*hi)) MESSAGE("restarts disagree by more than 2%: non-convexity");
}
