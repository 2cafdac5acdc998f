#include "schro/maximizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "schro/errors.hpp"
#include "schro/perturbation.hpp"

namespace schro {

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::Running:
            return "running";
        case StopReason::Stationary:
            return "stationary";
        case StopReason::MinGain:
            return "min_gain";
        case StopReason::AtCap:
            return "at_cap";
        case StopReason::IterationCap:
            return "iteration_cap";
    }
    return "unknown";
}

namespace {

std::pair<double, double> extreme_alphas(const Eigen::MatrixXd& Q) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Q, Eigen::EigenvaluesOnly);
    return {solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff()};
}

// Evaluates lambda_k and eigenpairs of S - W diag(V) on a fixed mesh.
class Evaluator {
public:
    Evaluator(const ManifoldMesh& mesh, int k, std::uint64_t seed)
        : mesh_(mesh), stiffness_(stiffness_matrix(mesh)), k_(k) {
        options_.seed = seed;
    }

    double lambda(const Eigen::VectorXd& V) const { return lambda_k(assemble(stiffness_, mesh_, V), k_, options_); }

    SpectralResult pairs(const Eigen::VectorXd& V, int count) const {
        auto spec = lowest_eigenpairs(assemble(stiffness_, mesh_, V), count, options_);
        if (!spec.valid) throw NumericalError("maximizer: eigensolver did not converge");
        return spec;
    }

    double scale() const { return assemble(stiffness_, mesh_, Eigen::VectorXd::Zero(mesh_.vertex_count())).spectral_scale; }

private:
    const ManifoldMesh& mesh_;
    Stiffness stiffness_;
    int k_;
    EigenOptions options_;
};

struct Candidate {
    Eigen::VectorXd direction;
    double t0;
    bool exchange;
};

Eigen::VectorXd clamp_box(const Eigen::VectorXd& V, double cap) { return V.cwiseMax(-cap).cwiseMin(cap); }

// Integral-neutral direction d = -P diag(U Theta U^T) raising every eigenvalue of the active
// cluster at first order, with Theta the min-norm point of the projected superdifferential
// (Frank-Wolfe over trace-one PSD matrices). Vertices pinned at +-cap are frozen.
std::optional<Eigen::VectorXd> ascent_direction(const Eigen::MatrixXd& U, const Eigen::VectorXd& w,
                                                const std::vector<bool>& free, int iterations) {
    const int n = static_cast<int>(U.rows());
    const int m = static_cast<int>(U.cols());
    double free_measure = 0.0;
    for (int v = 0; v < n; ++v) {
        if (free[v]) free_measure += w[v];
    }
    if (free_measure <= 0.0) return std::nullopt;

    auto project = [&](const Eigen::VectorXd& psi) {
        double mean = 0.0;
        for (int v = 0; v < n; ++v) {
            if (free[v]) mean += psi[v] * w[v];
        }
        mean /= free_measure;
        Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
        for (int v = 0; v < n; ++v) {
            if (free[v]) r[v] = psi[v] - mean;
        }
        return r;
    };
    auto wnorm2 = [&](const Eigen::VectorXd& a) { return a.cwiseProduct(a).dot(w); };

    Eigen::MatrixXd theta = Eigen::MatrixXd::Identity(m, m) / m;
    for (int it = 0; it < iterations; ++it) {
        const Eigen::VectorXd psi = (U * theta).cwiseProduct(U).rowwise().sum();
        const Eigen::VectorXd g = project(psi);
        if (wnorm2(g) <= 1e-24 * wnorm2(psi)) return std::nullopt;

        Eigen::VectorXd d = -g / g.cwiseAbs().maxCoeff();
        const Eigen::MatrixXd Q = weighted_gram(U, d, w);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Q);
        if (solver.eigenvalues().maxCoeff() < -1e-9) return d;

        const Eigen::VectorXd y = solver.eigenvectors().col(m - 1);
        const Eigen::VectorXd uy = U * y;
        const Eigen::VectorXd s = project(uy.cwiseProduct(uy));
        const Eigen::VectorXd diff = s - g;
        const double den = wnorm2(diff);
        const double num = -g.cwiseProduct(diff).dot(w);
        if (den <= 0.0 || num <= 1e-14 * wnorm2(g)) return std::nullopt;
        const double gamma = std::clamp(num / den, 0.0, 1.0);
        theta = (1.0 - gamma) * theta + gamma * y * y.transpose();
    }
    return std::nullopt;
}

}  // namespace

Improvement improvement_direction(const ManifoldMesh& mesh, const Eigen::VectorXd& V,
                                  const Eigen::MatrixXd& cluster_basis, double c) {
    if (!(c > 0.0)) throw InputError("improvement_direction: c must be positive");
    const int n = mesh.vertex_count();
    const Eigen::VectorXd& w = mesh.weights();
    std::vector<bool> in_f(n);
    double mu_f = 0.0;
    double mu_off = 0.0;
    for (int v = 0; v < n; ++v) {
        in_f[v] = V[v] <= -c;
        (in_f[v] ? mu_f : mu_off) += w[v];
    }
    if (mu_f == 0.0) throw InputError("improvement_direction: F = {V <= -c} is empty");

    Improvement out;
    if (mu_off == 0.0) return out;

    Eigen::VectorXd phi0 = Eigen::VectorXd::Zero(n);
    for (int v = 0; v < n; ++v) {
        if (in_f[v]) phi0[v] = 1.0 / mu_f;
    }
    const Eigen::VectorXd density = cluster_basis.cwiseProduct(cluster_basis).rowwise().sum();

    std::vector<std::pair<std::string, Eigen::VectorXd>> candidates;
    {
        Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
        double mass = 0.0;
        for (int v = 0; v < n; ++v) {
            if (!in_f[v]) {
                phi[v] = density[v];
                mass += density[v] * w[v];
            }
        }
        if (mass > 0.0) candidates.emplace_back("eigen_density", phi / mass);
    }
    {
        Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
        for (int v = 0; v < n; ++v) {
            if (!in_f[v]) phi[v] = 1.0 / mu_off;
        }
        candidates.emplace_back("uniform", phi);
    }
    {
        int best = -1;
        for (int v = 0; v < n; ++v) {
            if (!in_f[v] && (best < 0 || density[v] > density[best])) best = v;
        }
        Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
        phi[best] = 1.0 / w[best];
        candidates.emplace_back("peak", phi);
    }

    for (const auto& [name, phi] : candidates) {
        const Eigen::VectorXd d = phi0 - phi;
        const auto [amin, amax] = extreme_alphas(weighted_gram(cluster_basis, d, w));
        if (out.candidate.empty() || amax < out.alpha_max) {
            out.alpha_min = amin;
            out.alpha_max = amax;
            out.integral = d.dot(w);
            out.candidate = name;
        }
        if (amax < 0.0) {
            out.alpha_min = amin;
            out.alpha_max = amax;
            out.integral = d.dot(w);
            out.candidate = name;
            out.direction = d;
            return out;
        }
    }
    return out;
}

namespace {

std::vector<int> active_cluster(const Eigen::VectorXd& eigenvalues, int k, double tol) {
    std::vector<int> idx;
    const double lk = eigenvalues[k - 1];
    int lo = k - 1;
    while (lo > 0 && std::abs(eigenvalues[lo - 1] - lk) <= tol) --lo;
    int hi = k - 1;
    while (hi + 1 < eigenvalues.size() && std::abs(eigenvalues[hi + 1] - lk) <= tol) ++hi;
    for (int j = lo; j <= hi; ++j) idx.push_back(j);
    return idx;
}

Eigen::MatrixXd columns(const Eigen::MatrixXd& M, const std::vector<int>& idx) {
    Eigen::MatrixXd out(M.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = M.col(idx[j]);
    return out;
}

}  // namespace

Improvement improvement_direction(const MaximizerState& state, const SpectralResult& spec, const ManifoldMesh& mesh,
                                  double c) {
    if (state.k > spec.size()) throw InputError("improvement_direction: spectrum does not reach lambda_k");
    const MaximizerParams defaults;
    const auto idx = active_cluster(spec.eigenvalues, state.k, defaults.cluster_tol * state.spectral_scale);
    return improvement_direction(mesh, state.potential.values(), columns(spec.eigenvectors, idx), c);
}

MaximizerState optimize_potential(const ManifoldMesh& mesh, int k, double cap, const Potential& V0,
                                  const MaximizerParams& params) {
    const int n = mesh.vertex_count();
    if (k < 1 || k >= n) throw InputError("optimize_potential: k out of range");
    if (!(cap > 0.0)) throw InputError("optimize_potential: cap must be positive");
    if (V0.size() != n) throw InputError("optimize_potential: V0 size mismatch");
    if (V0.values().cwiseAbs().maxCoeff() > cap) throw InputError("optimize_potential: V0 violates |V| <= cap");

    const Evaluator eval(mesh, k, params.seed);
    const double scale = eval.scale();
    const double feasibility = params.feasibility_tol * scale;
    const double activation = params.activation_tol * scale;
    const double target = params.push_tol * scale;
    const double cluster_tol = params.cluster_tol * scale;
    const double c = params.nonneg_c > 0.0 ? params.nonneg_c : 1e-3 * cap;
    const double min_gain = params.min_gain * mesh.volume();
    const Eigen::VectorXd& w = mesh.weights();

    MaximizerState state;
    state.potential = Potential(V0.values(), cap);
    state.k = k;
    state.cap = cap;
    state.spectral_scale = scale;
    state.lambda_k_free = eval.lambda(Eigen::VectorXd::Zero(n));

    Eigen::VectorXd V = V0.values();
    double lk = eval.lambda(V);
    if (lk < -feasibility) {
        std::ostringstream msg;
        msg << "optimize_potential: infeasible start, lambda_" << k << "(V0) = " << lk;
        throw InfeasibleError(msg.str());
    }
    double integral = integrate(V, mesh);
    state.integral_history.push_back(integral);
    state.lambda_history.push_back(lk);

    // V_s = (1 - s) V + s cap, slid until lambda_k lands in [0, target]. lambda_k(V_s) is
    // non-increasing in s, so a bracketing secant (Illinois) search is safe.
    auto push = [&](const Eigen::VectorXd& base, double lbase) -> std::pair<Eigen::VectorXd, double> {
        if (lbase <= target) return {base, lbase};
        auto at = [&](double s) { return (base + s * (Eigen::VectorXd::Constant(n, cap) - base)).cwiseMin(cap).eval(); };
        const Eigen::VectorXd full = Eigen::VectorXd::Constant(n, cap);
        const double lfull = eval.lambda(full);
        if (lfull >= 0.0) return {full, lfull};
        double lo = 0.0, flo = lbase, hi = 1.0, fhi = lfull;
        int side = 0;
        for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
            double s = lo - flo * (hi - lo) / (fhi - flo);
            if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);
            const double f = eval.lambda(at(s));
            if (f >= 0.0) {
                lo = s;
                flo = f;
                if (f <= target) break;
                if (side == 1) fhi *= 0.5;
                side = 1;
            } else {
                hi = s;
                fhi = f;
                if (side == -1) flo *= 0.5;
                side = -1;
            }
        }
        // flo may have been halved by Illinois; report the true value.
        Eigen::VectorXd out = at(lo);
        return {out, eval.lambda(out)};
    };

    auto accept = [&](Eigen::VectorXd next, double lnext) {
        if (lnext < -feasibility) throw NumericalError("optimizer accepted an infeasible iterate");
        V = std::move(next);
        lk = lnext;
        integral = integrate(V, mesh);
        state.integral_history.push_back(integral);
        state.lambda_history.push_back(lk);
    };

    double trust = 0.1 * cap;
    state.reason = StopReason::IterationCap;
    for (int iter = 1; iter <= params.max_iterations; ++iter) {
        state.iteration = iter;
        if (lk > activation) {
            auto [next, lnext] = push(V, lk);
            const bool at_cap = (next.array() == cap).all();
            if (integrate(next, mesh) > integral) accept(std::move(next), lnext);
            if (at_cap) {
                state.reason = StopReason::AtCap;
                break;
            }
            continue;
        }

        const int count = std::min(n - 1, k + 12);
        const SpectralResult spec = eval.pairs(V, count);
        const auto idx = active_cluster(spec.eigenvalues, k, cluster_tol);
        const Eigen::MatrixXd basis = columns(spec.eigenvectors, idx);

        std::vector<Candidate> candidates;
        double mu_f = 0.0;
        double depth = 0.0;
        for (int v = 0; v < n; ++v) {
            if (V[v] <= -c) {
                mu_f += w[v];
                depth = std::max(depth, -V[v]);
            }
        }
        if (mu_f > 0.0) {
            ++state.improvement_invocations;
            Improvement imp = improvement_direction(mesh, V, basis, c);
            if (imp.direction) {
                ++state.improvement_successes;
                candidates.push_back({*imp.direction, depth * mu_f, true});
            } else {
                std::ostringstream msg;
                msg << "iter " << iter << ": no improvement direction (best alpha_max " << imp.alpha_max << ", "
                    << imp.candidate << ")";
                state.log.push_back(msg.str());
            }
        }
        std::vector<bool> free(n);
        for (int v = 0; v < n; ++v) free[v] = std::abs(V[v]) < cap;
        if (auto d = ascent_direction(basis, w, free, params.frank_wolfe_iterations)) {
            candidates.push_back({*d, trust, false});
        }

        bool accepted = false;
        double gain = 0.0;
        for (const auto& cand : candidates) {
            for (double t = cand.t0; t > 1e-12 * cap; t *= params.backtracking) {
                Eigen::VectorXd trial = clamp_box(V + t * cand.direction, cap);
                const double ltrial = eval.lambda(trial);
                if (!(ltrial > lk) || ltrial < 0.0) continue;
                auto [next, lnext] = push(trial, ltrial);
                const double next_integral = integrate(next, mesh);
                if (next_integral > integral) {
                    gain = next_integral - integral;
                    accept(std::move(next), lnext);
                    accepted = true;
                    if (!cand.exchange) trust = std::min(2.0 * t, cap);
                    break;
                }
            }
            if (accepted) break;
        }
        if (!accepted) {
            state.reason = StopReason::Stationary;
            break;
        }
        if (gain < min_gain && mu_f == 0.0) {
            state.reason = StopReason::MinGain;
            break;
        }
    }

    state.converged = state.reason != StopReason::IterationCap;
    state.potential = Potential(V, cap);
    state.lambda_k = lk;
    state.integral = integral;
    return state;
}

std::vector<SublevelMeasure> nonnegativity_report(const Potential& V, const ManifoldMesh& mesh,
                                                  const std::vector<double>& c_grid) {
    if (V.size() != mesh.vertex_count()) throw InputError("nonnegativity_report: size mismatch");
    std::vector<SublevelMeasure> out;
    out.reserve(c_grid.size());
    for (double c : c_grid) {
        double measure = 0.0;
        for (int v = 0; v < V.size(); ++v) {
            if (V[v] <= -c) measure += mesh.weights()[v];
        }
        out.push_back({c, measure});
    }
    return out;
}

Lemma2Check lemma2_check(const MaximizerState& state, double tol) {
    if (!state.converged) return {false, "optimizer did not converge"};
    if (!(state.cap > state.lambda_k_free)) return {false, "cap below lambda_k(-Delta)"};
    if (std::abs(state.lambda_k) > tol * state.spectral_scale) return {false, "lambda_k(V) is not zero"};
    return {true, "lambda_k(V) = 0"};
}

}  // namespace schro
