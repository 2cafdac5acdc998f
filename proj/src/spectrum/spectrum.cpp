#include "schro/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "schro/errors.hpp"
#include "schro/kernels.hpp"
#include "schro/ldlt.hpp"

namespace schro {

namespace {

SparseMatrix shifted(const SchrodingerSystem& system, double shift) {
    const int n = system.size();
    SparseMatrix diag(n, n);
    diag.reserve(Eigen::VectorXi::Ones(n));
    for (int v = 0; v < n; ++v) diag.insert(v, v) = shift * system.weight[v];
    SparseMatrix out = system.matrix + diag;
    out.makeCompressed();
    return out;
}

Eigen::MatrixXd dense_reduced(const SchrodingerSystem& system) {
    const Eigen::VectorXd s = system.weight.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd B = Eigen::MatrixXd(system.matrix);
    return s.asDiagonal() * B * s.asDiagonal();
}

void fill_residuals(const SchrodingerSystem& system, SpectralResult& out) {
    const int k = out.size();
    out.residual_norms.resize(k);
    Eigen::VectorXd Au;
    for (int j = 0; j < k; ++j) {
        const Eigen::VectorXd u = out.eigenvectors.col(j);
        multiply(system.matrix, u, Au);
        const Eigen::VectorXd Wu = system.weight.cwiseProduct(u);
        out.residual_norms[j] = (Au - out.eigenvalues[j] * Wu).norm() / Wu.norm();
    }
}

SpectralResult dense_eigenpairs(const SchrodingerSystem& system, int k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_reduced(system));
    if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
    SpectralResult out;
    out.k_requested = k;
    out.eigenvalues = solver.eigenvalues().head(k);
    const Eigen::VectorXd s = system.weight.cwiseSqrt().cwiseInverse();
    out.eigenvectors = s.asDiagonal() * solver.eigenvectors().leftCols(k);
    fill_residuals(system, out);
    return out;
}

// W-orthonormalize the columns of X in place (two passes of modified Gram-Schmidt).
void w_orthonormalize(Eigen::MatrixXd& X, const Eigen::VectorXd& w) {
    const auto n = static_cast<std::size_t>(X.rows());
    std::span<const double> ws{w.data(), n};
    for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < X.cols(); ++j) {
            double* xj = X.col(j).data();
            for (int i = 0; i < j; ++i) {
                const double* xi = X.col(i).data();
                const double c = kernels::weighted_dot({xi, n}, {xj, n}, ws);
                kernels::axpy(-c, {xi, n}, {xj, n});
            }
            const double norm = std::sqrt(kernels::weighted_dot({xj, n}, {xj, n}, ws));
            X.col(j) /= norm;
        }
    }
}

// Shift-invert block subspace iteration with Rayleigh-Ritz in the W inner product.
SpectralResult iterative_eigenpairs(const SchrodingerSystem& system, int k, const EigenOptions& options) {
    const int n = system.size();
    const int block = std::min(n - 1, std::max(2 * k, k + 10));

    // Shift just below lambda_1 so A - sigma W is positive definite: bracket lambda_1
    // between a Gershgorin-style lower bound and the Rayleigh quotient of the constants,
    // then bisect on the inertia count.
    auto no_eigenvalue_below = [&](double sigma) {
        try {
            return SparseLdlt(shifted(system, -sigma)).inertia().negative == 0;
        } catch (const FactorizationBreakdown&) {
            return false;
        }
    };
    double lo = -system.potential.maxCoeff() - 1e-2 * system.spectral_scale;
    for (int attempt = 0; !no_eigenvalue_below(lo); ++attempt) {
        if (attempt > 60) throw NumericalError("could not find a shift below the spectrum");
        lo -= std::abs(lo) + 1e-2 * system.spectral_scale;
    }
    double hi = rayleigh_quotient(system, Eigen::VectorXd::Ones(n));
    for (int it = 0; it < 30 && hi - lo > 1e-12 * system.spectral_scale; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (no_eigenvalue_below(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    std::optional<SparseLdlt> factor;
    for (double sigma = lo - 1e-2 * (1.0 + std::abs(lo));; sigma -= 1e-2 * (1.0 + std::abs(sigma))) {
        try {
            SparseLdlt f(shifted(system, -sigma));
            if (f.inertia().negative == 0) {
                factor.emplace(std::move(f));
                break;
            }
        } catch (const FactorizationBreakdown&) {
        }
    }

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd X(n, block);
    for (int j = 0; j < block; ++j) {
        for (int i = 0; i < n; ++i) X(i, j) = normal(rng);
    }
    w_orthonormalize(X, system.weight);

    SpectralResult out;
    out.k_requested = k;
    out.valid = false;
    Eigen::MatrixXd AX(n, block);
    Eigen::VectorXd col;
    for (int it = 1; it <= options.max_iterations; ++it) {
        for (int j = 0; j < block; ++j) X.col(j) = factor->solve(system.weight.cwiseProduct(X.col(j)));
        w_orthonormalize(X, system.weight);
        for (int j = 0; j < block; ++j) {
            multiply(system.matrix, X.col(j), col);
            AX.col(j) = col;
        }
        Eigen::MatrixXd H = X.transpose() * AX;
        H = 0.5 * (H + H.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(H);
        X = X * ritz.eigenvectors();
        out.eigenvalues = ritz.eigenvalues().head(k);
        out.eigenvectors = X.leftCols(k);
        out.iterations = it;
        fill_residuals(system, out);
        if (out.residual_norms.maxCoeff() < options.tol) {
            out.valid = true;
            break;
        }
    }
    return out;
}

}  // namespace

double default_guard_band(const SchrodingerSystem& system) { return 1e-9 * system.spectral_scale; }

int count_negative(const SchrodingerSystem& system, double shift) {
    if (shift < 0.0) throw InputError("count_negative: shift must be >= 0");
    return SparseLdlt(shifted(system, shift)).inertia().negative;
}

int count_negative(const SchrodingerSystem& system) {
    double shift = default_guard_band(system);
    for (int attempt = 0;; ++attempt) {
        try {
            return count_negative(system, shift);
        } catch (const FactorizationBreakdown&) {
            if (attempt >= 8) throw;
            shift = shift * (1.0 + 1e-3) + 1e-15 * system.spectral_scale;
        }
    }
}

SpectralResult lowest_eigenpairs(const SchrodingerSystem& system, int k, const EigenOptions& options) {
    const int n = system.size();
    if (k < 1 || k >= n) {
        throw InputError("lowest_eigenpairs: need 1 <= k < vertex count (" + std::to_string(n) + "), got " +
                         std::to_string(k));
    }
    if (n < options.dense_threshold) return dense_eigenpairs(system, k);
    return iterative_eigenpairs(system, k, options);
}

Eigen::VectorXd all_eigenvalues(const SchrodingerSystem& system) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_reduced(system), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
    return solver.eigenvalues();
}

double lambda_k(const SchrodingerSystem& system, int k, const EigenOptions& options) {
    if (k < 1) throw InputError("lambda_k: k is 1-indexed");
    if (system.size() < options.dense_threshold) {
        if (k > system.size()) throw InputError("lambda_k: k exceeds vertex count");
        return all_eigenvalues(system)[k - 1];
    }
    const auto spec = lowest_eigenpairs(system, k, options);
    if (!spec.valid) throw NumericalError("lambda_k: eigensolver did not converge");
    return spec.eigenvalues[k - 1];
}

double sup_rayleigh(const SchrodingerSystem& system, const Eigen::MatrixXd& basis) {
    const int k = static_cast<int>(basis.cols());
    Eigen::MatrixXd AE(basis.rows(), k);
    Eigen::VectorXd col;
    for (int j = 0; j < k; ++j) {
        multiply(system.matrix, basis.col(j), col);
        AE.col(j) = col;
    }
    Eigen::MatrixXd Ap = basis.transpose() * AE;
    Eigen::MatrixXd Wp = basis.transpose() * system.weight.asDiagonal() * basis;
    Ap = 0.5 * (Ap + Ap.transpose());
    Wp = 0.5 * (Wp + Wp.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(Ap, Wp, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("sup_rayleigh: degenerate subspace");
    return solver.eigenvalues().maxCoeff();
}

double minmax_gap(const SchrodingerSystem& system, const Eigen::MatrixXd& basis) {
    return sup_rayleigh(system, basis) - lambda_k(system, static_cast<int>(basis.cols()));
}

double minmax_gap(const SchrodingerSystem& system, int k, int trials, std::uint64_t seed) {
    if (trials < 1) throw InputError("minmax_gap: trials must be >= 1");
    const int n = system.size();
    const double lk = lambda_k(system, k);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    double best = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd E(n, k);
    for (int t = 0; t < trials; ++t) {
        for (int j = 0; j < k; ++j) {
            for (int i = 0; i < n; ++i) E(i, j) = normal(rng);
        }
        best = std::min(best, sup_rayleigh(system, E) - lk);
    }
    return best;
}

}  // namespace schro
