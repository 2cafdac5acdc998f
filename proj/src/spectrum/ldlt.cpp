#include "schro/ldlt.hpp"

#include <numeric>
#include <string>

#include <Eigen/OrderingMethods>

#include "schro/errors.hpp"

namespace schro {

SparseLdlt::SparseLdlt(const SparseMatrix& matrix, Ordering ordering) : n_(static_cast<int>(matrix.rows())) {
    if (matrix.rows() != matrix.cols()) throw InputError("LDL^T needs a square matrix");
    const int n = n_;

    perm_.resize(n);
    if (ordering == Ordering::Amd) {
        Eigen::SparseMatrix<double, Eigen::ColMajor, int> col = matrix;
        Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p;
        Eigen::AMDOrdering<int> amd;
        amd(col, p);
        for (int i = 0; i < n; ++i) perm_[i] = p.indices()[i];
    } else {
        std::iota(perm_.begin(), perm_.end(), 0);
    }
    inv_perm_.resize(n);
    for (int i = 0; i < n; ++i) inv_perm_[perm_[i]] = i;

    // Symmetric storage: row r of a row-major matrix is also column r.
    const int* ap = matrix.outerIndexPtr();
    const int* ai = matrix.innerIndexPtr();
    const double* ax = matrix.valuePtr();

    // Elimination tree and column counts of L.
    std::vector<int> parent(n), lnz(n), flag(n);
    for (int k = 0; k < n; ++k) {
        parent[k] = -1;
        flag[k] = k;
        lnz[k] = 0;
        const int kk = perm_[k];
        for (int p = ap[kk]; p < ap[kk + 1]; ++p) {
            int i = inv_perm_[ai[p]];
            if (i >= k) continue;
            for (; flag[i] != k; i = parent[i]) {
                if (parent[i] == -1) parent[i] = k;
                ++lnz[i];
                flag[i] = k;
            }
        }
    }
    lp_.assign(n + 1, 0);
    for (int k = 0; k < n; ++k) lp_[k + 1] = lp_[k] + lnz[k];
    li_.resize(lp_[n]);
    lx_.resize(lp_[n]);
    d_.resize(n);

    // Up-looking numeric factorization, one row of L per step.
    std::vector<double> y(n, 0.0);
    std::vector<int> pattern(n);
    for (int k = 0; k < n; ++k) {
        y[k] = 0.0;
        int top = n;
        flag[k] = k;
        lnz[k] = 0;
        const int kk = perm_[k];
        for (int p = ap[kk]; p < ap[kk + 1]; ++p) {
            int i = inv_perm_[ai[p]];
            if (i > k) continue;
            y[i] += ax[p];
            int len = 0;
            for (; flag[i] != k; i = parent[i]) {
                pattern[len++] = i;
                flag[i] = k;
            }
            while (len > 0) pattern[--top] = pattern[--len];
        }
        double dk = y[k];
        y[k] = 0.0;
        for (; top < n; ++top) {
            const int i = pattern[top];
            const double yi = y[i];
            y[i] = 0.0;
            const int end = lp_[i] + lnz[i];
            for (int p = lp_[i]; p < end; ++p) y[li_[p]] -= lx_[p] * yi;
            const double lki = yi / d_[i];
            dk -= lki * yi;
            li_[end] = k;
            lx_[end] = lki;
            ++lnz[i];
        }
        if (dk == 0.0) {
            throw FactorizationBreakdown("LDL^T: zero pivot at step " + std::to_string(k), k);
        }
        d_[k] = dk;
    }
}

Inertia SparseLdlt::inertia() const {
    Inertia in;
    for (int k = 0; k < n_; ++k) {
        if (d_[k] < 0.0) {
            ++in.negative;
        } else if (d_[k] > 0.0) {
            ++in.positive;
        } else {
            ++in.zero;
        }
    }
    return in;
}

Eigen::VectorXd SparseLdlt::solve(const Eigen::VectorXd& b) const {
    const int n = n_;
    Eigen::VectorXd x(n);
    for (int k = 0; k < n; ++k) x[k] = b[perm_[k]];
    for (int j = 0; j < n; ++j) {
        const double xj = x[j];
        for (int p = lp_[j]; p < lp_[j + 1]; ++p) x[li_[p]] -= lx_[p] * xj;
    }
    for (int j = 0; j < n; ++j) x[j] /= d_[j];
    for (int j = n - 1; j >= 0; --j) {
        double s = x[j];
        for (int p = lp_[j]; p < lp_[j + 1]; ++p) s -= lx_[p] * x[li_[p]];
        x[j] = s;
    }
    Eigen::VectorXd out(n);
    for (int k = 0; k < n; ++k) out[perm_[k]] = x[k];
    return out;
}

}  // namespace schro
