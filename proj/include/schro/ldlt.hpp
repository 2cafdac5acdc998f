#pragma once

#include <vector>

#include <Eigen/Core>

#include "schro/operator.hpp"

namespace schro {

struct Inertia {
    int negative = 0;
    int zero = 0;
    int positive = 0;
};

/// Sparse symmetric LDL^T without pivoting on a fill-reducing (AMD) permutation.
/// D is diagonal, so by Sylvester's law of inertia the pivot signs are the
/// eigenvalue signs of the input. An exactly zero pivot throws FactorizationBreakdown.
class SparseLdlt {
public:
    enum class Ordering { Amd, Natural };

    explicit SparseLdlt(const SparseMatrix& matrix, Ordering ordering = Ordering::Amd);

    Inertia inertia() const;
    const Eigen::VectorXd& pivots() const { return d_; }
    /// Solves matrix * x = b.
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    int size() const { return n_; }
    long long factor_nonzeros() const { return static_cast<long long>(li_.size()); }

private:
    int n_;
    std::vector<int> perm_;      // perm_[new] = old
    std::vector<int> inv_perm_;  // inv_perm_[old] = new
    std::vector<int> lp_;        // column offsets of strictly-lower L
    std::vector<int> li_;
    std::vector<double> lx_;
    Eigen::VectorXd d_;
};

}  // namespace schro
