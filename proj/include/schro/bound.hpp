#pragma once

#include <optional>
#include <vector>

#include "schro/geometry.hpp"
#include "schro/operator.hpp"

namespace schro {

/// Both sides of N(V) >= C mu(M)^{1 - n/2} (int V)_+^{n/2} for one potential.
struct BoundReport {
    int n = 2;
    int neg_count = 0;
    double integral = 0.0;
    double volume = 0.0;
    double rhs_core = 0.0;         // (int V)_+^{n/2} / mu(M)^{n/2 - 1}
    std::optional<double> c_emp;   // neg_count / rhs_core, only when rhs_core > 0
    std::optional<int> euler;      // surfaces only
};

BoundReport bound_report(const ManifoldMesh& mesh, const Potential& V);

/// rhs_core from its ingredients; exactly (integral)_+ when n = 2.
double rhs_core(int n, double integral, double volume);

struct CurvaturePotential {
    Potential potential;
    double total;  // alpha K_total + beta H_total = sum_v V_v w_v
};

/// V = alpha K + beta H on an embedded surface; cap = max|V| (1 if V vanishes).
CurvaturePotential curvature_potential(const ManifoldMesh& mesh, double alpha, double beta);

struct SweepResult {
    double min_c_emp = 0.0;
    std::vector<BoundReport> reports;
};

/// Lower envelope of c_emp over a family; throws if no member has positive integral.
SweepResult constant_sweep(const ManifoldMesh& mesh, const std::vector<Potential>& family);

}  // namespace schro
