#include "schro/bound.hpp"

#include <cmath>
#include <limits>

#include "schro/errors.hpp"
#include "schro/spectrum.hpp"

namespace schro {

double rhs_core(int n, double integral, double volume) {
    if (integral <= 0.0) return 0.0;
    const double half = 0.5 * n;
    return std::pow(integral, half) / std::pow(volume, half - 1.0);
}

BoundReport bound_report(const ManifoldMesh& mesh, const Potential& V) {
    BoundReport r;
    r.n = mesh.dim();
    r.neg_count = count_negative(assemble(mesh, V));
    r.integral = integrate(V.values(), mesh);
    r.volume = mesh.volume();
    r.rhs_core = rhs_core(r.n, r.integral, r.volume);
    if (r.rhs_core > 0.0) r.c_emp = r.neg_count / r.rhs_core;
    if (mesh.kind() == MeshKind::TriangleSurface) r.euler = euler_characteristic(mesh);
    return r;
}

CurvaturePotential curvature_potential(const ManifoldMesh& mesh, double alpha, double beta) {
    if (mesh.kind() != MeshKind::TriangleSurface) throw InputError("curvature potential needs an embedded surface");
    const CurvatureField field = curvature(mesh);
    Eigen::VectorXd values = alpha * field.gauss + beta * field.mean;
    Potential V = Potential::with_auto_cap(std::move(values));
    const double total = integrate(V.values(), mesh);
    return {std::move(V), total};
}

SweepResult constant_sweep(const ManifoldMesh& mesh, const std::vector<Potential>& family) {
    SweepResult out;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& V : family) {
        out.reports.push_back(bound_report(mesh, V));
        if (const auto& c = out.reports.back().c_emp) best = std::min(best, *c);
    }
    if (!std::isfinite(best)) throw InputError("constant_sweep: no potential in the family has positive integral");
    out.min_c_emp = best;
    return out;
}

}  // namespace schro
