// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "schro/bound.hpp"
#include "schro/config.hpp"
#include "schro/maximizer.hpp"
#include "schro/perturbation.hpp"
#include "schro/runner.hpp"
#include "schro/spectrum.hpp"

using namespace schro;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;
const double L = oracle::two_pi();

// Pinned tolerances.
constexpr double kRuntime1 = 5.0;
constexpr double kRuntime2 = 30.0;
constexpr double kSphereRel = 0.03;
constexpr double kGaussBonnetRel = 1e-9;
constexpr double kShiftRel = 1e-10;
constexpr double kMonotoneSlack = 1e-9;
constexpr double kKatoTol = 1e-3;
constexpr double kKatoDecrease = 3.0;
constexpr double kLambdaRel = 1e-6;
constexpr double kRuntime7 = 300.0;
constexpr double kSublevelFraction = 1e-3;
constexpr double kSublevelC = 0.01;
constexpr double kSuccessRate = 0.9;
constexpr double kWeylRel = 0.15;

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("criterion %2d: %s  %s  [%s] (%.2fs)\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                secs);
    std::fflush(stdout);
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ManifoldMesh torus(int m) { return build_flat_torus({{m, L}, {m, L}}); }

Eigen::VectorXd uniform_field(int n, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = u(rng);
    return x;
}

Eigen::VectorXd bump(const ManifoldMesh& mesh, double depth) {
    Eigen::VectorXd V(mesh.vertex_count());
    for (int v = 0; v < V.size(); ++v) {
        const double dx = mesh.coordinate(v, 0) - L / 2;
        const double dy = mesh.coordinate(v, 1) - L / 2;
        V[v] = -depth * std::exp(-(dx * dx + dy * dy) / 0.5);
    }
    return V;
}

std::vector<ManifoldMesh> mesh_families() {
    std::vector<ManifoldMesh> out;
    out.push_back(torus(16));
    out.push_back(build_flat_torus({{6, L}, {6, L}, {6, L}}));
    out.push_back(build_icosphere(2, 1.0));
    out.push_back(load_mesh(fs::path(SCHRO_TEST_DATA) / "torus_genus1.off"));
    return out;
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

Outcome lattice() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto mesh = torus(32);
    std::ostringstream d;
    bool ok = true;
    for (double c : {0.5, 1.5, 2.5, 4.5, 10.0}) {
        const int got = count_negative(assemble(mesh, Potential::constant(mesh.vertex_count(), c, c)));
        const int want = oracle::lattice_count(32, L, c);
        ok = ok && got == want;
        d << "c=" << c << ":" << got << "/" << want << " ";
    }
    const double t = elapsed(t0);
    ok = ok && oracle::lattice_count(32, L, 1.5) == 5 && t < kRuntime1;
    d << "time " << fmt("%.3f", t) << "s < " << kRuntime1 << "s";
    return {ok, d.str()};
}

Outcome sphere() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto mesh = build_icosphere(4, 1.0);
    const int n = mesh.vertex_count();
    const auto spec = lowest_eigenpairs(assemble(mesh, Potential::zero(n)), 9);
    const auto want = oracle::sphere_spectrum(9);
    double worst = 0.0;
    bool ok = spec.valid && std::abs(spec.eigenvalues[0]) <= 1e-8;
    for (int i = 1; i < 9; ++i) worst = std::max(worst, std::abs(spec.eigenvalues[i] - want[i]) / want[i]);
    ok = ok && worst <= kSphereRel;
    const int count = count_negative(assemble(mesh, Potential::constant(n, 3.0, 3.0)));
    ok = ok && count == 4;
    const double t = elapsed(t0);
    ok = ok && t < kRuntime2;
    return {ok, "max rel err " + fmt("%.4f", worst) + " <= " + fmt("%.2f", kSphereRel) + ", N(3)=" +
                    std::to_string(count) + ", time " + fmt("%.2f", t) + "s"};
}

Outcome gauss_bonnet() {
    double worst = 0.0;
    for (int s = 0; s <= 4; ++s) {
        const auto mesh = build_icosphere(s, 1.0);
        const double total = curvature(mesh).gauss.dot(mesh.weights());
        worst = std::max(worst, std::abs(total - 2 * pi * euler_characteristic(mesh)) / (4 * pi));
    }
    const auto t = load_mesh(fs::path(SCHRO_TEST_DATA) / "torus_genus1.off");
    const double total = curvature(t).gauss.dot(t.weights());
    const double abs_err = std::abs(total);
    const bool ok = worst < kGaussBonnetRel && euler_characteristic(t) == 0 && abs_err < kGaussBonnetRel * t.volume();
    return {ok, "sphere rel " + fmt("%.2e", worst) + ", genus-1 abs " + fmt("%.2e", abs_err) + " (area " +
                    fmt("%.2f", t.volume()) + ")"};
}

Outcome shift_identity() {
    std::mt19937_64 rng(101);
    double worst = 0.0;
    int trials = 0;
    for (const auto& mesh : mesh_families()) {
        const int n = mesh.vertex_count();
        std::uniform_int_distribution<int> kd(1, 5);
        std::uniform_real_distribution<double> cd(-5.0, 5.0);
        for (int t = 0; t < 20; ++t) {
            const Eigen::VectorXd V = uniform_field(n, -5.0, 5.0, rng);
            const double c = cd(rng);
            const int k = kd(rng);
            const double a = lambda_k(assemble(mesh, Potential(V, 10.0)), k);
            const double b = lambda_k(assemble(mesh, Potential((V.array() + c).matrix(), 10.0)), k);
            worst = std::max(worst, std::abs(b - (a - c)) / std::max(1.0, std::abs(a - c)));
            ++trials;
        }
    }
    return {worst <= kShiftRel, std::to_string(trials) + " triples, max rel err " + fmt("%.2e", worst)};
}

Outcome monotonicity() {
    std::mt19937_64 rng(103);
    double worst = -1e300;
    const auto mesh = torus(16);
    const int n = mesh.vertex_count();
    for (int t = 0; t < 20; ++t) {
        const Eigen::VectorXd V1 = uniform_field(n, -5.0, 5.0, rng);
        const Eigen::VectorXd V2 = V1 + uniform_field(n, 0.0, 3.0, rng);
        const auto s1 = assemble(mesh, Potential(V1, 8.0));
        const auto s2 = assemble(mesh, Potential(V2, 8.0));
        for (int k = 1; k <= 5; ++k) worst = std::max(worst, lambda_k(s2, k) - lambda_k(s1, k));
    }
    return {worst <= kMonotoneSlack, "20 pairs x k=1..5, max lambda_k(V2) - lambda_k(V1) = " + fmt("%.3e", worst)};
}

Outcome kato() {
    const auto mesh = torus(16);
    const int n = mesh.vertex_count();
    const auto spec = lowest_eigenpairs(assemble(mesh, Potential::zero(n)), 9);
    const Cluster cl = cluster_containing(detect_clusters(spec, default_cluster_tol(spec)), 1);
    if (cl.multiplicity != 4) return {false, "cluster multiplicity " + std::to_string(cl.multiplicity)};
    Eigen::VectorXd g(n);
    for (int v = 0; v < n; ++v) {
        const double x = mesh.coordinate(v, 0), y = mesh.coordinate(v, 1);
        g[v] = std::cos(2 * x) + 0.5 * std::cos(2 * y) + 0.3 * std::sin(x + y);
    }
    const ClusterShift shift = q_matrix(spec, cl, g, mesh);
    auto err_at = [&](double t) {
        const auto moved = lowest_eigenpairs(assemble(mesh, Potential::with_auto_cap(t * g)), 9);
        double e = 0.0;
        for (int i = 1; i <= 4; ++i) {
            const int pos = cl.base_index + i - 1;
            const double fd = (moved.eigenvalues[pos] - spec.eigenvalues[pos]) / t;
            e = std::max(e, std::abs(fd - (predict_lambda(shift, i, t) - shift.lambda0) / t));
        }
        return e;
    };
    const double e0 = err_at(1e-4);
    const double e2 = err_at(2.5e-5);
    const bool ok = e0 <= kKatoTol && e0 / e2 >= kKatoDecrease;
    return {ok, "lambda=" + fmt("%.5f", shift.lambda0) + " m=4, err(1e-4)=" + fmt("%.2e", e0) +
                    ", err(2.5e-5)=" + fmt("%.2e", e2) + ", ratio " + fmt("%.2f", e0 / e2)};
}

Outcome active_constraint() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto mesh = torus(16);
    const MaximizerState s = optimize_potential(mesh, 2, 10.0, Potential::zero(mesh.vertex_count(), 10.0));
    const MaximizerState b = optimize_potential(mesh, 2, 10.0, Potential(bump(mesh, 5.0), 10.0));
    const double t = elapsed(t0);
    const double tol = kLambdaRel * s.spectral_scale;
    const bool ok = s.converged && b.converged && std::abs(s.lambda_k) <= tol && std::abs(b.lambda_k) <= tol &&
                    t < kRuntime7;
    return {ok, "V0=0: lambda_2=" + fmt("%.2e", s.lambda_k) + " (" + to_string(s.reason) + "), V0=bump: lambda_2=" +
                    fmt("%.2e", b.lambda_k) + " (" + to_string(b.reason) + "), tol " + fmt("%.2e", tol) + ", time " +
                    fmt("%.1f", t) + "s"};
}

Outcome nonnegative_maximizer() {
    const auto mesh = torus(16);
    const double cap = 10.0;
    const Eigen::VectorXd V0 = bump(mesh, 5.0);
    const MaximizerState s = optimize_potential(mesh, 2, cap, Potential(V0, cap));
    const auto sub = nonnegativity_report(s.potential, mesh, {kSublevelC * cap});
    const double frac = sub[0].measure / mesh.volume();
    const double rate = s.improvement_invocations > 0
                            ? static_cast<double>(s.improvement_successes) / s.improvement_invocations
                            : 0.0;
    for (const auto& line : s.log) std::printf("    log: %s\n", line.c_str());
    const bool ok = V0.minCoeff() == -5.0 && frac <= kSublevelFraction && s.improvement_invocations > 0 &&
                    rate >= kSuccessRate;
    return {ok, "min V0=" + fmt("%.1f", V0.minCoeff()) + ", mu{V<=-0.1}/mu(M)=" + fmt("%.2e", frac) +
                    ", min V=" + fmt("%.3f", s.potential.values().minCoeff()) + ", improvement " +
                    std::to_string(s.improvement_successes) + "/" + std::to_string(s.improvement_invocations)};
}

Outcome envelope() {
    const auto mesh = torus(32);
    const int n = mesh.vertex_count();
    std::vector<Potential> family;
    for (double c : {10.0, 20.0, 40.0}) family.push_back(Potential::constant(n, c, c));
    const SweepResult sweep = constant_sweep(mesh, family);
    const double weyl = 1.0 / (4 * pi);
    std::ostringstream d;
    d << "per-c c_emp:";
    for (const auto& r : sweep.reports) d << " " << fmt("%.4f", *r.c_emp) << "(" << fmt("%+.1f", 100 * (*r.c_emp / weyl - 1)) << "%)";
    const double rel = std::abs(sweep.min_c_emp - weyl) / weyl;
    d << ", min c_emp " << fmt("%.4f", sweep.min_c_emp) << " vs 1/(4pi) " << fmt("%.4f", weyl) << " ("
      << fmt("%.1f", 100 * rel) << "%)";

    bool scaling = true;
    const auto big = build_flat_torus({{32, 2 * L}, {32, 2 * L}});
    for (double c : {1.5, 10.0, 20.0, 40.0}) {
        const BoundReport a = bound_report(mesh, Potential::constant(n, c, c));
        const BoundReport b = bound_report(big, Potential::constant(n, c / 4, c / 4));
        scaling = scaling && a.neg_count == b.neg_count && a.integral == b.integral;
    }
    int within = 0;
    for (const auto& r : sweep.reports) within += std::abs(*r.c_emp - weyl) <= kWeylRel * weyl;
    d << ", per-c within 15%: " << within << "/3";
    d << ", scaling law " << (scaling ? "bit-identical" : "MISMATCH");
    return {sweep.min_c_emp > 0.0 && rel <= kWeylRel && scaling, d.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    using nlohmann::json;
    const fs::path root = fs::temp_directory_path() / "schro_acceptance";
    const json torus16 = {{"type", "flat_torus"}, {"dims", {{16, L}, {16, L}}}};
    const json torus32 = {{"type", "flat_torus"}, {"dims", {{32, L}, {32, L}}}};
    std::vector<json> configs = {
        {{"task", "count"}, {"mesh", torus32}, {"potential", {{"type", "constant"}, {"value", 1.5}}}},
        {{"task", "spectrum"}, {"mesh", {{"type", "icosphere"}, {"subdivisions", 4}}},
         {"potential", {{"type", "constant"}, {"value", 0.0}}}, {"params", {{"k", 9}}}},
        {{"task", "maximize"}, {"mesh", torus16}, {"potential", {{"type", "bump"}, {"amplitude", 5.0}}},
         {"params", {{"k", 2}, {"cap", 10.0}}}},
        {{"task", "sweep"}, {"mesh", torus32}, {"params", {{"family", {{"constants", {10.0, 20.0, 40.0}}}}}}},
        {{"task", "perturb"}, {"mesh", torus16}, {"potential", {{"type", "constant"}, {"value", 0.0}}},
         {"params", {{"k", 2}, {"direction", {{"type", "random"}, {"smoothness", 3}}}, {"t_values", {1e-4, 2.5e-5}}}}},
        {{"task", "bound"}, {"mesh", {{"type", "icosphere"}, {"subdivisions", 3}}},
         {"potential", {{"type", "curvature"}, {"alpha", 1.0}, {"beta", 1.0}}}},
    };
    bool ok = true;
    std::ostringstream d;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        json& j = configs[i];
        j["schema_version"] = 1;
        j["seed"] = 2024;
        const std::string task = j.at("task");
        std::string outputs[2];
        for (int rep = 0; rep < 2; ++rep) {
            j["output_dir"] = (root / (task + "_" + std::to_string(rep))).string();
            std::ostringstream log;
            const auto r = cli::run(cli::parse_config(j), log);
            ok = ok && r.exit_code == cli::kExitOk;
            outputs[rep] = slurp(fs::path(j.at("output_dir").get<std::string>()) / "result.json");
        }
        const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
        ok = ok && same;
        d << task << (same ? ":same " : ":DIFF ");
    }
    return {ok, d.str()};
}

}  // namespace

int main() {
    report(1, "lattice-oracle exactness", lattice);
    report(2, "sphere spectrum", sphere);
    report(3, "Gauss-Bonnet", gauss_bonnet);
    report(4, "shift identity", shift_identity);
    report(5, "monotonicity", monotonicity);
    report(6, "Kato first-order slopes", kato);
    report(7, "lambda_k(V_max) = 0", active_constraint);
    report(8, "V_max >= 0 and improvement step", nonnegative_maximizer);
    report(9, "bound envelope and scaling law", envelope);
    report(10, "determinism", determinism);
    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
