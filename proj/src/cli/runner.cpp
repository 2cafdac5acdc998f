#include "schro/runner.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>

#include "schro/bound.hpp"
#include "schro/errors.hpp"
#include "schro/kernels.hpp"
#include "schro/maximizer.hpp"
#include "schro/perturbation.hpp"
#include "schro/spectrum.hpp"

#ifndef SCHRO_VERSION
#define SCHRO_VERSION "dev"
#endif

namespace schro::cli {

using nlohmann::json;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

using Clock = std::chrono::steady_clock;

json vec_json(const Eigen::VectorXd& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_spectrum_csv(const std::filesystem::path& dir, const SpectralResult& spec) {
    std::string text = "index,eigenvalue,residual\n";
    for (int i = 0; i < spec.size(); ++i) {
        text += std::to_string(i + 1) + "," + format_double(spec.eigenvalues[i]) + "," +
                format_double(spec.residual_norms[i]) + "\n";
    }
    write_text(dir / "spectrum.csv", text);
}

void write_potential_csv(const std::filesystem::path& dir, const Eigen::VectorXd& V) {
    std::string text = "vertex,V\n";
    for (int v = 0; v < V.size(); ++v) text += std::to_string(v) + "," + format_double(V[v]) + "\n";
    write_text(dir / "potential.csv", text);
}

json spectrum_json(const SpectralResult& spec) {
    return json{{"eigenvalues", vec_json(spec.eigenvalues)},
                {"residuals", vec_json(spec.residual_norms)},
                {"valid", spec.valid},
                {"iterations", spec.iterations}};
}

json bound_json(const BoundReport& r) {
    json j{{"n", r.n},
           {"neg_count", r.neg_count},
           {"integral", r.integral},
           {"volume", r.volume},
           {"rhs_core", r.rhs_core},
           {"c_emp", r.c_emp ? json(*r.c_emp) : json(nullptr)}};
    if (r.euler) j["euler"] = *r.euler;
    return j;
}

struct Context {
    const ExperimentConfig& config;
    const ManifoldMesh& mesh;
    std::filesystem::path dir;
    EigenOptions eig;
    json& timings;
};

template <typename F>
auto timed(json& timings, const std::string& name, F&& f) {
    const auto start = Clock::now();
    auto out = f();
    timings[name] = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
}

json task_spectrum(Context& ctx) {
    const TaskParams& p = ctx.config.params;
    const Potential V = build_potential(ctx.config.potential, ctx.mesh, ctx.config.seed);
    const SchrodingerSystem sys = assemble(ctx.mesh, V);
    if (p.k >= sys.size()) throw ConfigError("params.k: must be below the vertex count");
    const SpectralResult spec = timed(ctx.timings, "eigensolve", [&] { return lowest_eigenpairs(sys, p.k, ctx.eig); });
    write_spectrum_csv(ctx.dir, spec);
    json j = spectrum_json(spec);
    j["k"] = p.k;
    j["spectral_scale"] = sys.spectral_scale;
    j["lambda_k"] = spec.eigenvalues[p.k - 1];
    return j;
}

json task_count(Context& ctx) {
    const TaskParams& p = ctx.config.params;
    const Potential V = build_potential(ctx.config.potential, ctx.mesh, ctx.config.seed);
    const SchrodingerSystem sys = assemble(ctx.mesh, V);
    const double shift = p.shift.value_or(default_guard_band(sys));
    const int count = timed(ctx.timings, "factorize",
                            [&] { return p.shift ? count_negative(sys, *p.shift) : count_negative(sys); });
    return json{{"neg_count", count},
                {"shift", shift},
                {"vertices", sys.size()},
                {"spectral_scale", sys.spectral_scale},
                {"integral", integrate(V.values(), ctx.mesh)}};
}

json maximizer_json(const MaximizerState& s) {
    return json{{"lambda_k", s.lambda_k},
                {"integral", s.integral},
                {"min_V", s.potential.values().minCoeff()},
                {"max_V", s.potential.values().maxCoeff()},
                {"iterations", s.iteration},
                {"converged", s.converged},
                {"reason", to_string(s.reason)}};
}

json task_maximize(Context& ctx) {
    const TaskParams& p = ctx.config.params;
    const int n = ctx.mesh.vertex_count();
    if (p.k >= n) throw ConfigError("params.k: must be below the vertex count");
    MaximizerParams mp = p.maximizer;
    mp.seed ^= ctx.config.seed;

    const Potential built = build_potential(ctx.config.potential, ctx.mesh, ctx.config.seed);
    if (built.values().cwiseAbs().maxCoeff() > p.cap) {
        throw ConfigError("potential: V0 exceeds params.cap");
    }
    const Potential V0(built.values(), p.cap);
    const MaximizerState state =
        timed(ctx.timings, "maximize", [&] { return optimize_potential(ctx.mesh, p.k, p.cap, V0, mp); });

    json j = maximizer_json(state);
    j["k"] = p.k;
    j["cap"] = p.cap;
    j["spectral_scale"] = state.spectral_scale;
    j["lambda_k_free"] = state.lambda_k_free;
    j["min_V0"] = V0.values().minCoeff();
    j["integral_history"] = state.integral_history;
    j["lambda_history"] = state.lambda_history;
    j["improvement_invocations"] = state.improvement_invocations;
    j["improvement_successes"] = state.improvement_successes;
    j["log"] = state.log;

    const Lemma2Check l2 = lemma2_check(state);
    j["lemma2_check"] = json{{"holds", l2.holds}, {"reason", l2.reason}};

    std::vector<double> grid = p.c_grid;
    if (grid.empty()) grid = {1e-3 * p.cap, 1e-2 * p.cap};
    json nonneg = json::array();
    for (const auto& s : nonnegativity_report(state.potential, ctx.mesh, grid)) {
        nonneg.push_back(json{{"c", s.c}, {"measure", s.measure}, {"fraction", s.measure / ctx.mesh.volume()}});
    }
    j["nonnegativity"] = nonneg;

    if (p.restarts > 0) {
        json starts = json::array();
        std::mt19937_64 rng(ctx.config.seed ^ 0x9e3779b97f4a7c15ULL);
        std::uniform_real_distribution<double> uniform(-p.cap, 0.0);
        for (int r = 0; r < p.restarts; ++r) {
            Eigen::VectorXd values(n);
            for (int v = 0; v < n; ++v) values[v] = uniform(rng);
            // V <= 0 keeps lambda_k(V) >= lambda_k(0) >= 0, so every start is feasible.
            const MaximizerState s = optimize_potential(ctx.mesh, p.k, p.cap, Potential(values, p.cap), mp);
            starts.push_back(maximizer_json(s));
        }
        j["restarts"] = starts;
    }

    const SchrodingerSystem sys = assemble(ctx.mesh, state.potential);
    const SpectralResult spec = lowest_eigenpairs(sys, std::min(n - 1, p.k + 4), ctx.eig);
    write_spectrum_csv(ctx.dir, spec);
    write_potential_csv(ctx.dir, state.potential.values());
    j["valid"] = state.converged && spec.valid;
    return j;
}

json task_bound(Context& ctx) {
    const PotentialSpec& ps = ctx.config.potential;
    if (ps.type == "curvature") {
        const CurvaturePotential cp = curvature_potential(ctx.mesh, ps.alpha, ps.beta);
        json j = bound_json(bound_report(ctx.mesh, cp.potential));
        j["curvature_total"] = cp.total;
        return j;
    }
    const Potential V = build_potential(ps, ctx.mesh, ctx.config.seed);
    return bound_json(timed(ctx.timings, "bound", [&] { return bound_report(ctx.mesh, V); }));
}

json task_sweep(Context& ctx) {
    const FamilySpec& f = ctx.config.params.family;
    std::vector<Potential> family;
    const int n = ctx.mesh.vertex_count();
    for (double c : f.constants) family.push_back(Potential::constant(n, c, std::max(1.0, std::abs(c))));
    for (std::size_t i = 0; i < f.potentials.size(); ++i) {
        family.push_back(build_potential(f.potentials[i], ctx.mesh, ctx.config.seed + i));
    }

    std::vector<BoundReport> reports =
        timed(ctx.timings, "sweep", [&] {
            std::vector<BoundReport> out;
            for (const auto& V : family) out.push_back(bound_report(ctx.mesh, V));
            return out;
        });

    std::optional<double> best;
    json rows = json::array();
    std::string csv = "index,integral,neg_count,rhs_core,c_emp\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const BoundReport& r = reports[i];
        if (r.c_emp && (!best || *r.c_emp < *best)) best = r.c_emp;
        rows.push_back(bound_json(r));
        csv += std::to_string(i) + "," + format_double(r.integral) + "," + std::to_string(r.neg_count) + "," +
               format_double(r.rhs_core) + "," + (r.c_emp ? format_double(*r.c_emp) : std::string("undefined")) + "\n";
    }
    csv += "min,,,," + (best ? format_double(*best) : std::string("undefined")) + "\n";
    write_text(ctx.dir / "sweep.csv", csv);
    return json{{"rows", rows}, {"min_c_emp", best ? json(*best) : json(nullptr)}, {"count", reports.size()}};
}

json task_perturb(Context& ctx) {
    const TaskParams& p = ctx.config.params;
    const int n = ctx.mesh.vertex_count();
    const Potential V = build_potential(ctx.config.potential, ctx.mesh, ctx.config.seed);
    const Eigen::VectorXd g = build_potential(*p.direction, ctx.mesh, ctx.config.seed + 1).values();
    const SchrodingerSystem sys = assemble(ctx.mesh, V);
    const int count = std::min(n - 1, p.k + 12);
    if (p.k > count) throw ConfigError("params.k: must be below the vertex count");
    const SpectralResult spec = lowest_eigenpairs(sys, count, ctx.eig);
    write_spectrum_csv(ctx.dir, spec);

    const double tol = p.cluster_tol.value_or(default_cluster_tol(spec));
    const Cluster cl = cluster_containing(detect_clusters(spec, tol), p.k - 1);
    if (cl.base_index + cl.multiplicity >= spec.size()) {
        throw NumericalError("perturb: cluster reaches the end of the computed spectrum");
    }
    const ClusterShift shift = q_matrix(spec, cl, g, ctx.mesh);

    json checks = json::array();
    double worst = 0.0;
    const Stiffness S = stiffness_matrix(ctx.mesh);
    for (double t : p.t_values) {
        const SchrodingerSystem st = assemble(S, ctx.mesh, V.values() + t * g);
        const SpectralResult moved = lowest_eigenpairs(st, count, ctx.eig);
        std::vector<double> fd;
        std::vector<double> predicted;
        double err = 0.0;
        for (int i = 1; i <= cl.multiplicity; ++i) {
            const int pos = cl.base_index + i - 1;
            const double slope = (moved.eigenvalues[pos] - spec.eigenvalues[pos]) / t;
            const double pred = (predict_lambda(shift, i, t) - shift.lambda0) / t;
            fd.push_back(slope);
            predicted.push_back(pred);
            err = std::max(err, std::abs(slope - pred));
        }
        worst = std::max(worst, err);
        checks.push_back(json{{"t", t}, {"fd_slopes", fd}, {"predicted_slopes", predicted}, {"max_error", err}});
    }

    std::vector<std::vector<double>> q(shift.multiplicity);
    for (int i = 0; i < shift.multiplicity; ++i) {
        for (int jx = 0; jx < shift.multiplicity; ++jx) q[i].push_back(shift.q_matrix(i, jx));
    }
    return json{{"k", p.k},
                {"cluster", json{{"base_index", cl.base_index}, {"multiplicity", cl.multiplicity}}},
                {"lambda0", shift.lambda0},
                {"alphas", vec_json(shift.alphas)},
                {"q_matrix", q},
                {"checks", checks},
                {"max_error", worst},
                {"valid", spec.valid}};
}

json dispatch(Context& ctx) {
    const std::string& task = ctx.config.task;
    if (task == "spectrum") return task_spectrum(ctx);
    if (task == "count") return task_count(ctx);
    if (task == "maximize") return task_maximize(ctx);
    if (task == "bound") return task_bound(ctx);
    if (task == "sweep") return task_sweep(ctx);
    if (task == "perturb") return task_perturb(ctx);
    throw ConfigError("unknown task '" + task + "'");
}

}  // namespace

RunResult run(const ExperimentConfig& config, std::ostream& log) {
    RunResult out;
    const std::filesystem::path dir = config.output_dir;
    json timings = json::object();
    const auto start = Clock::now();

    auto finish = [&](json result, int code) {
        out.exit_code = code;
        if (!result.contains("valid")) result["valid"] = code == kExitOk;
        result["task"] = config.task;
        result["exit_code"] = code;
        out.result = result;
        timings["total"] = std::chrono::duration<double>(Clock::now() - start).count();
        const json meta{{"config", to_json(config)},
                        {"version", SCHRO_VERSION},
                        {"isa", std::string(kernels::isa_name(kernels::active().isa))},
                        {"timings", timings}};
        write_text(dir / "result.json", result.dump(2) + "\n");
        write_text(dir / "meta.json", meta.dump(2) + "\n");
    };

    std::optional<ManifoldMesh> mesh;
    try {
        mesh.emplace(timed(timings, "mesh", [&] { return build_mesh(config.mesh); }));
        std::filesystem::create_directories(dir);
    } catch (const std::exception& e) {
        log << "config error: " << e.what() << "\n";
        out.exit_code = kExitConfig;
        return out;
    }

    EigenOptions eig;
    eig.seed = config.seed ^ 0x5eedULL;
    Context ctx{config, *mesh, dir, eig, timings};
    try {
        finish(dispatch(ctx), kExitOk);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        out.exit_code = kExitConfig;
    } catch (const InputError& e) {
        log << "config error: " << e.what() << "\n";
        out.exit_code = kExitConfig;
    } catch (const InfeasibleError& e) {
        log << "infeasible: " << e.what() << "\n";
        finish(json{{"error", e.what()}, {"valid", false}}, kExitInfeasible);
    } catch (const std::exception& e) {
        log << "numerical failure: " << e.what() << "\n";
        finish(json{{"error", e.what()}, {"valid", false}}, kExitNumerical);
    }
    return out;
}

}  // namespace schro::cli
