#include "schro/config.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "schro/errors.hpp"

namespace schro::cli {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& where) {
    return j.contains(key) ? get<T>(j, key, where) : fallback;
}

MeshSpec parse_mesh(const json& j) {
    const std::string where = "mesh";
    MeshSpec m;
    m.type = get<std::string>(j, "type", where);
    if (m.type == "flat_torus") {
        only_keys(j, {"type", "dims"}, where);
        const json& dims = j.at("dims");
        if (!dims.is_array()) throw ConfigError("mesh.dims: expected [[m, L], ...]");
        for (const auto& d : dims) {
            if (!d.is_array() || d.size() != 2) throw ConfigError("mesh.dims: each entry is [grid_size, side_length]");
            try {
                m.dims.emplace_back(d[0].get<int>(), d[1].get<double>());
            } catch (const json::exception& e) {
                throw ConfigError(std::string("mesh.dims: ") + e.what());
            }
        }
    } else if (m.type == "icosphere") {
        only_keys(j, {"type", "subdivisions", "radius"}, where);
        m.subdivisions = get<int>(j, "subdivisions", where);
        m.radius = get_or<double>(j, "radius", 1.0, where);
    } else if (m.type == "file") {
        only_keys(j, {"type", "path"}, where);
        m.path = get<std::string>(j, "path", where);
    } else {
        throw ConfigError("mesh.type: unknown '" + m.type + "'");
    }
    return m;
}

PotentialSpec parse_potential(const json& j, const std::string& where) {
    PotentialSpec p;
    p.type = get<std::string>(j, "type", where);
    if (p.type == "constant") {
        only_keys(j, {"type", "value", "cap"}, where);
        p.value = get<double>(j, "value", where);
    } else if (p.type == "file") {
        only_keys(j, {"type", "path", "cap"}, where);
        p.path = get<std::string>(j, "path", where);
    } else if (p.type == "curvature") {
        only_keys(j, {"type", "alpha", "beta", "cap"}, where);
        p.alpha = get_or<double>(j, "alpha", 0.0, where);
        p.beta = get_or<double>(j, "beta", 0.0, where);
    } else if (p.type == "random") {
        only_keys(j, {"type", "seed", "amplitude", "offset", "smoothness", "cap"}, where);
        if (j.contains("seed")) p.seed = get<std::uint64_t>(j, "seed", where);
        p.amplitude = get_or<double>(j, "amplitude", 1.0, where);
        p.offset = get_or<double>(j, "offset", 0.0, where);
        p.smoothness = get_or<int>(j, "smoothness", 0, where);
        if (p.smoothness < 0) throw ConfigError(where + ".smoothness: must be >= 0");
    } else if (p.type == "bump") {
        only_keys(j, {"type", "amplitude", "offset", "width", "center", "cap"}, where);
        p.amplitude = get_or<double>(j, "amplitude", 1.0, where);
        p.offset = get_or<double>(j, "offset", 0.0, where);
        p.width = get_or<double>(j, "width", 0.5, where);
        p.center = get_or<int>(j, "center", -1, where);
        if (!(p.width > 0.0)) throw ConfigError(where + ".width: must be positive");
    } else {
        throw ConfigError(where + ".type: unknown '" + p.type + "'");
    }
    if (j.contains("cap")) p.cap = get<double>(j, "cap", where);
    return p;
}

json potential_json(const PotentialSpec& p) {
    json j;
    j["type"] = p.type;
    if (p.type == "constant") {
        j["value"] = p.value;
    } else if (p.type == "file") {
        j["path"] = p.path;
    } else if (p.type == "curvature") {
        j["alpha"] = p.alpha;
        j["beta"] = p.beta;
    } else if (p.type == "random") {
        if (p.seed) j["seed"] = *p.seed;
        j["amplitude"] = p.amplitude;
        j["offset"] = p.offset;
        j["smoothness"] = p.smoothness;
    } else if (p.type == "bump") {
        j["amplitude"] = p.amplitude;
        j["offset"] = p.offset;
        j["width"] = p.width;
        j["center"] = p.center;
    }
    if (p.cap) j["cap"] = *p.cap;
    return j;
}

MaximizerParams parse_maximizer(const json& j) {
    const std::string where = "params.maximizer";
    only_keys(j,
              {"max_iterations", "min_gain", "feasibility_tol", "activation_tol", "push_tol", "backtracking",
               "cluster_tol", "nonneg_c", "frank_wolfe_iterations", "seed"},
              where);
    MaximizerParams m;
    m.max_iterations = get_or(j, "max_iterations", m.max_iterations, where);
    m.min_gain = get_or(j, "min_gain", m.min_gain, where);
    m.feasibility_tol = get_or(j, "feasibility_tol", m.feasibility_tol, where);
    m.activation_tol = get_or(j, "activation_tol", m.activation_tol, where);
    m.push_tol = get_or(j, "push_tol", m.push_tol, where);
    m.backtracking = get_or(j, "backtracking", m.backtracking, where);
    m.cluster_tol = get_or(j, "cluster_tol", m.cluster_tol, where);
    m.nonneg_c = get_or(j, "nonneg_c", m.nonneg_c, where);
    m.frank_wolfe_iterations = get_or(j, "frank_wolfe_iterations", m.frank_wolfe_iterations, where);
    m.seed = get_or<std::uint64_t>(j, "seed", m.seed, where);
    if (m.max_iterations < 1) throw ConfigError(where + ".max_iterations: must be >= 1");
    if (!(m.backtracking > 0.0 && m.backtracking < 1.0)) throw ConfigError(where + ".backtracking: must be in (0, 1)");
    return m;
}

json maximizer_json(const MaximizerParams& m) {
    return json{{"max_iterations", m.max_iterations},
                {"min_gain", m.min_gain},
                {"feasibility_tol", m.feasibility_tol},
                {"activation_tol", m.activation_tol},
                {"push_tol", m.push_tol},
                {"backtracking", m.backtracking},
                {"cluster_tol", m.cluster_tol},
                {"nonneg_c", m.nonneg_c},
                {"frank_wolfe_iterations", m.frank_wolfe_iterations},
                {"seed", m.seed}};
}

FamilySpec parse_family(const json& j) {
    const std::string where = "params.family";
    only_keys(j, {"constants", "range", "potentials"}, where);
    FamilySpec f;
    if (j.contains("constants")) f.constants = get<std::vector<double>>(j, "constants", where);
    if (j.contains("range")) {
        const json& r = j.at("range");
        only_keys(r, {"start", "stop", "step"}, where + ".range");
        const double start = get<double>(r, "start", where + ".range");
        const double stop = get<double>(r, "stop", where + ".range");
        const double step = get_or<double>(r, "step", 1.0, where + ".range");
        if (!(step > 0.0)) throw ConfigError(where + ".range.step: must be positive");
        const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (long long i = 0; i < count; ++i) f.constants.push_back(start + static_cast<double>(i) * step);
    }
    if (j.contains("potentials")) {
        const json& list = j.at("potentials");
        if (!list.is_array()) throw ConfigError(where + ".potentials: expected an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            f.potentials.push_back(parse_potential(list[i], where + ".potentials[" + std::to_string(i) + "]"));
        }
    }
    return f;
}

TaskParams parse_params(const json& j) {
    const std::string where = "params";
    only_keys(j,
              {"k", "tol", "shift", "cap", "maximizer", "c_grid", "restarts", "family", "direction", "t_values",
               "cluster_tol"},
              where);
    TaskParams p;
    p.k = get_or(j, "k", p.k, where);
    p.tol = get_or(j, "tol", p.tol, where);
    if (j.contains("shift")) p.shift = get<double>(j, "shift", where);
    p.cap = get_or(j, "cap", p.cap, where);
    if (j.contains("maximizer")) p.maximizer = parse_maximizer(j.at("maximizer"));
    if (j.contains("c_grid")) p.c_grid = get<std::vector<double>>(j, "c_grid", where);
    p.restarts = get_or(j, "restarts", p.restarts, where);
    if (j.contains("family")) p.family = parse_family(j.at("family"));
    if (j.contains("direction")) p.direction = parse_potential(j.at("direction"), where + ".direction");
    if (j.contains("t_values")) p.t_values = get<std::vector<double>>(j, "t_values", where);
    if (j.contains("cluster_tol")) p.cluster_tol = get<double>(j, "cluster_tol", where);
    if (p.k < 1) throw ConfigError("params.k: must be >= 1");
    if (!(p.cap > 0.0)) throw ConfigError("params.cap: must be positive");
    if (p.shift && *p.shift < 0.0) throw ConfigError("params.shift: must be >= 0");
    if (p.restarts < 0) throw ConfigError("params.restarts: must be >= 0");
    return p;
}

json params_json(const TaskParams& p) {
    json j{{"k", p.k},
           {"tol", p.tol},
           {"cap", p.cap},
           {"maximizer", maximizer_json(p.maximizer)},
           {"c_grid", p.c_grid},
           {"restarts", p.restarts},
           {"t_values", p.t_values}};
    if (p.shift) j["shift"] = *p.shift;
    if (!p.family.empty()) {
        json f = json::object();
        if (!p.family.constants.empty()) f["constants"] = p.family.constants;
        if (!p.family.potentials.empty()) {
            f["potentials"] = json::array();
            for (const auto& q : p.family.potentials) f["potentials"].push_back(potential_json(q));
        }
        j["family"] = f;
    }
    if (p.direction) j["direction"] = potential_json(*p.direction);
    if (p.cluster_tol) j["cluster_tol"] = *p.cluster_tol;
    return j;
}

const std::set<std::string> kTasks = {"spectrum", "count", "maximize", "bound", "sweep", "perturb"};

}  // namespace

ExperimentConfig parse_config(const json& j) {
    only_keys(j, {"schema_version", "mesh", "potential", "task", "params", "output_dir", "seed"}, "config");
    ExperimentConfig c;
    c.schema_version = get<int>(j, "schema_version", "config");
    if (c.schema_version != kSchemaVersion) {
        throw ConfigError("config: unsupported schema_version " + std::to_string(c.schema_version));
    }
    if (!j.contains("mesh")) throw ConfigError("config: missing 'mesh'");
    c.mesh = parse_mesh(j.at("mesh"));
    c.task = get<std::string>(j, "task", "config");
    if (!kTasks.contains(c.task)) throw ConfigError("config.task: unknown '" + c.task + "'");
    if (j.contains("potential")) {
        c.potential = parse_potential(j.at("potential"), "potential");
    } else if (c.task != "sweep" && c.task != "spectrum") {
        if (c.task != "maximize") throw ConfigError("config: missing 'potential'");
    }
    if (j.contains("params")) c.params = parse_params(j.at("params"));
    c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir, "config");
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed, "config");
    if (c.task == "sweep" && c.params.family.empty()) throw ConfigError("params.family: sweep needs a family");
    if (c.task == "perturb" && !c.params.direction) throw ConfigError("params.direction: perturb needs a direction");
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
    json mesh{{"type", c.mesh.type}};
    if (c.mesh.type == "flat_torus") {
        mesh["dims"] = json::array();
        for (const auto& [m, L] : c.mesh.dims) mesh["dims"].push_back(json::array({m, L}));
    } else if (c.mesh.type == "icosphere") {
        mesh["subdivisions"] = c.mesh.subdivisions;
        mesh["radius"] = c.mesh.radius;
    } else {
        mesh["path"] = c.mesh.path;
    }
    return json{{"schema_version", c.schema_version},
                {"mesh", mesh},
                {"potential", potential_json(c.potential)},
                {"task", c.task},
                {"params", params_json(c.params)},
                {"output_dir", c.output_dir},
                {"seed", c.seed}};
}

ManifoldMesh build_mesh(const MeshSpec& spec) {
    if (spec.type == "flat_torus") return build_flat_torus(spec.dims);
    if (spec.type == "icosphere") return build_icosphere(spec.subdivisions, spec.radius);
    return load_mesh(spec.path);
}

namespace {

Eigen::VectorXd read_potential_csv(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open potential file " + path);
    Eigen::VectorXd values = Eigen::VectorXd::Constant(n, std::nan(""));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.starts_with("vertex")) continue;
        std::istringstream row(line);
        int v = -1;
        char comma = 0;
        double x = 0.0;
        if (!(row >> v >> comma >> x) || comma != ',' || v < 0 || v >= n) {
            throw ConfigError("potential file " + path + ": bad row '" + line + "'");
        }
        values[v] = x;
    }
    for (int v = 0; v < n; ++v) {
        if (std::isnan(values[v])) throw ConfigError("potential file " + path + ": missing vertex " + std::to_string(v));
    }
    return values;
}

double squared_distance(const ManifoldMesh& mesh, int a, int b) {
    double d2 = 0.0;
    if (mesh.kind() == MeshKind::FlatTorus) {
        for (int axis = 0; axis < mesh.dim(); ++axis) {
            const double L = mesh.lengths()[axis];
            double d = std::abs(mesh.coordinate(a, axis) - mesh.coordinate(b, axis));
            d = std::min(d, L - d);
            d2 += d * d;
        }
    } else {
        d2 = (mesh.positions()[a] - mesh.positions()[b]).squaredNorm();
    }
    return d2;
}

Eigen::VectorXd smooth(const Eigen::VectorXd& x, const ManifoldMesh& mesh, int passes) {
    const SparseMatrix S = stiffness_matrix(mesh).matrix;
    Eigen::VectorXd cur = x;
    for (int p = 0; p < passes; ++p) {
        Eigen::VectorXd next(cur.size());
        for (int r = 0; r < S.rows(); ++r) {
            double sum = 0.0;
            int count = 0;
            for (SparseMatrix::InnerIterator it(S, r); it; ++it) {
                if (it.col() != r) {
                    sum += cur[it.col()];
                    ++count;
                }
            }
            next[r] = count > 0 ? 0.5 * (cur[r] + sum / count) : cur[r];
        }
        cur = std::move(next);
    }
    return cur;
}

}  // namespace

Potential build_potential(const PotentialSpec& spec, const ManifoldMesh& mesh, std::uint64_t seed) {
    const int n = mesh.vertex_count();
    Eigen::VectorXd values(n);
    if (spec.type == "constant") {
        values.setConstant(spec.value);
    } else if (spec.type == "file") {
        values = read_potential_csv(spec.path, n);
    } else if (spec.type == "curvature") {
        const CurvatureField field = curvature(mesh);
        values = spec.alpha * field.gauss + spec.beta * field.mean;
    } else if (spec.type == "random") {
        std::mt19937_64 rng(spec.seed.value_or(seed));
        std::uniform_real_distribution<double> uniform(-1.0, 1.0);
        for (int v = 0; v < n; ++v) values[v] = uniform(rng);
        values = smooth(values, mesh, spec.smoothness);
        const double peak = values.cwiseAbs().maxCoeff();
        if (peak > 0.0) values *= spec.amplitude / peak;
        values.array() += spec.offset;
    } else if (spec.type == "bump") {
        const int center = spec.center >= 0 ? spec.center : (n / 2 + (mesh.kind() == MeshKind::FlatTorus ? mesh.grid().back() / 2 : 0));
        if (center >= n) throw ConfigError("potential.center: vertex out of range");
        for (int v = 0; v < n; ++v) {
            values[v] = spec.offset - spec.amplitude * std::exp(-squared_distance(mesh, v, center) / (2.0 * spec.width * spec.width));
        }
    } else {
        throw ConfigError("potential.type: unknown '" + spec.type + "'");
    }
    if (spec.cap) return Potential(std::move(values), *spec.cap);
    return Potential::with_auto_cap(std::move(values));
}

}  // namespace schro::cli
