#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "schro/geometry.hpp"
#include "schro/maximizer.hpp"
#include "schro/operator.hpp"

namespace schro::cli {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MeshSpec {
    std::string type = "flat_torus";  // flat_torus | icosphere | file
    std::vector<std::pair<int, double>> dims;
    int subdivisions = 0;
    double radius = 1.0;
    std::string path;

    bool operator==(const MeshSpec&) const = default;
};

struct PotentialSpec {
    std::string type = "constant";  // constant | file | curvature | random | bump
    double value = 0.0;             // constant
    std::optional<double> cap;      // explicit L-infinity cap; otherwise max|V| (or 1)
    std::string path;               // file: CSV "vertex,V"
    double alpha = 0.0;             // curvature
    double beta = 0.0;
    std::optional<std::uint64_t> seed;  // random; defaults to the experiment seed
    double amplitude = 1.0;             // random: max|V - offset|; bump: depth
    double offset = 0.0;
    int smoothness = 0;                 // random: neighbour-averaging passes
    double width = 0.5;                 // bump: Gaussian sigma
    int center = -1;                    // bump: centre vertex, -1 = middle of the vertex range

    bool operator==(const PotentialSpec&) const = default;
};

struct FamilySpec {
    std::vector<double> constants;
    std::vector<PotentialSpec> potentials;

    bool empty() const { return constants.empty() && potentials.empty(); }
    bool operator==(const FamilySpec&) const = default;
};

struct TaskParams {
    int k = 1;
    double tol = 1e-8;
    std::optional<double> shift;  // count: guard band, default 1e-9 * spectral scale
    double cap = 10.0;            // maximize
    MaximizerParams maximizer;
    std::vector<double> c_grid;  // maximize audit, default {1e-3 cap, 1e-2 cap}
    int restarts = 0;            // maximize: extra random feasible starts (diagnostic)
    FamilySpec family;           // sweep
    std::optional<PotentialSpec> direction;  // perturb
    std::vector<double> t_values = {1e-2, 1e-3, 1e-4};
    std::optional<double> cluster_tol;

    bool operator==(const TaskParams&) const = default;
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    MeshSpec mesh;
    PotentialSpec potential;
    std::string task = "count";  // spectrum | count | maximize | bound | sweep | perturb
    TaskParams params;
    std::string output_dir = "out";
    std::uint64_t seed = 0;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ConfigError on any schema violation.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

ManifoldMesh build_mesh(const MeshSpec& spec);
/// Resolves a potential spec on a mesh; `seed` feeds random potentials without their own seed.
Potential build_potential(const PotentialSpec& spec, const ManifoldMesh& mesh, std::uint64_t seed);

}  // namespace schro::cli
