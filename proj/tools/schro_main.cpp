#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "schro/config.hpp"
#include "schro/runner.hpp"

using namespace schro::cli;

namespace {

std::optional<ExperimentConfig> load(const std::string& path) {
    try {
        return load_config(path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return std::nullopt;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Negative-eigenvalue counting and potential maximization for discrete Schrodinger operators"};
    app.set_version_flag("--version", SCHRO_VERSION);
    app.require_subcommand(0, 1);

    std::string validate_path;
    app.add_option("--validate-config", validate_path, "Parse a config and exit")->check(CLI::ExistingFile);

    std::string run_config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    auto* run_cmd = app.add_subcommand("run", "Run one experiment");
    run_cmd->add_option("--config", run_config, "Path to the JSON experiment config")->required();
    run_cmd->add_option("--seed", seed, "Override the config seed");
    run_cmd->add_option("--output", output, "Override the output directory");

    std::string sweep_config;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a bound sweep over a potential family");
    sweep_cmd->add_option("--config", sweep_config, "Path to the JSON experiment config")->required();
    sweep_cmd->add_option("--output", output, "Override the output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (!validate_path.empty()) {
        if (!load(validate_path)) return kExitConfig;
        std::cout << "config ok\n";
        return kExitOk;
    }

    std::optional<ExperimentConfig> config;
    if (*run_cmd) {
        config = load(run_config);
        if (!config) return kExitConfig;
        if (seed) config->seed = *seed;
    } else if (*sweep_cmd) {
        config = load(sweep_config);
        if (!config) return kExitConfig;
        if (config->task != "sweep") {
            std::cerr << "config error: sweep needs task \"sweep\", got \"" << config->task << "\"\n";
            return kExitConfig;
        }
    } else {
        std::cout << app.help();
        return kExitConfig;
    }
    if (output) config->output_dir = *output;

    const RunResult result = run(*config, std::cerr);
    if (result.exit_code == kExitOk) {
        std::cout << "wrote " << config->output_dir << "/result.json\n";
    }
    return result.exit_code;
}
