#pragma once

#include <filesystem>
#include <ostream>

#include <json.hpp>

#include "schro/config.hpp"

namespace schro::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitInfeasible = 4 };

struct RunResult {
    int exit_code = kExitOk;
    nlohmann::json result;  // task report as written to result.json (empty on config errors)
};

/// Runs one experiment and writes its artifacts into config.output_dir:
/// result.json always (unless the config itself is bad), meta.json, and the task's CSV files.
RunResult run(const ExperimentConfig& config, std::ostream& log);

/// Writes floats with 17 significant digits.
std::string format_double(double x);

}  // namespace schro::cli
