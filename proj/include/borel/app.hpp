#pragma once

#include "borel/problem.hpp"
#include "borel/solver.hpp"

#include <map>
#include <string>
#include <vector>

namespace borel {

struct RunConfig {
    std::string command;       // check, normalize, series, solve-borel, resum, accelerate, harry-dym, oracle-compare
    std::string problem_path;
    std::string output_dir;
    std::map<std::string, std::string> overrides;
};

struct RunResult {
    int exit_code = 0;  // 0 success, 1 validation failure, 2 numerical failure
    std::string summary;
    std::vector<std::string> artifacts;  // file names under output_dir, manifest last
};

const std::vector<std::string>& run_commands();

/// Override keys accepted by a command (the solver keys are shared).
std::vector<std::string> override_keys(const std::string& command);

/// Dispatches one subcommand, writes its artifacts and manifest.json under
/// output_dir, and maps InvalidProblem to 1 and NumericalFailure to 2.
RunResult run(const RunConfig& config);

/// Solver settings from --set overrides (unknown keys are the caller's concern).
SolveConfig solve_config_from(const std::map<std::string, std::string>& overrides, const SolveConfig& base = {});

std::string solve_report_json(const SolveReport& report, const SolveConfig& config);

std::string sha256_hex(const std::string& data);

/// Thread count from BORELSUM_THREADS (default 1); rejects non-positive values.
int threads_from_env();

}  // namespace borel
