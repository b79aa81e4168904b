#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "cmsep/config.hpp"

namespace cmsep {

enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitNoConvergence = 3, kExitMismatch = 4 };

/// Command-line overrides; each takes precedence over the configuration file.
struct RunOverrides {
  std::optional<std::string> out;
  std::optional<std::string> scan;
  std::optional<int> seeds;
  std::optional<double> tol;
  std::optional<unsigned> threads;
};

struct RunResult {
  int exit_code = kExitOk;
  nlohmann::json report;
};

/// Solve, verify, and assemble the report for an already-parsed problem. Writes
/// no files. Throws InputError for invalid problems.
RunResult run_problem(const ProblemConfig& cfg);

/// The `solve` command: load, run, write report and scan. `log` receives progress
/// lines according to `verbosity` (0 silent, 1 summary, 2 per solution).
int run(const std::filesystem::path& config_path, const RunOverrides& overrides, std::ostream& log,
        int verbosity = 1);

/// The `verify` command: recompute metrics of a report and compare within `tol`.
int reverify(const std::filesystem::path& report_path, double tol, std::ostream& log);

}  // namespace cmsep
