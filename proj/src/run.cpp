#include "cmsep/run.hpp"

#include <fstream>
#include <iostream>
#include <algorithm>

#include "cmsep/report.hpp"

namespace cmsep {

RunResult run_problem(const ProblemConfig& cfg) {
  const PeriodLattice lat(cfg.omega1, cfg.omega2);
  SolveOutcome outcome = solve(Coupling(cfg.g), cfg.h, lat, cfg.solver);
  for (auto& rep : outcome.solutions) verify(rep, cfg.h, lat);

  std::optional<IndependenceResult> independence;
  if (!outcome.solutions.empty()) {
    independence = independence_check(outcome.solutions, cfg.h, lat);
    if (!independence->partial) {
      for (std::size_t i = 0; i < 3; ++i) {
        auto& v = outcome.solutions[i].verification;
        if (v) v->wronskian_min = independence->wronskian_min;
      }
    }
  }

  RunResult result;
  result.report = build_report(cfg, lat, outcome, independence);
  const bool any_verified = std::any_of(outcome.solutions.begin(), outcome.solutions.end(),
                                        [](const SolutionReport& r) { return r.verified; });
  result.exit_code = any_verified ? kExitOk : kExitNoConvergence;
  return result;
}

int run(const std::filesystem::path& config_path, const RunOverrides& overrides, std::ostream& log, int verbosity) {
  ProblemConfig cfg;
  RunResult result;
  try {
    cfg = load_config(config_path);
    if (overrides.seeds) cfg.solver.n_seeds = *overrides.seeds;
    if (overrides.tol) cfg.solver.tol_residual = *overrides.tol;
    if (overrides.threads) cfg.solver.threads = *overrides.threads;
    if (overrides.out) cfg.report_path = overrides.out;
    if (overrides.scan) {
      cfg.scan_path = overrides.scan;
      if (!cfg.scan) {
        ScanSpec s;
        s.x_min = -std::abs(cfg.omega1);
        s.x_max = std::abs(cfg.omega1);
        s.n = 401;
        cfg.scan = s;
      }
    }
    cfg.solver.validate();
    result = run_problem(cfg);
  } catch (const InputError& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const LatticeDegenerateError& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  const auto& summary = result.report["summary"];
  if (verbosity >= 1) {
    log << "cmsep: " << summary["diagnostic"].get<std::string>() << ", "
        << summary["verified_solutions"].get<int>() << " verified\n";
  }
  if (verbosity >= 2) {
    for (const auto& s : result.report["solutions"]) {
      log << "  gamma=" << s["gamma"].get<std::string>() << " branch=" << s["branch"]
          << " residual=" << s["residuals"]["norm_inf"] << " verified=" << s["verified"] << '\n';
    }
  }

  const std::string text = result.report.dump(2) + "\n";
  if (cfg.report_path) {
    std::ofstream out(*cfg.report_path, std::ios::binary);
    if (!out) {
      log << "error: cannot write report '" << *cfg.report_path << "'\n";
      return kExitInputError;
    }
    out << text;
  } else {
    std::cout << text;
  }

  if (cfg.scan && cfg.scan_path) {
    const auto& sols = result.report["solutions"];
    if (cfg.scan->solution < static_cast<int>(sols.size())) {
      const PeriodLattice lat(cfg.omega1, cfg.omega2);
      const AnsatzParams p = params_from_json(sols[static_cast<std::size_t>(cfg.scan->solution)], cfg.g);
      std::ofstream out(*cfg.scan_path, std::ios::binary);
      if (!out) {
        log << "error: cannot write scan '" << *cfg.scan_path << "'\n";
        return kExitInputError;
      }
      const int rows = write_scan(out, *cfg.scan, p, cfg.h, lat);
      if (verbosity >= 1) log << "cmsep: wrote " << rows << " scan rows to " << *cfg.scan_path << '\n';
    } else if (verbosity >= 1) {
      log << "cmsep: no solution #" << cfg.scan->solution << ", scan skipped\n";
    }
  }
  return result.exit_code;
}

int reverify(const std::filesystem::path& report_path, double tol, std::ostream& log) {
  std::ifstream in(report_path);
  if (!in) {
    log << "error: cannot read report '" << report_path.string() << "'\n";
    return kExitInputError;
  }
  double diff = 0.0;
  try {
    diff = reverify_report(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    log << "error: invalid report: " << e.what() << '\n';
    return kExitInputError;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  log << "cmsep: max metric difference " << diff << '\n';
  return diff <= tol ? kExitOk : kExitMismatch;
}

}  // namespace cmsep
