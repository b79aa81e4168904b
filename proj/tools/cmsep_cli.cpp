// cmsep: solve and certify the separated third-order equation of the
// three-particle elliptic Calogero-Moser problem at integer coupling.
//
//   cmsep solve <config.toml|config.json> [--out report.json] [--scan scan.csv] [--seeds N] [--tol X]
//   cmsep verify <report.json> [--tol X]
//
// CMSEP_LOG=0|1|2 sets stderr verbosity.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "cmsep/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Exact solutions of the separated Calogero-Moser equation at integer coupling"};
  app.require_subcommand(1);

  std::string config_path;
  cmsep::RunOverrides overrides;
  auto* solve = app.add_subcommand("solve", "Solve, verify and write a JSON report");
  solve->add_option("config", config_path, "Problem file (.toml or .json)")->required();
  solve->add_option("--out", overrides.out, "Report path (default: stdout or outputs.report)");
  solve->add_option("--scan", overrides.scan, "CSV scan path");
  solve->add_option("--seeds", overrides.seeds, "Number of random starting points");
  solve->add_option("--tol", overrides.tol, "Residual tolerance");
  solve->add_option("--threads", overrides.threads, "Worker threads (0: all cores)");

  std::string report_path;
  double verify_tol = 1e-12;
  auto* verify = app.add_subcommand("verify", "Recompute the metrics stored in a report");
  verify->add_option("report", report_path, "Report written by `solve`")->required();
  verify->add_option("--tol", verify_tol, "Allowed absolute difference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cmsep::kExitInputError;
  }

  int verbosity = 1;
  if (const char* env = std::getenv("CMSEP_LOG")) verbosity = std::atoi(env);

  if (*solve) return cmsep::run(config_path, overrides, std::cerr, verbosity);
  return cmsep::reverify(report_path, verify_tol, std::cerr);
}
