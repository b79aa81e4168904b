#pragma once

// Problem description for the batch front-end. Accepted as JSON or as a TOML
// subset with the same layout:
//
//   g = 2
//   h1 = "0.3+0.1i"          # complex literals as strings, plain numbers also accepted
//   h2 = "..."
//   h3 = "..."
//   omega1 = "2"
//   omega2 = "2i"
//
//   [solver]                 # SolverConfig fields
//   tol_residual = 1e-12
//   max_iter = 100
//   n_seeds = 64
//   seed_rng = 1
//
//   [[solver.initial_guesses]]   # optional, replaces random seeding
//   lambdas = ["0.7+0.3i"]
//   gamma = "0.4-0.2i"           # optional
//
//   [outputs]
//   report = "report.json"
//   scan = "scan.csv"
//
//   [scan]                   # optional
//   kind = "real"            # or "cell"
//   quantity = "psi"         # or "B"
//   solution = 0
//   x_min = -2.0
//   x_max = 2.0
//   n = 401
//   # cell grids use nx, ny

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "cmsep/solver.hpp"

namespace cmsep {

struct ScanSpec {
  enum class Kind { real_axis, cell };
  enum class Quantity { psi, B };
  Kind kind = Kind::real_axis;
  Quantity quantity = Quantity::psi;
  int solution = 0;
  double x_min = 0.0, x_max = 1.0;
  int n = 201;
  int nx = 64, ny = 64;

  void validate() const;
};

struct ProblemConfig {
  int g = 2;
  MotionIntegrals h{};
  cplx omega1{2.0, 0.0};
  cplx omega2{0.0, 2.0};
  SolverConfig solver;
  std::optional<std::string> report_path;
  std::optional<std::string> scan_path;
  std::optional<ScanSpec> scan;
};

/// Reads a small TOML subset (tables, arrays of tables, strings, numbers,
/// booleans, single-line arrays) into JSON.
nlohmann::json parse_toml_subset(const std::string& text);

ProblemConfig parse_config(const nlohmann::json& j);

/// Dispatches on the file extension (.toml, otherwise JSON). Throws InputError.
ProblemConfig load_config(const std::filesystem::path& path);

/// Complex value from a JSON string literal or number.
cplx complex_from_json(const nlohmann::json& j, const std::string& what);

}  // namespace cmsep
