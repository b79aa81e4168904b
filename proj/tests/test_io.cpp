#include <doctest.h>

#include <sstream>

#include "cmsep/complex_format.hpp"
#include "cmsep/errors.hpp"
#include "cmsep/report.hpp"
#include "cmsep/run.hpp"
#include "support/manufactured.hpp"

using namespace cmsep;

TEST_CASE("complex literals") {
  CHECK(parse_complex("1.5") == cplx(1.5, 0));
  CHECK(parse_complex("2i") == cplx(0, 2));
  CHECK(parse_complex("-i") == cplx(0, -1));
  CHECK(parse_complex("i") == cplx(0, 1));
  CHECK(parse_complex("0.3-0.25i") == cplx(0.3, -0.25));
  CHECK(parse_complex("-1e-3+2.5e+2i") == cplx(-1e-3, 250.0));
  CHECK(parse_complex(" 0.6+2.2j ") == cplx(0.6, 2.2));
  for (const char* bad : {"", "1+", "abc", "1+2", "1+2ii", "1..2", "2i+1i"})
    CHECK_THROWS_WITH_AS(parse_complex(bad), doctest::Contains("malformed complex literal"), InputError);
  for (const cplx z : {cplx(0.1, -0.2), cplx(-3.25e-17, 1e300), cplx(0, 0), cplx(1.0 / 3.0, -2.0 / 7.0)})
    CHECK(parse_complex(format_complex(z)) == z);
  CHECK(format_complex(cplx(0.3, -0.25)) == "0.3-0.25i");
  CHECK(format_complex(cplx(2, 0)) == "2+0i");
}

TEST_CASE("TOML subset") {
  const auto j = parse_toml_subset(R"(
# comment
g = 3
h1 = "0.3+0.1i"   # trailing comment
omega2 = "0.6+2.2i"
flag = true
[solver]
n_seeds = 8
tol_residual = 1e-12
[[solver.initial_guesses]]
lambdas = ["0.7+0.3i", "1.2"]
[[solver.initial_guesses]]
lambdas = ["0.1", "0.2i"]
gamma = "0.5"
[outputs]
report = "r.json"
)");
  CHECK(j["g"] == 3);
  CHECK(j["h1"] == "0.3+0.1i");
  CHECK(j["flag"] == true);
  CHECK(j["solver"]["n_seeds"] == 8);
  CHECK(j["solver"]["tol_residual"].get<double>() == 1e-12);
  REQUIRE(j["solver"]["initial_guesses"].size() == 2);
  CHECK(j["solver"]["initial_guesses"][1]["gamma"] == "0.5");
  CHECK(j["outputs"]["report"] == "r.json");
  CHECK_THROWS_AS(parse_toml_subset("g = "), InputError);
  CHECK_THROWS_AS(parse_toml_subset("[solver"), InputError);
}

TEST_CASE("configuration validation") {
  nlohmann::json j = {{"g", 2}, {"h1", "0.3"}, {"h2", "1"}, {"h3", "0"}};
  CHECK(parse_config(j).g == 2);
  CHECK(parse_config(j).omega2 == cplx(0, 2));
  j["g"] = 1;
  CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("g >= 2"), InputError);
  j["g"] = 2;
  j["h2"] = "1+";
  CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("malformed complex literal"), InputError);
  j["h2"] = 1.0;
  j["scan"] = {{"kind", "real"}, {"x_min", 1.0}, {"x_max", 0.0}};
  CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("inconsistent grid spec"), InputError);
  j["scan"] = {{"kind", "cell"}, {"nx", 0}};
  CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("inconsistent grid spec"), InputError);
  j["scan"] = {{"kind", "spiral"}};
  CHECK_THROWS_AS(parse_config(j), InputError);
  j.erase("scan");
  j["solver"] = {{"initial_guesses", {{{"lambdas", {"0.1", "0.2"}}}}}};
  CHECK_THROWS_AS(parse_config(j), InputError);
  j.erase("solver");
  j.erase("h3");
  CHECK_THROWS_AS(parse_config(j), InputError);
}

TEST_CASE("report round trip and scans") {
  const PeriodLattice lat(2.0, cplx(0, 2));
  const auto m = testing::manufacture(2, {cplx(0.7, 0.3)}, cplx(0.3, 0.1), cplx(0.4, -0.2), lat);
  ProblemConfig cfg;
  cfg.g = 2;
  cfg.h = m.h;
  cfg.solver.n_seeds = 16;
  const RunResult res = run_problem(cfg);
  CHECK(res.exit_code == kExitOk);
  const auto& rep = res.report;
  CHECK(rep["schema"] == kReportSchema);
  REQUIRE(rep["solutions"].size() >= 1);
  const auto& s0 = rep["solutions"][0];
  for (const char* key : {"gamma", "lambdas", "branch", "seed", "iterations", "residuals", "verification", "verified"})
    CHECK(s0.contains(key));
  CHECK(reverify_report(nlohmann::json::parse(rep.dump())) <= 1e-12);

  nlohmann::json tampered = rep;
  tampered["solutions"][0]["verification"]["b_sup"] = 0.5;
  CHECK(reverify_report(tampered) > 0.1);

  const AnsatzParams p = params_from_json(s0, 2);
  CHECK(p.gamma == parse_complex(s0["gamma"].get<std::string>()));

  ScanSpec spec;
  spec.x_min = -1.0;
  spec.x_max = 1.0;
  spec.n = 21;
  std::ostringstream csv;
  const int rows = write_scan(csv, spec, p, m.h, lat);
  CHECK(rows == 20);  // x = 0 is the pole
  CHECK(csv.str().rfind("x_re,x_im,value_re,value_im,value_abs\n", 0) == 0);
  spec.kind = ScanSpec::Kind::cell;
  spec.quantity = ScanSpec::Quantity::B;
  spec.nx = spec.ny = 4;
  std::ostringstream cell;
  CHECK(write_scan(cell, spec, p, m.h, lat) == 16);
}
