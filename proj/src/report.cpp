#include "cmsep/report.hpp"

#include <algorithm>
#include <cmath>

#include "cmsep/complex_format.hpp"

namespace cmsep {

using nlohmann::json;

json to_json(const VerificationMetrics& m) {
  json j = {{"b_sup", m.b_sup},
            {"ode_sup", m.ode_sup},
            {"pole_coeff_max", m.pole_coeff_max},
            {"residue_max", m.residue_max},
            {"sum_rule", m.sum_rule},
            {"constant_term", m.constant_term},
            {"bloch_dev", m.bloch_dev}};
  j["wronskian_min"] = m.wronskian_min ? json(*m.wronskian_min) : json(nullptr);
  return j;
}

VerificationMetrics metrics_from_json(const json& j) {
  VerificationMetrics m;
  m.b_sup = j.at("b_sup").get<double>();
  m.ode_sup = j.at("ode_sup").get<double>();
  m.pole_coeff_max = j.at("pole_coeff_max").get<double>();
  m.residue_max = j.at("residue_max").get<double>();
  m.sum_rule = j.at("sum_rule").get<double>();
  m.constant_term = j.at("constant_term").get<double>();
  m.bloch_dev = j.at("bloch_dev").get<double>();
  if (j.contains("wronskian_min") && !j["wronskian_min"].is_null()) m.wronskian_min = j["wronskian_min"].get<double>();
  return m;
}

json to_json(const ResidualVector& r) {
  json rk = json::array();
  for (const cplx& v : r.rk) rk.push_back(format_complex(v));
  return {{"r0", format_complex(r.r0)},
          {"rk", rk},
          {"norm_inf", std::isfinite(r.norm_inf) ? json(r.norm_inf) : json(nullptr)}};
}

json to_json(const SolutionReport& r) {
  json lambdas = json::array();
  for (const cplx& l : r.params.lambdas) lambdas.push_back(format_complex(l));
  json j = {{"gamma", format_complex(r.params.gamma)},
            {"lambdas", lambdas},
            {"branch", r.branch},
            {"seed", r.seed},
            {"iterations", r.iterations},
            {"hits", r.hits},
            {"converged", r.converged},
            {"status", r.status},
            {"residuals", to_json(r.residuals)},
            {"verified", r.verified}};
  j["verification"] = r.verification ? to_json(*r.verification) : json(nullptr);
  return j;
}

json lattice_to_json(const PeriodLattice& lat) {
  return {{"omega1", format_complex(lat.omega1())}, {"omega2", format_complex(lat.omega2())},
          {"omega2_negated", lat.omega2_negated()}, {"tau", format_complex(lat.tau())},
          {"nome", format_complex(lat.nome())},     {"eta1", format_complex(lat.eta1())},
          {"eta2", format_complex(lat.eta2())},     {"g2", format_complex(lat.g2())},
          {"g3", format_complex(lat.g3())}};
}

AnsatzParams params_from_json(const json& entry, int g) {
  std::vector<cplx> lambdas;
  for (const auto& l : entry.at("lambdas")) lambdas.push_back(complex_from_json(l, "lambda"));
  return AnsatzParams(Coupling(g), complex_from_json(entry.at("gamma"), "gamma"), std::move(lambdas));
}

json build_report(const ProblemConfig& cfg, const PeriodLattice& lat, const SolveOutcome& outcome,
                  const std::optional<IndependenceResult>& independence) {
  const SolverConfig& s = cfg.solver;
  json solver = {{"tol_residual", s.tol_residual}, {"max_iter", s.max_iter},
                 {"damping", s.damping},           {"max_halvings", s.max_halvings},
                 {"n_seeds", s.n_seeds},           {"seed_rng", s.seed_rng},
                 {"delta_sep", s.separation(lat)}, {"dedup_tol", s.dedup_tol},
                 {"initial_guesses", s.initial_guesses.size()}};
  json solutions = json::array();
  int verified = 0;
  for (const auto& r : outcome.solutions) {
    solutions.push_back(to_json(r));
    verified += r.verified ? 1 : 0;
  }
  json failed = json::array();
  for (const auto& r : outcome.best_unconverged) failed.push_back(to_json(r));

  json report = {
      {"schema", kReportSchema},
      {"problem",
       {{"g", cfg.g},
        {"h1", format_complex(cfg.h.h1)},
        {"h2", format_complex(cfg.h.h2)},
        {"h3", format_complex(cfg.h.h3)},
        {"omega1", format_complex(cfg.omega1)},
        {"omega2", format_complex(cfg.omega2)}}},
      {"lattice", lattice_to_json(lat)},
      {"solver", solver},
      {"summary",
       {{"runs", outcome.runs},
        {"converged_runs", outcome.converged_runs},
        {"distinct_solutions", outcome.solutions.size()},
        {"verified_solutions", verified},
        {"diagnostic", outcome.diagnostic}}},
      {"solutions", solutions},
      {"best_unconverged", failed}};
  if (independence) {
    report["independence"] = {{"partial", independence->partial},
                              {"wronskian_min", independence->wronskian_min},
                              {"abel_dev", independence->abel_dev}};
  } else {
    report["independence"] = nullptr;
  }
  return report;
}

double reverify_report(const json& report) {
  if (report.value("schema", 0) != kReportSchema) throw InputError("unsupported report schema");
  const json& pb = report.at("problem");
  const int g = pb.at("g").get<int>();
  const MotionIntegrals h{complex_from_json(pb.at("h1"), "h1"), complex_from_json(pb.at("h2"), "h2"),
                          complex_from_json(pb.at("h3"), "h3")};
  const PeriodLattice lat(complex_from_json(pb.at("omega1"), "omega1"), complex_from_json(pb.at("omega2"), "omega2"));
  double worst = 0.0;
  for (const auto& entry : report.at("solutions")) {
    if (entry.at("verification").is_null()) continue;
    const VerificationMetrics stored = metrics_from_json(entry["verification"]);
    const VerificationMetrics fresh = verify_params(params_from_json(entry, g), h, lat);
    for (auto [a, b] : {std::pair{stored.b_sup, fresh.b_sup}, {stored.ode_sup, fresh.ode_sup},
                        {stored.pole_coeff_max, fresh.pole_coeff_max}, {stored.residue_max, fresh.residue_max},
                        {stored.sum_rule, fresh.sum_rule}, {stored.constant_term, fresh.constant_term},
                        {stored.bloch_dev, fresh.bloch_dev}}) {
      worst = std::max(worst, std::abs(a - b));
    }
  }
  return worst;
}

int write_scan(std::ostream& out, const ScanSpec& spec, const AnsatzParams& p, const MotionIntegrals& h,
               const PeriodLattice& lat) {
  spec.validate();
  out << "x_re,x_im,value_re,value_im,value_abs\n";
  int rows = 0;
  auto emit = [&](cplx x) {
    cplx v;
    try {
      v = spec.quantity == ScanSpec::Quantity::psi ? psi(x, p, lat) : eval_B(x, p, h, lat);
    } catch (const Error&) {
      return;
    }
    out << format_double(x.real()) << ',' << format_double(x.imag()) << ',' << format_double(v.real()) << ','
        << format_double(v.imag()) << ',' << format_double(std::abs(v)) << '\n';
    ++rows;
  };
  if (spec.kind == ScanSpec::Kind::real_axis) {
    for (int i = 0; i < spec.n; ++i) {
      emit(spec.x_min + (spec.x_max - spec.x_min) * i / (spec.n - 1));
    }
  } else {
    for (int j = 0; j < spec.ny; ++j) {
      for (int i = 0; i < spec.nx; ++i) {
        emit((i + 0.5) / spec.nx * lat.omega1() + (j + 0.5) / spec.ny * lat.omega2());
      }
    }
  }
  return rows;
}

}  // namespace cmsep
