#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cmsep/complex_format.hpp"
#include "cmsep/errors.hpp"
#include "cmsep/report.hpp"
#include "cmsep/run.hpp"

namespace py = pybind11;
using namespace cmsep;

namespace {

py::dict metrics_dict(const VerificationMetrics& m) {
  py::dict d;
  d["b_sup"] = m.b_sup;
  d["ode_sup"] = m.ode_sup;
  d["pole_coeff_max"] = m.pole_coeff_max;
  d["residue_max"] = m.residue_max;
  d["sum_rule"] = m.sum_rule;
  d["constant_term"] = m.constant_term;
  d["bloch_dev"] = m.bloch_dev;
  d["wronskian_min"] = m.wronskian_min ? py::cast(*m.wronskian_min) : py::none();
  d["passes"] = passes(m);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact solutions of the separated three-particle elliptic Calogero-Moser equation";

  auto base = py::register_exception<Error>(m, "CmsepError", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<PoleError>(m, "PoleError", base.ptr());
  py::register_exception<LatticeDegenerateError>(m, "LatticeDegenerateError", base.ptr());
  py::register_exception<DegeneracyError>(m, "DegeneracyError", base.ptr());

  py::class_<PeriodLattice>(m, "PeriodLattice")
      .def(py::init<cplx, cplx>(), py::arg("omega1"), py::arg("omega2"))
      .def_property_readonly("omega1", &PeriodLattice::omega1)
      .def_property_readonly("omega2", &PeriodLattice::omega2)
      .def_property_readonly("tau", &PeriodLattice::tau)
      .def_property_readonly("nome", &PeriodLattice::nome)
      .def_property_readonly("eta1", &PeriodLattice::eta1)
      .def_property_readonly("eta2", &PeriodLattice::eta2)
      .def_property_readonly("g2", &PeriodLattice::g2)
      .def_property_readonly("g3", &PeriodLattice::g3)
      .def("wp", [](const PeriodLattice& l, cplx z) { return wp(z, l); })
      .def("wp_prime", [](const PeriodLattice& l, cplx z) { return wp_prime(z, l); })
      .def("zeta", [](const PeriodLattice& l, cplx z) { return wzeta(z, l); })
      .def("sigma", [](const PeriodLattice& l, cplx z) { return wsigma(z, l); })
      .def("log_sigma", [](const PeriodLattice& l, cplx z) { return log_wsigma(z, l); });

  py::class_<MotionIntegrals>(m, "MotionIntegrals")
      .def(py::init([](cplx h1, cplx h2, cplx h3) { return MotionIntegrals{h1, h2, h3}; }), py::arg("h1"),
           py::arg("h2"), py::arg("h3"))
      .def_readwrite("h1", &MotionIntegrals::h1)
      .def_readwrite("h2", &MotionIntegrals::h2)
      .def_readwrite("h3", &MotionIntegrals::h3);

  py::class_<AnsatzParams>(m, "AnsatzParams")
      .def(py::init([](int g, cplx gamma, std::vector<cplx> lambdas) {
             return AnsatzParams(Coupling(g), gamma, std::move(lambdas));
           }),
           py::arg("g"), py::arg("gamma"), py::arg("lambdas"))
      .def_property_readonly("g", &AnsatzParams::g)
      .def_readwrite("gamma", &AnsatzParams::gamma)
      .def_readwrite("lambdas", &AnsatzParams::lambdas)
      .def("__repr__", [](const AnsatzParams& p) {
        std::string s = "AnsatzParams(g=" + std::to_string(p.g()) + ", gamma=" + format_complex(p.gamma) + ", lambdas=[";
        for (std::size_t i = 0; i < p.lambdas.size(); ++i) s += (i ? ", " : "") + format_complex(p.lambdas[i]);
        return s + "])";
      });

  m.def("psi", &psi, py::arg("x"), py::arg("params"), py::arg("lattice"));
  m.def("bloch_factor", &bloch_factor, py::arg("params"), py::arg("lattice"), py::arg("direction"));
  m.def("eval_B", &eval_B, py::arg("x"), py::arg("params"), py::arg("h"), py::arg("lattice"));
  m.def("ode_residual", &ode_residual, py::arg("x"), py::arg("params"), py::arg("h"), py::arg("lattice"));
  m.def(
      "residuals",
      [](const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat) {
        const ResidualVector r = residuals(p, h, lat);
        return py::make_tuple(r.r0, r.rk, r.norm_inf);
      },
      py::arg("params"), py::arg("h"), py::arg("lattice"), "Returns (r0, [r_1..r_{g-1}], max norm).");
  m.def(
      "gamma_branches",
      [](const std::vector<cplx>& lambdas, const MotionIntegrals& h, int g, const PeriodLattice& lat) {
        return gamma_branches(lambdas, h, Coupling(g), lat);
      },
      py::arg("lambdas"), py::arg("h"), py::arg("g"), py::arg("lattice"));
  m.def(
      "same_solution", &same_solution, py::arg("a"), py::arg("b"), py::arg("lattice"), py::arg("tol") = 1e-10);
  m.def(
      "verify_params",
      [](const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat) {
        return metrics_dict(verify_params(p, h, lat));
      },
      py::arg("params"), py::arg("h"), py::arg("lattice"));
  m.def(
      "solve",
      [](int g, const MotionIntegrals& h, const PeriodLattice& lat, int n_seeds, std::uint64_t seed_rng,
         double tol_residual, unsigned threads) {
        SolverConfig cfg;
        cfg.n_seeds = n_seeds;
        cfg.seed_rng = seed_rng;
        cfg.tol_residual = tol_residual;
        cfg.threads = threads;
        cfg.validate();
        SolveOutcome out;
        {
          py::gil_scoped_release release;
          out = solve(Coupling(g), h, lat, cfg);
          for (auto& s : out.solutions) verify(s, h, lat);
        }
        py::list sols;
        for (const auto& s : out.solutions) {
          py::dict d;
          d["params"] = s.params;
          d["residual"] = s.residuals.norm_inf;
          d["branch"] = s.branch;
          d["seed"] = s.seed;
          d["iterations"] = s.iterations;
          d["hits"] = s.hits;
          d["verified"] = s.verified;
          d["metrics"] = metrics_dict(*s.verification);
          sols.append(d);
        }
        return sols;
      },
      py::arg("g"), py::arg("h"), py::arg("lattice"), py::arg("n_seeds") = 64, py::arg("seed_rng") = 1,
      py::arg("tol_residual") = 1e-12, py::arg("threads") = 0,
      "Multi-start solve; returns the distinct converged solutions with their verification metrics.");
  m.def(
      "run_config",
      [](const std::string& path) {
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_problem(load_config(path));
        }
        return py::make_tuple(r.exit_code, r.report.dump());
      },
      py::arg("path"), "Solve and verify a problem file; returns (exit code, report JSON text).");
  m.def(
      "reverify_report", [](const std::string& text) { return reverify_report(nlohmann::json::parse(text)); },
      py::arg("report_json"));
  m.def("parse_complex", [](const std::string& s) { return parse_complex(s); });
  m.def("format_complex", &format_complex);
}
