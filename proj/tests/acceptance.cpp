// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "cmsep/complex_format.hpp"
#include "cmsep/errors.hpp"
#include "cmsep/oracle.hpp"
#include "cmsep/report.hpp"
#include "cmsep/verifier.hpp"
#include "support/manufactured.hpp"

using namespace cmsep;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const char* title, bool ok, double seconds, const std::string& detail) {
  std::printf("criterion %d %-34s %s  (%.2f s)  %s\n", id, title, ok ? "PASS" : "FAIL", seconds, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class F>
void criterion(int id, const char* title, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, title, ok, dt, detail);
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

std::vector<cplx> cell_points(const PeriodLattice& lat, int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<cplx> pts;
  while (static_cast<int>(pts.size()) < n) {
    const cplx z = u(rng) * lat.omega1() + u(rng) * lat.omega2();
    if (distance_to_lattice(z, lat) > 0.05) pts.push_back(z);
  }
  return pts;
}

AnsatzParams random_params(int g, std::mt19937_64& rng, const PeriodLattice& lat) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    std::vector<cplx> lam;
    for (int s = 0; s < g - 1; ++s) lam.push_back(u(rng) * lat.omega1() + u(rng) * lat.omega2());
    AnsatzParams p(Coupling(g), cplx(2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0), lam);
    try {
      validate(p, lat, 0.2);
      return p;
    } catch (const DegeneracyError&) {
    }
  }
}

const PeriodLattice kSquare(2.0, cplx(0, 2));
const std::array<PeriodLattice, 3> kLattices{PeriodLattice(2.0, cplx(0, 2)), PeriodLattice(2.0, cplx(0, 3)),
                                             PeriodLattice(2.0, cplx(0.6, 2.2))};

struct Recovery {
  testing::Manufactured problem;
  SolveOutcome outcome;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(CMSEP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main() {
  criterion(1, "kernel vs lattice oracles", [](std::string& d) {
    double worst = 0.0;
    for (const auto& lat : kLattices) {
      for (const cplx z : cell_points(lat, 200, 101)) {
        worst = std::max(worst, std::abs(oracle_wp(z, lat, 60) / wp(z, lat) - 1.0));
        worst = std::max(worst, std::abs(oracle_wzeta(z, lat, 60) / wzeta(z, lat) - 1.0));
        worst = std::max(worst, std::abs(oracle_wsigma(z, lat, 60) / wsigma(z, lat) - 1.0));
      }
    }
    d = "max rel err " + sci(worst) + " (tol 1e-9)";
    return worst < 1e-9;
  });

  criterion(2, "structural identities", [](std::string& d) {
    double legendre = 0.0, ode = 0.0, chain = 0.0;
    const double h = 1e-5;
    for (const auto& lat : kLattices) {
      legendre = std::max(legendre, std::abs(lat.eta1() * lat.omega2() - lat.eta2() * lat.omega1() - 2.0 * kPi * kI));
      for (const cplx z : cell_points(lat, 50, 202)) {
        const cplx p = wp(z, lat), dp = wp_prime(z, lat);
        const double scale =
            std::max({std::abs(dp * dp), std::abs(4.0 * p * p * p), std::abs(lat.g2() * p), std::abs(lat.g3())});
        ode = std::max(ode, std::abs(dp * dp - 4.0 * p * p * p + lat.g2() * p + lat.g3()) / scale);
        const cplx dls = (log_wsigma(z + h, lat) - log_wsigma(z - h, lat)) / (2.0 * h);
        const cplx dz = (wzeta(z + h, lat) - wzeta(z - h, lat)) / (2.0 * h);
        chain = std::max(chain, std::abs(dls - wzeta(z, lat)) / std::max(1.0, std::abs(wzeta(z, lat))));
        chain = std::max(chain, std::abs(dz + p) / std::abs(p));
      }
    }
    d = "legendre " + sci(legendre) + " (1e-12), wp ode " + sci(ode) + " (1e-9), fd chain " + sci(chain) + " (1e-7)";
    return legendre < 1e-12 && ode < 1e-9 && chain < 1e-7;
  });

  criterion(3, "pole structure of B, non-solutions", [](std::string& d) {
    std::mt19937_64 rng(303);
    const MotionIntegrals h{cplx(0.3, 0.1), cplx(-1.2, 0.4), cplx(0.5, 0.7)};
    double coeff = 0.0, sum = 0.0;
    for (int g = 2; g <= 4; ++g) {
      for (int i = 0; i < 20; ++i) {
        const auto ps = check_pole_structure(random_params(g, rng, kLattices[2]), h, kLattices[2]);
        coeff = std::max(coeff, ps.pole_coeff_max);
        sum = std::max(sum, ps.sum_rule);
      }
    }
    d = "orders 3,2 " + sci(coeff) + ", sum rule " + sci(sum) + " (tol 1e-9)";
    return coeff < 1e-9 && sum < 1e-9;
  });

  std::vector<Recovery> recovered;
  criterion(4, "manufactured recovery g = 2, 3", [&](std::string& d) {
    const cplx h1(0.3, 0.1);
    recovered.push_back({testing::manufacture(2, {cplx(0.7, 0.3)}, h1, cplx(0.4, -0.2), kSquare), {}});
    recovered.push_back({testing::manufacture(3, {cplx(0.7, 0.3), cplx(1.2, 1.4)}, h1, std::nullopt, kSquare), {}});
    bool ok = true;
    for (auto& r : recovered) {
      SolverConfig cfg;
      cfg.n_seeds = 64;
      r.outcome = solve(r.problem.params.coupling, r.problem.h, kSquare, cfg);
      for (auto& s : r.outcome.solutions) verify(s, r.problem.h, kSquare);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& s : r.outcome.solutions) {
        for (double tol = 1e-16; tol <= 1.0; tol *= 10.0) {
          if (same_solution(s.params, r.problem.params, kSquare, tol)) {
            best = std::min(best, tol);
            break;
          }
        }
      }
      d += "g=" + std::to_string(r.problem.params.g()) + ": " + std::to_string(r.outcome.solutions.size()) +
           " solutions, planted within " + sci(best) + "; ";
      ok = ok && best <= 1e-10;
    }
    d += "(tol 1e-10)";
    return ok;
  });

  criterion(5, "Liouville certification", [&](std::string& d) {
    double b = 0.0, ode = 0.0;
    int n = 0;
    for (const auto& r : recovered) {
      for (const auto& s : r.outcome.solutions) {
        b = std::max(b, s.verification->b_sup);
        ode = std::max(ode, s.verification->ode_sup);
        ++n;
      }
    }
    std::mt19937_64 rng(505);
    const auto& m = recovered.at(0).problem;
    double control = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 5; ++i) {
      const auto metrics = verify_params(random_params(2, rng, kSquare), m.h, kSquare);
      control = std::min(control, std::min(metrics.b_sup, metrics.ode_sup));
    }
    d = std::to_string(n) + " solutions: b_sup " + sci(b) + ", ode " + sci(ode) + " (1e-8); control min " +
        sci(control) + " (> 1e-3)";
    return n > 0 && b < 1e-8 && ode < 1e-8 && control > 1e-3;
  });

  criterion(6, "three branches, Abel identity", [&](std::string& d) {
    const auto& r = recovered.at(0);
    const auto ind = independence_check(r.outcome.solutions, r.problem.h, kSquare);
    d = std::to_string(r.outcome.solutions.size()) + " solutions, abel dev " + sci(ind.abel_dev) +
        " (1e-7), wronskian_min " + sci(ind.wronskian_min) + " (reported; expected > 1e-6)";
    return r.outcome.solutions.size() >= 3 && !ind.partial && ind.abel_dev < 1e-7;
  });

  criterion(7, "Bloch quasi-periodicity", [&](std::string& d) {
    double dev = 0.0;
    for (const auto& r : recovered)
      for (const auto& s : r.outcome.solutions) dev = std::max(dev, bloch_check(s.params, kSquare, 20));
    d = "max rel dev " + sci(dev) + " (tol 1e-9)";
    return dev < 1e-9;
  });

  criterion(8, "determinism and report round trip", [&](std::string& d) {
    const fs::path dir = fs::temp_directory_path() / ("cmsep_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const auto& m = recovered.at(1).problem;
    std::ofstream(dir / "p.toml") << "g = 3\nh1 = \"" << format_complex(m.h.h1) << "\"\nh2 = \""
                                  << format_complex(m.h.h2) << "\"\nh3 = \"" << format_complex(m.h.h3)
                                  << "\"\n[solver]\nn_seeds = 32\nseed_rng = 7\n";
    const std::string cfg = (dir / "p.toml").string();
    const int e1 = cli("solve " + cfg + " --out " + (dir / "a.json").string() + " --threads 1");
    const int e2 = cli("solve " + cfg + " --out " + (dir / "b.json").string());
    const std::string a = slurp(dir / "a.json");
    const bool identical = !a.empty() && a == slurp(dir / "b.json");
    const double diff = reverify_report(nlohmann::json::parse(a));
    const int ev = cli("verify " + (dir / "a.json").string());
    fs::remove_all(dir);
    d = std::string("exit codes ") + std::to_string(e1) + "," + std::to_string(e2) + ", byte-identical " +
        (identical ? "yes" : "no") + ", reverify diff " + sci(diff) + " (1e-12), verify exit " + std::to_string(ev);
    return e1 == 0 && e2 == 0 && identical && diff <= 1e-12 && ev == 0;
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "PASSED", failures);
  return failures ? 1 : 0;
}
