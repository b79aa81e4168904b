#include "cmsep/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

namespace cmsep {

namespace {

void check_pairwise(const AnsatzParams& p, const PeriodLattice& lat, double delta_sep) {
  const auto& l = p.lambdas;
  for (std::size_t s = 0; s < l.size(); ++s) {
    for (std::size_t t = s + 1; t < l.size(); ++t) {
      if (torus_distance(l[s], l[t], lat) < delta_sep) {
        throw DegeneracyError("coincident shifts lambda_" + std::to_string(s + 1) + " and lambda_" +
                              std::to_string(t + 1));
      }
    }
  }
}

// Values needed by every residual and the Jacobian.
struct ShiftTables {
  std::vector<WeierstrassValues> self;                // at lambda_s
  std::vector<std::vector<WeierstrassValues>> diff;   // [s][k] at lambda_s - lambda_k, s != k
};

ShiftTables tables(const AnsatzParams& p, const PeriodLattice& lat) {
  const std::size_t n = p.lambdas.size();
  ShiftTables t;
  t.self.reserve(n);
  for (const cplx& l : p.lambdas) t.self.push_back(weierstrass_all(l, lat));
  t.diff.assign(n, std::vector<WeierstrassValues>(n));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t k = 0; k < s; ++k) {
      const WeierstrassValues v = weierstrass_all(p.lambdas[s] - p.lambdas[k], lat);
      t.diff[s][k] = v;
      // wp even, wp' and zeta odd.
      t.diff[k][s] = {v.wp, -v.wp_prime, -v.zeta};
    }
  }
  return t;
}

cplx u_k(std::size_t k, const AnsatzParams& p, const ShiftTables& t) {
  const double gm1 = p.g() - 1;
  cplx u = p.gamma + gm1 * t.self[k].zeta;
  for (std::size_t s = 0; s < p.lambdas.size(); ++s) {
    if (s != k) u += t.diff[s][k].zeta;
  }
  return u;
}

cplx rk_from(std::size_t k, const AnsatzParams& p, const MotionIntegrals& h, const ShiftTables& t) {
  const double gm1 = p.g() - 1;
  const cplx u = u_k(k, p, t);
  cplx wsum = 0.0;
  for (std::size_t s = 0; s < p.lambdas.size(); ++s) {
    if (s != k) wsum += t.diff[s][k].wp;
  }
  return 3.0 * u * u - 3.0 * gm1 * gm1 * t.self[k].wp - 3.0 * wsum - 2.0 * kI * h.h1 * u - h.h2;
}

struct ZeroTerms {
  cplx u, P, dP;
};

ZeroTerms zero_terms(const AnsatzParams& p, const ShiftTables& t) {
  ZeroTerms z{p.gamma, 0.0, 0.0};
  for (const auto& v : t.self) {
    z.u += v.zeta;
    z.P += v.wp;
    z.dP += v.wp_prime;
  }
  return z;
}

cplx r0_from(const AnsatzParams& p, const MotionIntegrals& h, const ShiftTables& t) {
  const double g = p.g();
  const ZeroTerms z = zero_terms(p, t);
  const cplx u = z.u;
  return u * u * u - kI * h.h1 * u * u - h.h2 * u + 3.0 * (2.0 * g - 3.0) * u * z.P + (3.0 * g - 4.0) * z.dP -
         kI * h.h1 * (2.0 * g - 3.0) * z.P + kI * h.h3;
}

ResidualVector stacked(const AnsatzParams& p, const MotionIntegrals& h, const ShiftTables& t) {
  ResidualVector r;
  r.r0 = r0_from(p, h, t);
  r.norm_inf = std::abs(r.r0);
  for (std::size_t k = 0; k < p.lambdas.size(); ++k) {
    r.rk.push_back(rk_from(k, p, h, t));
    r.norm_inf = std::max(r.norm_inf, std::abs(r.rk.back()));
  }
  if (!std::isfinite(r.norm_inf)) r.norm_inf = std::numeric_limits<double>::infinity();
  return r;
}

AnsatzParams reduce_shifts(const AnsatzParams& p, const PeriodLattice& lat) {
  AnsatzParams out = p;
  for (cplx& l : out.lambdas) {
    const CellReducedPoint c = reduce_to_cell(l, lat);
    l = c.z0;
    out.gamma += lat.eta_of(c.m, c.n);
  }
  return out;
}

bool lex_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

bool passes(const VerificationMetrics& m, const VerificationThresholds& t) {
  return m.b_sup < t.b_sup && m.ode_sup < t.ode_sup && m.pole_coeff_max < t.pole_coeff &&
         m.residue_max < t.residue && m.sum_rule < t.sum_rule && m.constant_term < t.constant_term &&
         m.bloch_dev < t.bloch_dev;
}

void SolverConfig::validate() const {
  if (!(tol_residual > 0.0)) throw InputError("tol_residual must be positive");
  if (max_iter < 1) throw InputError("max_iter must be >= 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw InputError("damping must lie in (0, 1]");
  if (max_halvings < 0) throw InputError("max_halvings must be >= 0");
  if (n_seeds < 1 && initial_guesses.empty()) throw InputError("n_seeds must be >= 1");
  if (delta_sep && !(*delta_sep > 0.0)) throw InputError("delta_sep must be positive");
  if (!(dedup_tol > 0.0)) throw InputError("dedup_tol must be positive");
}

cplx residual_k(int k, const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat) {
  if (k < 1 || k > p.coupling.shifts()) throw InputError("residual index k must lie in 1..g-1");
  check_pairwise(p, lat, default_delta_sep(lat));
  return rk_from(static_cast<std::size_t>(k - 1), p, h, tables(p, lat));
}

cplx residual_0(const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat) {
  check_pairwise(p, lat, default_delta_sep(lat));
  return r0_from(p, h, tables(p, lat));
}

ResidualVector residuals(const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat,
                         std::optional<double> delta_sep) {
  check_pairwise(p, lat, delta_sep ? *delta_sep : default_delta_sep(lat));
  return stacked(p, h, tables(p, lat));
}

Eigen::MatrixXcd jacobian(const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat) {
  const std::size_t n = p.lambdas.size();
  const double g = p.g();
  const double gm1 = g - 1.0;
  const ShiftTables t = tables(p, lat);
  Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n + 1));

  // Row 0.
  const ZeroTerms z = zero_terms(p, t);
  const cplx du = 3.0 * z.u * z.u - 2.0 * kI * h.h1 * z.u - h.h2 + 3.0 * (2.0 * g - 3.0) * z.P;
  J(0, 0) = du;
  for (std::size_t j = 0; j < n; ++j) {
    const cplx w = t.self[j].wp, wd = t.self[j].wp_prime;
    const cplx wdd = 6.0 * w * w - 0.5 * lat.g2();
    J(0, static_cast<Eigen::Index>(j + 1)) = -du * w + 3.0 * (2.0 * g - 3.0) * z.u * wd + (3.0 * g - 4.0) * wdd -
                                            kI * h.h1 * (2.0 * g - 3.0) * wd;
  }

  // Rows 1..n.
  for (std::size_t k = 0; k < n; ++k) {
    const auto row = static_cast<Eigen::Index>(k + 1);
    const cplx a = 6.0 * u_k(k, p, t) - 2.0 * kI * h.h1;
    J(row, 0) = a;
    cplx diag_du = -gm1 * t.self[k].wp;
    cplx diag_rest = -3.0 * gm1 * gm1 * t.self[k].wp_prime;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      const WeierstrassValues& d = t.diff[j][k];  // at lambda_j - lambda_k
      J(row, static_cast<Eigen::Index>(j + 1)) = -a * d.wp - 3.0 * d.wp_prime;
      diag_du += d.wp;
      diag_rest += 3.0 * d.wp_prime;
    }
    J(row, row) = a * diag_du + diag_rest;
  }
  return J;
}

std::array<cplx, 3> solve_monic_cubic(cplx a2, cplx a1, cplx a0) {
  const cplx p = a1 - a2 * a2 / 3.0;
  const cplx q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
  const cplx disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  cplx c = (std::abs(-q / 2.0 + disc) >= std::abs(-q / 2.0 - disc)) ? -q / 2.0 + disc : -q / 2.0 - disc;
  std::array<cplx, 3> roots;
  if (std::abs(c) == 0.0) {
    roots.fill(-a2 / 3.0);
  } else {
    c = std::pow(c, 1.0 / 3.0);
    const cplx w = std::polar(1.0, 2.0 * kPi / 3.0);
    cplx ck = c;
    for (auto& r : roots) {
      r = ck - p / (3.0 * ck) - a2 / 3.0;
      ck *= w;
    }
  }
  // Newton polish on the original polynomial.
  for (auto& r : roots) {
    for (int it = 0; it < 3; ++it) {
      const cplx f = ((r + a2) * r + a1) * r + a0;
      const cplx df = (3.0 * r + 2.0 * a2) * r + a1;
      if (std::abs(df) == 0.0) break;
      const cplx next = r - f / df;
      const cplx fn = ((next + a2) * next + a1) * next + a0;
      if (!(std::abs(fn) < std::abs(f))) break;
      r = next;
    }
  }
  return roots;
}

std::array<cplx, 3> gamma_branches(const std::vector<cplx>& lambdas, const MotionIntegrals& h, Coupling g,
                                   const PeriodLattice& lat) {
  const AnsatzParams p(g, 0.0, lambdas);
  const ShiftTables t = tables(p, lat);
  const ZeroTerms z = zero_terms(p, t);  // z.u = sum zeta(lambda_s) at gamma = 0
  const double gv = g.value();
  const cplx a2 = -kI * h.h1;
  const cplx a1 = -h.h2 + 3.0 * (2.0 * gv - 3.0) * z.P;
  const cplx a0 = (3.0 * gv - 4.0) * z.dP - kI * h.h1 * (2.0 * gv - 3.0) * z.P + kI * h.h3;
  std::array<cplx, 3> roots = solve_monic_cubic(a2, a1, a0);
  for (auto& r : roots) r -= z.u;
  std::sort(roots.begin(), roots.end(), lex_less);
  return roots;
}

AnsatzParams canonicalize(const AnsatzParams& p, const PeriodLattice& lat) {
  AnsatzParams out = reduce_shifts(p, lat);
  std::sort(out.lambdas.begin(), out.lambdas.end(), lex_less);
  return out;
}

bool same_solution(const AnsatzParams& a, const AnsatzParams& b, const PeriodLattice& lat, double tol) {
  if (a.g() != b.g()) return false;
  const double len = std::abs(lat.omega1());
  std::vector<std::size_t> perm(b.lambdas.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    cplx eta_shift = 0.0;
    for (std::size_t s = 0; s < perm.size() && ok; ++s) {
      const cplx d = a.lambdas[s] - b.lambdas[perm[s]];
      const auto [x, y] = lattice_coordinates(d, lat);
      const auto m = std::llround(x), n = std::llround(y);
      const cplx w = static_cast<double>(m) * lat.omega1() + static_cast<double>(n) * lat.omega2();
      ok = std::abs(d - w) <= tol * len;
      eta_shift += lat.eta_of(m, n);
    }
    // a = b translated by W requires gamma_a = gamma_b - eta(W).
    if (ok && std::abs(a.gamma - (b.gamma - eta_shift)) <= tol * (1.0 + std::abs(a.gamma))) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

SolutionReport newton_solve(const AnsatzParams& start, const MotionIntegrals& h, const PeriodLattice& lat,
                            const SolverConfig& cfg) {
  const double sep = cfg.separation(lat);
  SolutionReport rep{canonicalize(start, lat), {}, 0, 0, 0, false, 1, "", std::nullopt, false};

  auto evaluate = [&](const AnsatzParams& p) -> std::optional<ResidualVector> {
    try {
      ResidualVector r = residuals(p, h, lat, sep);
      if (!std::isfinite(r.norm_inf)) return std::nullopt;
      return r;
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  auto current = evaluate(rep.params);
  if (!current) {
    rep.status = "invalid_start";
    rep.residuals.norm_inf = std::numeric_limits<double>::infinity();
    return rep;
  }
  rep.residuals = *current;
  const Eigen::Index n = static_cast<Eigen::Index>(start.lambdas.size() + 1);

  auto newton_step = [&]() -> std::optional<Eigen::VectorXcd> {
    Eigen::VectorXcd r(n);
    r(0) = rep.residuals.r0;
    for (Eigen::Index k = 1; k < n; ++k) r(k) = rep.residuals.rk[static_cast<std::size_t>(k - 1)];
    try {
      const Eigen::MatrixXcd J = jacobian(rep.params, h, lat);
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(J);
      return Eigen::VectorXcd(lu.solve(-r));
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  auto advance = [&](const Eigen::VectorXcd& step, double t) {
    AnsatzParams trial = rep.params;
    trial.gamma += t * step(0);
    for (Eigen::Index k = 1; k < n; ++k) trial.lambdas[static_cast<std::size_t>(k - 1)] += t * step(k);
    trial = canonicalize(trial, lat);
    const auto rt = evaluate(trial);
    if (!rt || rt->norm_inf >= rep.residuals.norm_inf) return false;
    rep.params = trial;
    rep.residuals = *rt;
    return true;
  };

  for (int iter = 0;; ++iter) {
    rep.iterations = iter;
    if (rep.residuals.norm_inf <= cfg.tol_residual) {
      // a couple of full steps past the tolerance, kept only while they help
      for (int extra = 0; extra < 2; ++extra) {
        const auto step = newton_step();
        if (!step || !step->allFinite() || !advance(*step, 1.0)) break;
      }
      try {
        validate(rep.params, lat, sep);
        rep.converged = true;
        rep.status = "converged";
      } catch (const DegeneracyError&) {
        rep.status = "degenerate";
      }
      return rep;
    }
    if (iter >= cfg.max_iter) {
      rep.status = "max_iter";
      return rep;
    }

    const auto step = newton_step();
    if (!step) {
      rep.status = "jacobian_failure";
      return rep;
    }
    if (!step->allFinite()) {
      rep.status = "singular_jacobian";
      return rep;
    }

    double t = cfg.damping;
    bool accepted = false;
    for (int half = 0; half <= cfg.max_halvings && !accepted; ++half, t *= 0.5) accepted = advance(*step, t);
    if (!accepted) {
      rep.iterations = iter + 1;
      rep.status = "stalled";
      return rep;
    }
  }
}

std::vector<std::vector<cplx>> sample_shift_seeds(Coupling g, const PeriodLattice& lat, int count,
                                                  std::uint64_t rng_seed, double delta_sep) {
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<cplx>> seeds;
  seeds.reserve(static_cast<std::size_t>(count));
  const int n = g.shifts();
  for (int i = 0; i < count; ++i) {
    std::vector<cplx> lambdas;
    int attempts = 0;
    while (static_cast<int>(lambdas.size()) < n) {
      if (++attempts > 100000) throw InputError("cannot place shifts with the requested separation");
      const cplx l = unit(rng) * lat.omega1() + unit(rng) * lat.omega2();
      bool ok = distance_to_lattice(l, lat) >= delta_sep;
      for (const cplx& m : lambdas) {
        ok = ok && torus_distance(l, m, lat) >= delta_sep && distance_to_lattice(l + m, lat) >= delta_sep;
      }
      if (ok) lambdas.push_back(l);
    }
    seeds.push_back(std::move(lambdas));
  }
  return seeds;
}

SolveOutcome solve(Coupling g, const MotionIntegrals& h, const PeriodLattice& lat, const SolverConfig& cfg) {
  cfg.validate();
  const double sep = cfg.separation(lat);

  struct Run {
    std::vector<cplx> lambdas;
    std::optional<cplx> gamma;
    int seed;
    int branch;
  };
  std::vector<Run> runs;
  auto add_branches = [&](const std::vector<cplx>& lambdas, int seed, std::optional<cplx> gamma) {
    std::array<cplx, 3> branches{};
    try {
      branches = gamma_branches(lambdas, h, g, lat);
    } catch (const Error&) {
      runs.push_back({lambdas, gamma ? gamma : std::optional<cplx>(cplx(0.0)), seed, 0});
      return;
    }
    if (gamma) {
      int best = 0;
      for (int b = 1; b < 3; ++b) {
        if (std::abs(branches[b] - *gamma) < std::abs(branches[best] - *gamma)) best = b;
      }
      runs.push_back({lambdas, gamma, seed, best});
    } else {
      for (int b = 0; b < 3; ++b) runs.push_back({lambdas, branches[b], seed, b});
    }
  };

  if (!cfg.initial_guesses.empty()) {
    for (std::size_t i = 0; i < cfg.initial_guesses.size(); ++i) {
      const auto& guess = cfg.initial_guesses[i];
      if (static_cast<int>(guess.lambdas.size()) != g.shifts()) {
        throw InputError("initial guess " + std::to_string(i) + " must have g-1 shifts");
      }
      add_branches(guess.lambdas, static_cast<int>(i), guess.gamma);
    }
  } else {
    const auto seeds = sample_shift_seeds(g, lat, cfg.n_seeds, cfg.seed_rng, sep);
    for (std::size_t i = 0; i < seeds.size(); ++i) add_branches(seeds[i], static_cast<int>(i), std::nullopt);
  }

  std::vector<std::optional<SolutionReport>> results(runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      const Run& run = runs[i];
      SolutionReport rep = newton_solve(AnsatzParams(g, *run.gamma, run.lambdas), h, lat, cfg);
      rep.seed = run.seed;
      rep.branch = run.branch;
      results[i] = std::move(rep);
    }
  };
  unsigned nthreads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(std::max<std::size_t>(1, runs.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < nthreads; ++i) pool.emplace_back(worker);
    worker();
  }

  SolveOutcome out;
  out.runs = static_cast<int>(runs.size());
  std::vector<SolutionReport> failed;
  for (auto& r : results) {
    SolutionReport& rep = *r;
    if (rep.converged) {
      ++out.converged_runs;
      auto it = std::find_if(out.solutions.begin(), out.solutions.end(), [&](const SolutionReport& s) {
        return same_solution(s.params, rep.params, lat, cfg.dedup_tol);
      });
      if (it == out.solutions.end()) {
        out.solutions.push_back(std::move(rep));
      } else {
        ++it->hits;
      }
    } else {
      failed.push_back(std::move(rep));
    }
  }
  std::stable_sort(failed.begin(), failed.end(), [](const SolutionReport& a, const SolutionReport& b) {
    return a.residuals.norm_inf < b.residuals.norm_inf;
  });
  if (failed.size() > 5) failed.erase(failed.begin() + 5, failed.end());
  out.best_unconverged = std::move(failed);
  if (out.solutions.empty()) {
    out.diagnostic = "no run converged: " + std::to_string(out.runs) + " runs";
    if (!out.best_unconverged.empty()) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3e", out.best_unconverged.front().residuals.norm_inf);
      out.diagnostic += ", best residual " + std::string(buf);
    }
  } else {
    out.diagnostic = std::to_string(out.solutions.size()) + " distinct solution(s) from " +
                     std::to_string(out.converged_runs) + " converged of " + std::to_string(out.runs) + " runs";
  }
  return out;
}

}  // namespace cmsep
