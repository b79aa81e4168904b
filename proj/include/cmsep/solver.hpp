#pragma once

// The transcendental system for the ansatz parameters (gamma, lambda_1..lambda_{g-1}).
//
// For k = 1..g-1, with U_k = gamma + sum_{s!=k} zeta(lambda_s - lambda_k) + (g-1) zeta(lambda_k):
//
//   r_k = 3 U_k^2 - 3 (g-1)^2 wp(lambda_k) - 3 sum_{s!=k} wp(lambda_s - lambda_k) - 2i h1 U_k - h2
//
// and with u = gamma + sum_s zeta(lambda_s), P = sum_s wp(lambda_s), P' = sum_s wp'(lambda_s):
//
//   r_0 = u^3 - i h1 u^2 - h2 u + 3(2g-3) u P + (3g-4) P' - i h1 (2g-3) P + i h3
//
// The unknowns are ordered (gamma, lambda_1, ..., lambda_{g-1}); the stacked
// residual is ordered (r_0, r_1, ..., r_{g-1}).

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmsep/ansatz.hpp"
#include "cmsep/metrics.hpp"

namespace cmsep {

struct ResidualVector {
  std::vector<cplx> rk;  // r_1 .. r_{g-1}
  cplx r0;
  double norm_inf = 0.0;
};

/// A user-supplied starting point. Without gamma, one run per cubic branch is made.
struct InitialGuess {
  std::vector<cplx> lambdas;
  std::optional<cplx> gamma;
};

struct SolverConfig {
  double tol_residual = 1e-12;
  int max_iter = 100;
  double damping = 1.0;   // initial step length; halved on rejection
  int max_halvings = 20;
  int n_seeds = 64;
  std::uint64_t seed_rng = 1;
  std::optional<double> delta_sep;  // default 0.05 * |omega1|
  double dedup_tol = 1e-8;
  unsigned threads = 0;   // 0: hardware concurrency
  std::vector<InitialGuess> initial_guesses;  // when non-empty, replaces random seeding

  void validate() const;
  double separation(const PeriodLattice& lat) const {
    return delta_sep ? *delta_sep : default_delta_sep(lat);
  }
};

struct SolutionReport {
  AnsatzParams params;
  ResidualVector residuals;
  int branch = 0;      // index of the cubic root used to seed gamma
  int seed = 0;        // index of the starting point
  int iterations = 0;
  bool converged = false;
  int hits = 1;        // runs that landed on this solution
  std::string status;  // "converged", "max_iter", "stalled", "degenerate", ...
  std::optional<VerificationMetrics> verification;
  bool verified = false;
};

struct SolveOutcome {
  std::vector<SolutionReport> solutions;         // converged, deduplicated
  std::vector<SolutionReport> best_unconverged;  // lowest residuals among failed runs
  int runs = 0;
  int converged_runs = 0;
  std::string diagnostic;
};

cplx residual_k(int k, const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat);
cplx residual_0(const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat);
/// All residuals. Throws DegeneracyError if two shifts are closer than delta_sep on the torus.
ResidualVector residuals(const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat,
                         std::optional<double> delta_sep = std::nullopt);

/// Holomorphic g x g Jacobian of (r_0, r_1..r_{g-1}) in (gamma, lambda_1..lambda_{g-1}).
Eigen::MatrixXcd jacobian(const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat);

/// Roots of the monic cubic u^3 + a2 u^2 + a1 u + a0.
std::array<cplx, 3> solve_monic_cubic(cplx a2, cplx a1, cplx a0);

/// The three values of gamma for which r_0 vanishes at the given shifts,
/// sorted by real part, then imaginary part.
std::array<cplx, 3> gamma_branches(const std::vector<cplx>& lambdas, const MotionIntegrals& h,
                                   Coupling g, const PeriodLattice& lat);

/// Translating lambda_s by a lattice vector W while shifting gamma by -eta(W)
/// leaves psi unchanged up to a constant and every residual invariant. This
/// maps all shifts into the fundamental cell and sorts them by (Re, Im).
AnsatzParams canonicalize(const AnsatzParams& p, const PeriodLattice& lat);

/// Equality modulo lattice translation (with gamma compensation) and permutation of shifts.
bool same_solution(const AnsatzParams& a, const AnsatzParams& b, const PeriodLattice& lat, double tol);

/// One damped Newton run from a starting point.
SolutionReport newton_solve(const AnsatzParams& start, const MotionIntegrals& h, const PeriodLattice& lat,
                            const SolverConfig& cfg);

/// Multi-start solve from random or user-supplied seeds. Nonconvergence is
/// reported through SolveOutcome, never thrown.
SolveOutcome solve(Coupling g, const MotionIntegrals& h, const PeriodLattice& lat, const SolverConfig& cfg);

/// Random shifts in the fundamental cell, separated from 0, from each other
/// and from each other's negatives by delta_sep.
std::vector<std::vector<cplx>> sample_shift_seeds(Coupling g, const PeriodLattice& lat, int count,
                                                  std::uint64_t rng_seed, double delta_sep);

}  // namespace cmsep
