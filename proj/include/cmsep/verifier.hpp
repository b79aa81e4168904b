#pragma once

// Independent certification of a candidate solution.
//
// Substituting the ansatz into
//
//   psi''' - i h1 psi'' - (h2 + 3g(g-1) wp) psi' + [i h3 + i g(g-1) h1 wp + g(g-1)(g-2) wp'] psi = 0
//
// and dividing by psi gives the elliptic function B(x). Its poles at 0 and
// -lambda_s are at most simple for any parameters, the simple-pole
// coefficients sum to zero, and at a solution B vanishes identically.
//
// "Scale" for every check is the magnitude of the largest individual additive
// term entering the expression at the same point, so tolerances are dimensionless.

#include <functional>
#include <vector>

#include "cmsep/solver.hpp"

namespace cmsep {

struct ContourSpec {
  cplx center;
  double radius;
  int nodes = 64;

  void validate() const;
};

/// B(x) together with its term scale.
struct BValue {
  cplx value;
  double scale;
};
BValue eval_B_scaled(cplx x, const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat);
cplx eval_B(cplx x, const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat);

/// Laurent coefficient of (x - center)^(-order) by the trapezoid rule on the circle,
/// (1/2 pi i) \oint f(x) (x - center)^(order - 1) dx. order = 0 gives the constant term.
/// Throws ContourError on non-finite samples.
cplx pole_coefficient(const std::function<cplx(cplx)>& f, const ContourSpec& spec, int order);

/// Contour for the singularity at `center` of the ansatz: radius is 0.1 times the
/// distance to the nearest other singular point (0 and -lambda_s modulo the lattice).
ContourSpec pole_contour(cplx center, const AnsatzParams& p, const PeriodLattice& lat, int nodes = 64);

struct PoleStructure {
  double pole_coeff_max = 0.0;  // scaled orders 3 and 2 at all poles
  cplx b0;                      // simple-pole coefficient at x = 0
  std::vector<cplx> bs;         // simple-pole coefficients at x = -lambda_s
  double residue_max = 0.0;     // max scaled |b0|, |b_s|
  double sum_rule = 0.0;        // scaled |b0 + sum b_s|
  cplx constant_term;           // order-0 coefficient of B at x = 0
  double constant_term_scaled = 0.0;
};
PoleStructure check_pole_structure(const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat);

/// Left-hand side of the ODE at x, assembled analytically from the log-derivatives.
cplx ode_residual(cplx x, const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat);

/// |ode_residual| divided by the largest of its additive terms.
double ode_residual_scaled(cplx x, const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat);

/// Max relative deviation of psi(x + omega_k)/psi(x) from bloch_factor(k) over
/// both periods and `points` sample points.
double bloch_check(const AnsatzParams& p, const PeriodLattice& lat, int points = 20, std::uint64_t seed = 7);

/// Uniform points of the fundamental cell at least `clearance` away from every
/// singularity of the ansatz; fixed seed.
std::vector<cplx> regular_sample_points(const AnsatzParams& p, const PeriodLattice& lat, int count,
                                        std::uint64_t seed, double clearance);

/// Wronskian det[psi_i, psi_i', psi_i''] of three ansatz solutions.
cplx wronskian(cplx x, const AnsatzParams& a, const AnsatzParams& b, const AnsatzParams& c,
               const PeriodLattice& lat);

struct IndependenceResult {
  double wronskian_min = 0.0;  // min over points of |W| / prod of column norms
  double abel_dev = 0.0;       // max |W(x_j)/W(x_0) / exp(i h1 (x_j - x_0)) - 1|
  bool partial = false;        // fewer than three converged reports were supplied
};
IndependenceResult independence_check(const std::vector<SolutionReport>& reports, const MotionIntegrals& h,
                                      const PeriodLattice& lat, int points = 5);

struct VerifyOptions {
  int sample_points = 50;
  std::uint64_t seed = 20240917;
  VerificationThresholds thresholds;
};

/// Full metric set for one parameter point.
VerificationMetrics verify_params(const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat,
                                  const VerifyOptions& opt = {});

/// Fills report.verification and report.verified.
void verify(SolutionReport& report, const MotionIntegrals& h, const PeriodLattice& lat,
            const VerifyOptions& opt = {});

}  // namespace cmsep
