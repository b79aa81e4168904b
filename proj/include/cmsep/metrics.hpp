#pragma once

#include <optional>

namespace cmsep {

/// Outcome of certifying one candidate solution. Every magnitude is scaled by
/// the largest single additive term of the expression it measures.
struct VerificationMetrics {
  double b_sup = 0.0;           // max |B(x)| / scale over the sample set
  double ode_sup = 0.0;         // max scaled residual of the third-order ODE
  double pole_coeff_max = 0.0;  // max scaled order-3 and order-2 Laurent coefficient of B
  double residue_max = 0.0;     // max scaled simple-pole coefficient b_0, b_s
  double sum_rule = 0.0;        // scaled |b_0 + sum b_s|
  double constant_term = 0.0;   // scaled order-0 coefficient of B at x = 0
  double bloch_dev = 0.0;       // max relative deviation from the closed-form Bloch factors
  std::optional<double> wronskian_min;
};

/// Pass thresholds applied to a converged solution.
struct VerificationThresholds {
  double b_sup = 1e-8;
  double ode_sup = 1e-8;
  double pole_coeff = 1e-9;
  double residue = 1e-9;
  double sum_rule = 1e-9;
  double constant_term = 1e-8;
  double bloch_dev = 1e-9;
};

bool passes(const VerificationMetrics& m, const VerificationThresholds& t = {});

}  // namespace cmsep
