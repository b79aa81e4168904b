#pragma once

// Hermite-type ansatz
//
//   psi(x) = exp(gamma*x) * prod_{s=1}^{g-1} sigma(x + lambda_s) / sigma(x)^(g-1)
//
// with normalization constant 1, and its logarithmic derivatives.

#include <vector>

#include "cmsep/lattice.hpp"

namespace cmsep {

/// Integer coupling g >= 2.
class Coupling {
 public:
  explicit Coupling(int g);
  int value() const noexcept { return g_; }
  int shifts() const noexcept { return g_ - 1; }

 private:
  int g_;
};

struct AnsatzParams {
  Coupling coupling;
  cplx gamma;
  std::vector<cplx> lambdas;

  AnsatzParams(Coupling c, cplx gamma_, std::vector<cplx> lambdas_);
  int g() const noexcept { return coupling.value(); }
};

struct MotionIntegrals {
  cplx h1, h2, h3;
};

/// Default separation 0.05 * |omega1| for the distinctness assumptions.
inline double default_delta_sep(const PeriodLattice& lat) { return 0.05 * std::abs(lat.omega1()); }

/// Throws DegeneracyError if two shifts coincide on the torus or a shift sits
/// on the lattice (torus distance below delta_sep).
void validate(const AnsatzParams& p, const PeriodLattice& lat, double delta_sep);

/// Smallest torus distance from x to a singular point of the ansatz (0 and -lambda_s).
double distance_to_singularities(cplx x, const AnsatzParams& p, const PeriodLattice& lat);

/// log psi(x), assembled from log sigma. Branch of the imaginary part is arbitrary.
cplx log_psi(cplx x, const AnsatzParams& p, const PeriodLattice& lat);

/// psi(x). Throws PoleError at lattice points and RangeError (carrying log psi)
/// when the value is not representable.
cplx psi(cplx x, const AnsatzParams& p, const PeriodLattice& lat);

/// Building blocks shared by the log-derivatives, B(x) and the ODE check.
struct AnsatzLocal {
  cplx l1;        // gamma + sum zeta(x + lambda_s) - (g-1) zeta(x)
  cplx p;         // -sum wp(x + lambda_s) + (g-1) wp(x)
  cplx dp;        // -sum wp'(x + lambda_s) + (g-1) wp'(x)
  cplx wp_x;      // wp(x)
  cplx wp_prime_x;
  // Sums of magnitudes of the individual terms of l1, p and dp.
  double l1_mag;
  double p_mag;
  double dp_mag;
};
AnsatzLocal ansatz_local(cplx x, const AnsatzParams& p, const PeriodLattice& lat);

/// psi'/psi, psi''/psi, psi'''/psi.
struct LogDerivatives {
  cplx d1, d2, d3;
};
LogDerivatives log_derivatives(cplx x, const AnsatzParams& p, const PeriodLattice& lat);
LogDerivatives log_derivatives(const AnsatzLocal& local);

/// psi(x + omega_k) / psi(x) = exp(gamma*omega_k + eta_k * sum lambda_s), k in {1, 2}.
cplx bloch_factor(const AnsatzParams& p, const PeriodLattice& lat, int direction);

}  // namespace cmsep
