#pragma once

// Weierstrass elliptic functions on a period lattice L = Z*omega1 + Z*omega2.
//
// Convention: omega1 and omega2 are FULL periods. The quasi-period constants
// are eta_k = 2*zeta(omega_k / 2), so that
//
//   zeta(z + omega_k)  = zeta(z) + eta_k
//   sigma(z + omega_k) = -sigma(z) * exp(eta_k * (z + omega_k / 2))
//   eta1*omega2 - eta2*omega1 = 2*pi*i            (Legendre)
//
// Readers used to half-periods w_k = omega_k / 2 and eta'_k = zeta(w_k) get
// w_k = omega_k / 2 and eta'_k = eta_k / 2.
//
// Evaluation reduces the argument to the cell centred on the origin of a
// reduced basis of the lattice and sums the q-series of the logarithmic
// derivative of theta_1. All functions are pure; a PeriodLattice is immutable.

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "cmsep/errors.hpp"

namespace cmsep {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr cplx kI{0.0, 1.0};

class PeriodLattice {
 public:
  /// Builds the lattice generated by two full periods. If Im(omega2/omega1) < 0
  /// omega2 is negated, which leaves the lattice unchanged.
  /// Throws LatticeDegenerateError for zero or collinear periods.
  PeriodLattice(cplx omega1, cplx omega2);

  cplx omega1() const noexcept { return omega1_; }
  cplx omega2() const noexcept { return omega2_; }
  cplx omega(int k) const { return k == 1 ? omega1_ : omega2_; }
  cplx tau() const noexcept { return tau_; }
  cplx nome() const noexcept { return nome_; }
  cplx eta1() const noexcept { return eta1_; }
  cplx eta2() const noexcept { return eta2_; }
  cplx eta(int k) const { return k == 1 ? eta1_ : eta2_; }
  cplx g2() const noexcept { return g2_; }
  cplx g3() const noexcept { return g3_; }

  /// True if the constructor negated omega2 to orient the basis.
  bool omega2_negated() const noexcept { return negated_; }

  /// Points closer than this to a lattice point are treated as poles.
  double pole_radius() const noexcept { return 1e-10 * std::abs(omega1_); }

  /// Quasi-period increment of zeta for the lattice vector m*omega1 + n*omega2.
  cplx eta_of(std::int64_t m, std::int64_t n) const {
    return static_cast<double>(m) * eta1_ + static_cast<double>(n) * eta2_;
  }

  // Internal reduced basis and series data; exposed for the evaluators.
  struct Reduced {
    cplx w1, w2;          // reduced basis, tau' in the fundamental domain
    cplx tau;             // w2 / w1
    cplx q;               // exp(i*pi*tau')
    cplx e1, e2;          // 2*zeta(w1/2), 2*zeta(w2/2)
    std::vector<cplx> c;  // c[n-1] = q^(2n) / (1 - q^(2n))
  };
  const Reduced& reduced() const noexcept { return red_; }

 private:
  cplx omega1_, omega2_, tau_, nome_, eta1_, eta2_, g2_, g3_;
  bool negated_ = false;
  Reduced red_;
};

/// Free-function spelling of the constructor.
inline PeriodLattice make_lattice(cplx omega1, cplx omega2) { return PeriodLattice(omega1, omega2); }

/// z = z0 + m*omega1 + n*omega2 with z0 in the half-open cell {a*omega1 + b*omega2 : a,b in [0,1)}.
struct CellReducedPoint {
  cplx z0;
  std::int64_t m = 0;
  std::int64_t n = 0;
};

CellReducedPoint reduce_to_cell(cplx z, const PeriodLattice& lat);

/// Real coordinates (a, b) with z = a*omega1 + b*omega2.
std::array<double, 2> lattice_coordinates(cplx z, const PeriodLattice& lat);

/// Distance from z to the nearest point of the lattice.
double distance_to_lattice(cplx z, const PeriodLattice& lat);

/// Distance between a and b on the torus C / L.
inline double torus_distance(cplx a, cplx b, const PeriodLattice& lat) {
  return distance_to_lattice(a - b, lat);
}

cplx wp(cplx z, const PeriodLattice& lat);
cplx wp_prime(cplx z, const PeriodLattice& lat);
/// wp''(z) = 6 wp^2 - g2/2.
cplx wp_second(cplx z, const PeriodLattice& lat);
cplx wzeta(cplx z, const PeriodLattice& lat);

/// sigma(z). Throws RangeError when the value leaves binary64 range; use log_wsigma then.
cplx wsigma(cplx z, const PeriodLattice& lat);

/// log sigma(z). The imaginary part is assembled from the principal log of the
/// sine factor of the reduced argument plus the quasi-periodicity phase; it is
/// continuous inside a cell but jumps by multiples of 2*pi*i across cell edges
/// and branch cuts. Only exp(log_wsigma) and differences taken locally are
/// meaningful. Throws PoleError at lattice points.
cplx log_wsigma(cplx z, const PeriodLattice& lat);

/// wp, wp', zeta at one point sharing a single argument reduction.
struct WeierstrassValues {
  cplx wp, wp_prime, zeta;
};
WeierstrassValues weierstrass_all(cplx z, const PeriodLattice& lat);

}  // namespace cmsep
