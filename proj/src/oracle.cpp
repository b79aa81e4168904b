#include "cmsep/oracle.hpp"

#include <cmath>

namespace cmsep {

namespace {

void check_args(cplx z, const PeriodLattice& lat, int cutoff) {
  if (cutoff < 10) throw InputError("oracle cutoff must be >= 10");
  if (distance_to_lattice(z, lat) < lat.pole_radius()) {
    throw PoleError("oracle argument at a lattice point");
  }
}

// Overflow-free forms of cot(pi x), csc^2(pi x) and log sin(pi x) through
// E = exp(2 pi i x) on the half plane where |E| <= 1.
cplx cot_pi(cplx x) {
  if (x.imag() < 0.0) return -cot_pi(-x);
  const cplx e = std::exp(2.0 * kPi * kI * x);
  return kI * (e + 1.0) / (e - 1.0);
}

cplx csc2_pi(cplx x) {
  if (x.imag() < 0.0) x = -x;
  const cplx e = std::exp(2.0 * kPi * kI * x);
  const cplx d = e - 1.0;
  return -4.0 * e / (d * d);
}

// Any branch; results are exponentiated.
cplx log_sin_pi(cplx x) {
  if (x.imag() < 0.0) return kI * kPi + log_sin_pi(-x);
  const cplx e = std::exp(2.0 * kPi * kI * x);
  return -kI * kPi * x + std::log((e - 1.0) / (2.0 * kI));
}

}  // namespace

cplx oracle_wp(cplx z, const PeriodLattice& lat, int cutoff) {
  check_args(z, lat, cutoff);
  const cplx u = z / lat.omega1();
  const cplx tau = lat.tau();
  cplx acc = csc2_pi(u) - 1.0 / 3.0;
  // Add the smallest rows last.
  for (int n = cutoff; n >= 1; --n) {
    for (int sgn : {1, -1}) {
      const cplx c = static_cast<double>(sgn * n) * tau;
      acc += csc2_pi(u - c) - csc2_pi(c);
    }
  }
  const cplx f = kPi / lat.omega1();
  return f * f * acc;
}

cplx oracle_wzeta(cplx z, const PeriodLattice& lat, int cutoff) {
  check_args(z, lat, cutoff);
  const cplx u = z / lat.omega1();
  const cplx tau = lat.tau();
  cplx acc = cot_pi(u) + u * kPi / 3.0;
  for (int n = cutoff; n >= 1; --n) {
    for (int sgn : {1, -1}) {
      const cplx c = static_cast<double>(sgn * n) * tau;
      acc += cot_pi(u - c) + cot_pi(c) + u * kPi * csc2_pi(c);
    }
  }
  return (kPi / lat.omega1()) * acc;
}

cplx oracle_log_wsigma(cplx z, const PeriodLattice& lat, int cutoff) {
  check_args(z, lat, cutoff);
  const cplx u = z / lat.omega1();
  const cplx tau = lat.tau();
  cplx acc = std::log(lat.omega1() / kPi) + log_sin_pi(u) + kPi * kPi * u * u / 6.0;
  for (int n = cutoff; n >= 1; --n) {
    for (int sgn : {1, -1}) {
      const cplx c = static_cast<double>(sgn * n) * tau;
      acc += log_sin_pi(c - u) - log_sin_pi(c) + u * kPi * cot_pi(c) +
             0.5 * u * u * kPi * kPi * csc2_pi(c);
    }
  }
  return acc;
}

cplx oracle_wsigma(cplx z, const PeriodLattice& lat, int cutoff) {
  if (cutoff < 10) throw InputError("oracle cutoff must be >= 10");
  if (distance_to_lattice(z, lat) == 0.0) return 0.0;
  const cplx value = std::exp(oracle_log_wsigma(z, lat, cutoff));
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    throw RangeError("oracle sigma outside binary64 range", oracle_log_wsigma(z, lat, cutoff));
  }
  return value;
}

double oracle_truncation_bound(OracleKind kind, cplx z, const PeriodLattice& lat, int cutoff) {
  const cplx u = z / lat.omega1();
  const double grow = std::exp(2.0 * kPi * std::abs(u.imag()));
  const double q2 = std::pow(std::abs(lat.nome()), 2.0);
  double tail = 0.0;
  double qn = std::pow(q2, cutoff);
  for (int n = cutoff + 1; n <= cutoff + 200; ++n) {
    qn *= q2;
    const double x = grow * qn;
    if (x >= 0.5) return std::numeric_limits<double>::infinity();
    const double row = 8.0 * (1.0 + std::abs(u)) * (1.0 + std::abs(u)) * x / ((1.0 - x) * (1.0 - x));
    tail += 2.0 * row;
    if (row < 1e-30 * tail) break;
  }
  const double f = kPi / std::abs(lat.omega1());
  switch (kind) {
    case OracleKind::wp: return f * f * tail;
    case OracleKind::zeta: return f * tail;
    case OracleKind::log_sigma: return tail;
  }
  return tail;
}

}  // namespace cmsep
