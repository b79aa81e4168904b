#include "cmsep/ansatz.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <string>

namespace cmsep {

Coupling::Coupling(int g) : g_(g) {
  if (g < 2) {
    throw InputError("coupling g must be an integer >= 2 (got " + std::to_string(g) + ")");
  }
}

AnsatzParams::AnsatzParams(Coupling c, cplx gamma_, std::vector<cplx> lambdas_)
    : coupling(c), gamma(gamma_), lambdas(std::move(lambdas_)) {
  if (static_cast<int>(lambdas.size()) != coupling.shifts()) {
    throw InputError("ansatz needs exactly g-1 = " + std::to_string(coupling.shifts()) +
                     " shifts, got " + std::to_string(lambdas.size()));
  }
}

void validate(const AnsatzParams& p, const PeriodLattice& lat, double delta_sep) {
  const auto& l = p.lambdas;
  for (std::size_t s = 0; s < l.size(); ++s) {
    if (distance_to_lattice(l[s], lat) < delta_sep) {
      throw DegeneracyError("shift lambda_" + std::to_string(s + 1) + " is too close to a lattice point");
    }
    for (std::size_t t = s + 1; t < l.size(); ++t) {
      if (torus_distance(l[s], l[t], lat) < delta_sep) {
        throw DegeneracyError("shifts lambda_" + std::to_string(s + 1) + " and lambda_" +
                              std::to_string(t + 1) + " coincide modulo the lattice");
      }
    }
  }
}

double distance_to_singularities(cplx x, const AnsatzParams& p, const PeriodLattice& lat) {
  double d = distance_to_lattice(x, lat);
  for (const cplx& l : p.lambdas) d = std::min(d, distance_to_lattice(x + l, lat));
  return d;
}

cplx log_psi(cplx x, const AnsatzParams& p, const PeriodLattice& lat) {
  const double k = p.g() - 1;
  cplx acc = p.gamma * x - k * log_wsigma(x, lat);
  for (const cplx& l : p.lambdas) {
    // sigma(x + lambda) may vanish; psi is then exactly zero.
    if (distance_to_lattice(x + l, lat) < lat.pole_radius()) {
      return {-std::numeric_limits<double>::infinity(), 0.0};
    }
    acc += log_wsigma(x + l, lat);
  }
  return acc;
}

cplx psi(cplx x, const AnsatzParams& p, const PeriodLattice& lat) {
  const cplx lp = log_psi(x, p, lat);
  if (std::isinf(lp.real()) && lp.real() < 0.0) return 0.0;
  const cplx value = std::exp(lp);
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()) ||
      (value == 0.0 && lp.real() > -std::numeric_limits<double>::infinity())) {
    throw RangeError("psi outside binary64 range", lp);
  }
  return value;
}

AnsatzLocal ansatz_local(cplx x, const AnsatzParams& p, const PeriodLattice& lat) {
  const double k = p.g() - 1;
  const WeierstrassValues at_x = weierstrass_all(x, lat);
  AnsatzLocal out;
  out.wp_x = at_x.wp;
  out.wp_prime_x = at_x.wp_prime;
  out.l1 = p.gamma - k * at_x.zeta;
  out.p = k * at_x.wp;
  out.dp = k * at_x.wp_prime;
  out.l1_mag = std::abs(p.gamma) + k * std::abs(at_x.zeta);
  out.p_mag = k * std::abs(at_x.wp);
  out.dp_mag = k * std::abs(at_x.wp_prime);
  for (const cplx& l : p.lambdas) {
    const WeierstrassValues v = weierstrass_all(x + l, lat);
    out.l1 += v.zeta;
    out.p -= v.wp;
    out.dp -= v.wp_prime;
    out.l1_mag += std::abs(v.zeta);
    out.p_mag += std::abs(v.wp);
    out.dp_mag += std::abs(v.wp_prime);
  }
  return out;
}

LogDerivatives log_derivatives(const AnsatzLocal& a) {
  LogDerivatives d;
  d.d1 = a.l1;
  d.d2 = a.l1 * a.l1 + a.p;
  d.d3 = a.l1 * a.l1 * a.l1 + 3.0 * a.l1 * a.p + a.dp;
  return d;
}

LogDerivatives log_derivatives(cplx x, const AnsatzParams& p, const PeriodLattice& lat) {
  return log_derivatives(ansatz_local(x, p, lat));
}

cplx bloch_factor(const AnsatzParams& p, const PeriodLattice& lat, int direction) {
  if (direction != 1 && direction != 2) throw InputError("Bloch direction must be 1 or 2");
  cplx sum = 0.0;
  for (const cplx& l : p.lambdas) sum += l;
  return std::exp(p.gamma * lat.omega(direction) + lat.eta(direction) * sum);
}

}  // namespace cmsep
