#include "cmsep/lattice.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace cmsep {

namespace {

// Series and reduction of one argument against the reduced basis.
struct Reduction {
  cplx z0;
  std::int64_t m = 0, n = 0;
};

Reduction reduce_centered(cplx z, const PeriodLattice::Reduced& r) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw InputError("non-finite argument");
  }
  const cplx t = z / r.w1;
  const double b = t.imag() / r.tau.imag();
  const double a = t.real() - b * r.tau.real();
  Reduction out;
  out.m = std::llround(a);
  out.n = std::llround(b);
  out.z0 = z - static_cast<double>(out.m) * r.w1 - static_cast<double>(out.n) * r.w2;
  return out;
}

struct SeriesSums {
  cplx v;      // pi * z0 / w1
  cplx s1;     // sum c_n sin(2nv)
  cplx s2;     // sum n c_n cos(2nv)
  cplx s3;     // sum n^2 c_n sin(2nv)
  cplx slog;   // sum (c_n / n) sin^2(nv)
};

SeriesSums series_sums(cplx z0, const PeriodLattice::Reduced& r) {
  SeriesSums s;
  s.v = kPi * z0 / r.w1;
  const cplx e = std::exp(2.0 * kI * s.v);
  const cplx einv = 1.0 / e;
  cplx ep = 1.0, em = 1.0;
  for (std::size_t k = 0; k < r.c.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    ep *= e;
    em *= einv;
    const cplx c = r.c[k];
    const cplx sin2 = (ep - em) / (2.0 * kI);
    const cplx cos2 = 0.5 * (ep + em);
    s.s1 += c * sin2;
    s.s2 += n * c * cos2;
    s.s3 += n * n * c * sin2;
    s.slog += (c / n) * 0.5 * (1.0 - cos2);
  }
  return s;
}

void check_pole(cplx z0, const PeriodLattice& lat) {
  if (std::abs(z0) < lat.pole_radius()) {
    throw PoleError("argument within pole-exclusion radius of a lattice point");
  }
}

cplx zeta_reduced(cplx z0, const SeriesSums& s, const PeriodLattice::Reduced& r) {
  const cplx cot = std::cos(s.v) / std::sin(s.v);
  return r.e1 * z0 / r.w1 + (kPi / r.w1) * (cot + 4.0 * s.s1);
}

cplx wp_reduced(const SeriesSums& s, const PeriodLattice::Reduced& r) {
  const cplx sn = std::sin(s.v);
  const cplx csc2 = 1.0 / (sn * sn);
  const cplx f = kPi / r.w1;
  return -r.e1 / r.w1 + f * f * (csc2 - 8.0 * s.s2);
}

cplx wp_prime_reduced(const SeriesSums& s, const PeriodLattice::Reduced& r) {
  const cplx sn = std::sin(s.v);
  const cplx cot = std::cos(s.v) / sn;
  const cplx csc2 = 1.0 / (sn * sn);
  const cplx f = kPi / r.w1;
  return f * f * f * (-2.0 * csc2 * cot + 16.0 * s.s3);
}

// log sigma(z0) without the sine factor.
cplx log_sigma_smooth(cplx z0, const SeriesSums& s, const PeriodLattice::Reduced& r) {
  return std::log(r.w1 / kPi) + r.e1 * z0 * z0 / (2.0 * r.w1) + 4.0 * s.slog;
}

// ln of the quasi-periodicity multiplier sigma(z0 + W) / sigma(z0).
cplx quasi_log(const Reduction& red, const PeriodLattice::Reduced& r) {
  const double m = static_cast<double>(red.m), n = static_cast<double>(red.n);
  const cplx w = m * r.w1 + n * r.w2;
  const cplx eta_w = m * r.e1 + n * r.e2;
  const std::int64_t parity = (red.m + red.n + red.m * red.n) & 1;
  return eta_w * (red.z0 + 0.5 * w) + (parity ? kI * kPi : cplx(0.0));
}

}  // namespace

PeriodLattice::PeriodLattice(cplx omega1, cplx omega2) : omega1_(omega1), omega2_(omega2) {
  auto finite = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
  if (!finite(omega1) || !finite(omega2)) {
    throw LatticeDegenerateError("periods must be finite");
  }
  if (omega1 == 0.0 || omega2 == 0.0) {
    throw LatticeDegenerateError("periods must be nonzero");
  }
  const double cross = (omega2 * std::conj(omega1)).imag();
  if (std::abs(cross) <= 1e-12 * std::abs(omega1) * std::abs(omega2)) {
    throw LatticeDegenerateError("periods are collinear");
  }
  if (cross < 0.0) {
    omega2_ = -omega2_;
    negated_ = true;
  }
  tau_ = omega2_ / omega1_;
  nome_ = std::exp(kI * kPi * tau_);
  if (!(std::abs(nome_) < 1.0)) {
    throw Error("internal invariant failure: |nome| >= 1 after orientation");
  }

  // Gauss reduction: w1 = a*omega1 + b*omega2, w2 = c*omega1 + d*omega2.
  cplx w1 = omega1_, w2 = omega2_;
  std::int64_t a = 1, b = 0, c = 0, d = 1;
  for (int iter = 0; iter < 200; ++iter) {
    const std::int64_t k = std::llround((w2 / w1).real());
    w2 -= static_cast<double>(k) * w1;
    c -= k * a;
    d -= k * b;
    if (std::abs(w2) < std::abs(w1) * (1.0 - 1e-12)) {
      const cplx tw = w1;
      w1 = w2;
      w2 = -tw;
      const std::int64_t ta = a, tb = b;
      a = c;
      b = d;
      c = -ta;
      d = -tb;
    } else {
      break;
    }
  }
  red_.w1 = w1;
  red_.w2 = w2;
  red_.tau = w2 / w1;
  red_.q = std::exp(kI * kPi * red_.tau);

  // Lambert coefficients; |q|^n bounds the worst term ratio on the centred cell.
  const double aq = std::abs(red_.q);
  const cplx x = red_.q * red_.q;
  cplx xn = 1.0;
  for (int n = 1; n <= 400; ++n) {
    xn *= x;
    red_.c.push_back(xn / (1.0 - xn));
    const double dn = n;
    if (dn * dn * std::pow(aq, dn) < 1e-18 && n >= 4) break;
  }

  cplx sum_n = 0.0, sum_n3 = 0.0, sum_n5 = 0.0;
  for (std::size_t k = 0; k < red_.c.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    sum_n += n * red_.c[k];
    sum_n3 += n * n * n * red_.c[k];
    sum_n5 += n * n * n * n * n * red_.c[k];
  }
  // Vanishing constant term of wp(z) - 1/z^2 fixes e1.
  red_.e1 = (kPi * kPi / w1) * (1.0 / 3.0 - 8.0 * sum_n);
  // e2 from the series itself, independently of the Legendre relation.
  {
    const cplx half = 0.5 * w2;
    const SeriesSums s = series_sums(half, red_);
    red_.e2 = 2.0 * zeta_reduced(half, s, red_);
  }

  // omega1 = d*w1 - b*w2, omega2 = -c*w1 + a*w2 (unimodular inverse).
  eta1_ = static_cast<double>(d) * red_.e1 - static_cast<double>(b) * red_.e2;
  eta2_ = -static_cast<double>(c) * red_.e1 + static_cast<double>(a) * red_.e2;

  const cplx f = kPi / w1;
  const cplx f2 = f * f;
  g2_ = (4.0 / 3.0) * f2 * f2 * (1.0 + 240.0 * sum_n3);
  g3_ = (8.0 / 27.0) * f2 * f2 * f2 * (1.0 - 504.0 * sum_n5);
}

std::array<double, 2> lattice_coordinates(cplx z, const PeriodLattice& lat) {
  const cplx t = z / lat.omega1();
  const double b = t.imag() / lat.tau().imag();
  const double a = t.real() - b * lat.tau().real();
  return {a, b};
}

CellReducedPoint reduce_to_cell(cplx z, const PeriodLattice& lat) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw InputError("non-finite argument");
  }
  const auto [a, b] = lattice_coordinates(z, lat);
  CellReducedPoint out;
  out.m = static_cast<std::int64_t>(std::floor(a));
  out.n = static_cast<std::int64_t>(std::floor(b));
  auto rebuild = [&] {
    out.z0 = z - static_cast<double>(out.m) * lat.omega1() - static_cast<double>(out.n) * lat.omega2();
  };
  rebuild();
  // Rounding can leave a coordinate at -tiny or exactly 1.
  const auto [a0, b0] = lattice_coordinates(out.z0, lat);
  bool again = false;
  if (a0 < 0.0) { --out.m; again = true; }
  if (a0 >= 1.0) { ++out.m; again = true; }
  if (b0 < 0.0) { --out.n; again = true; }
  if (b0 >= 1.0) { ++out.n; again = true; }
  if (again) rebuild();
  return out;
}

double distance_to_lattice(cplx z, const PeriodLattice& lat) {
  const auto& r = lat.reduced();
  const Reduction red = reduce_centered(z, r);
  double best = std::numeric_limits<double>::infinity();
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      best = std::min(best, std::abs(red.z0 - static_cast<double>(i) * r.w1 - static_cast<double>(j) * r.w2));
    }
  }
  return best;
}

WeierstrassValues weierstrass_all(cplx z, const PeriodLattice& lat) {
  const auto& r = lat.reduced();
  const Reduction red = reduce_centered(z, r);
  check_pole(red.z0, lat);
  const SeriesSums s = series_sums(red.z0, r);
  WeierstrassValues out;
  out.wp = wp_reduced(s, r);
  out.wp_prime = wp_prime_reduced(s, r);
  out.zeta = zeta_reduced(red.z0, s, r) + static_cast<double>(red.m) * r.e1 + static_cast<double>(red.n) * r.e2;
  return out;
}

cplx wp(cplx z, const PeriodLattice& lat) {
  const auto& r = lat.reduced();
  const Reduction red = reduce_centered(z, r);
  check_pole(red.z0, lat);
  return wp_reduced(series_sums(red.z0, r), r);
}

cplx wp_prime(cplx z, const PeriodLattice& lat) {
  const auto& r = lat.reduced();
  const Reduction red = reduce_centered(z, r);
  check_pole(red.z0, lat);
  return wp_prime_reduced(series_sums(red.z0, r), r);
}

cplx wp_second(cplx z, const PeriodLattice& lat) {
  const cplx p = wp(z, lat);
  return 6.0 * p * p - 0.5 * lat.g2();
}

cplx wzeta(cplx z, const PeriodLattice& lat) {
  const auto& r = lat.reduced();
  const Reduction red = reduce_centered(z, r);
  check_pole(red.z0, lat);
  return zeta_reduced(red.z0, series_sums(red.z0, r), r) + static_cast<double>(red.m) * r.e1 +
         static_cast<double>(red.n) * r.e2;
}

cplx log_wsigma(cplx z, const PeriodLattice& lat) {
  const auto& r = lat.reduced();
  const Reduction red = reduce_centered(z, r);
  check_pole(red.z0, lat);
  const SeriesSums s = series_sums(red.z0, r);
  return std::log(std::sin(s.v)) + log_sigma_smooth(red.z0, s, r) + quasi_log(red, r);
}

cplx wsigma(cplx z, const PeriodLattice& lat) {
  const auto& r = lat.reduced();
  const Reduction red = reduce_centered(z, r);
  const SeriesSums s = series_sums(red.z0, r);
  const cplx sn = std::sin(s.v);
  if (sn == 0.0) return 0.0;
  const cplx expo = log_sigma_smooth(red.z0, s, r) + quasi_log(red, r);
  const cplx value = sn * std::exp(expo);
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()) || value == 0.0) {
    throw RangeError("sigma outside binary64 range; use log_wsigma", std::log(sn) + expo);
  }
  return value;
}

}  // namespace cmsep
