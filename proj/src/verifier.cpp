#include "cmsep/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace cmsep {

namespace {

double g_factor(int g) { return static_cast<double>(g) * (g - 1); }

// Magnitude of the shortest nonzero lattice vector.
double shortest_period(const PeriodLattice& lat) {
  const auto& r = lat.reduced();
  return std::min({std::abs(r.w1), std::abs(r.w2), std::abs(r.w1 + r.w2), std::abs(r.w1 - r.w2)});
}

std::vector<cplx> singular_points(const AnsatzParams& p) {
  std::vector<cplx> pts{0.0};
  for (const cplx& l : p.lambdas) pts.push_back(-l);
  return pts;
}

struct ContourSamples {
  std::vector<cplx> values;
  double scale = 0.0;  // max term scale over the nodes
};

// Coefficient of (x - c)^(-order) from samples at c + r exp(2 pi i j / N).
cplx trapezoid_coefficient(const std::vector<cplx>& values, double radius, int order) {
  const int n = static_cast<int>(values.size());
  cplx acc = 0.0;
  for (int j = 0; j < n; ++j) {
    const cplx node = std::polar(radius, 2.0 * kPi * j / n);
    acc += values[static_cast<std::size_t>(j)] * std::pow(node, order);
  }
  return acc / static_cast<double>(n);
}

ContourSamples sample_B(const ContourSpec& spec, const AnsatzParams& p, const MotionIntegrals& h,
                        const PeriodLattice& lat) {
  ContourSamples out;
  out.values.reserve(static_cast<std::size_t>(spec.nodes));
  for (int j = 0; j < spec.nodes; ++j) {
    const cplx x = spec.center + std::polar(spec.radius, 2.0 * kPi * j / spec.nodes);
    BValue b;
    try {
      b = eval_B_scaled(x, p, h, lat);
    } catch (const PoleError&) {
      throw ContourError("contour passes through a pole");
    }
    if (!std::isfinite(b.value.real()) || !std::isfinite(b.value.imag())) {
      throw ContourError("non-finite sample on contour");
    }
    out.values.push_back(b.value);
    out.scale = std::max(out.scale, b.scale);
  }
  return out;
}

}  // namespace

void ContourSpec::validate() const {
  if (!(radius > 0.0)) throw ContourError("contour radius must be positive");
  if (nodes < 16) throw ContourError("contour needs at least 16 nodes");
}

BValue eval_B_scaled(cplx x, const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat) {
  const AnsatzLocal a = ansatz_local(x, p, lat);
  const LogDerivatives d = log_derivatives(a);
  const double gg = g_factor(p.g());
  const double g3 = gg * (p.g() - 2);
  const cplx coupling_wp = h.h2 + 3.0 * gg * a.wp_x;
  BValue out;
  out.value = d.d3 - kI * h.h1 * d.d2 - coupling_wp * d.d1 + kI * h.h3 + kI * gg * h.h1 * a.wp_x +
              g3 * a.wp_prime_x;
  const double l1 = a.l1_mag;
  out.scale = std::max({l1 * l1 * l1, 3.0 * l1 * a.p_mag, a.dp_mag, std::abs(h.h1) * l1 * l1,
                        std::abs(h.h1) * a.p_mag, std::abs(h.h2) * l1, 3.0 * gg * std::abs(a.wp_x) * l1,
                        std::abs(h.h3), gg * std::abs(h.h1 * a.wp_x), g3 * std::abs(a.wp_prime_x)});
  return out;
}

cplx eval_B(cplx x, const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat) {
  return eval_B_scaled(x, p, h, lat).value;
}

cplx pole_coefficient(const std::function<cplx(cplx)>& f, const ContourSpec& spec, int order) {
  spec.validate();
  if (order < 0) throw InputError("Laurent order must be >= 0");
  std::vector<cplx> values;
  values.reserve(static_cast<std::size_t>(spec.nodes));
  for (int j = 0; j < spec.nodes; ++j) {
    cplx v;
    try {
      v = f(spec.center + std::polar(spec.radius, 2.0 * kPi * j / spec.nodes));
    } catch (const PoleError&) {
      throw ContourError("contour passes through a pole");
    }
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw ContourError("non-finite sample on contour");
    }
    values.push_back(v);
  }
  return trapezoid_coefficient(values, spec.radius, order);
}

ContourSpec pole_contour(cplx center, const AnsatzParams& p, const PeriodLattice& lat, int nodes) {
  double d = shortest_period(lat);
  for (const cplx& s : singular_points(p)) {
    const double t = torus_distance(center, s, lat);
    if (t > 1e-12 * std::abs(lat.omega1())) d = std::min(d, t);
  }
  ContourSpec spec{center, 0.1 * d, nodes};
  spec.validate();
  return spec;
}

PoleStructure check_pole_structure(const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat) {
  PoleStructure out;
  double scale1 = 0.0;
  const std::vector<cplx> centers = singular_points(p);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const ContourSpec spec = pole_contour(centers[i], p, lat);
    const ContourSamples s = sample_B(spec, p, h, lat);
    const double r = spec.radius;
    for (int order : {3, 2}) {
      const cplx c = trapezoid_coefficient(s.values, r, order);
      out.pole_coeff_max = std::max(out.pole_coeff_max, std::abs(c) / (s.scale * std::pow(r, order)));
    }
    const cplx b = trapezoid_coefficient(s.values, r, 1);
    const double sc1 = s.scale * r;
    scale1 = std::max(scale1, sc1);
    out.residue_max = std::max(out.residue_max, std::abs(b) / sc1);
    if (i == 0) {
      out.b0 = b;
      out.constant_term = trapezoid_coefficient(s.values, r, 0);
      out.constant_term_scaled = std::abs(out.constant_term) / s.scale;
    } else {
      out.bs.push_back(b);
    }
  }
  cplx sum = out.b0;
  for (const cplx& b : out.bs) sum += b;
  out.sum_rule = std::abs(sum) / scale1;
  return out;
}

cplx ode_residual(cplx x, const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat) {
  const AnsatzLocal a = ansatz_local(x, p, lat);
  const LogDerivatives d = log_derivatives(a);
  const cplx y = psi(x, p, lat);
  const double gg = g_factor(p.g());
  const cplx y1 = d.d1 * y, y2 = d.d2 * y, y3 = d.d3 * y;
  return y3 - kI * h.h1 * y2 - (h.h2 + 3.0 * gg * a.wp_x) * y1 +
         (kI * h.h3 + kI * gg * h.h1 * a.wp_x + gg * (p.g() - 2) * a.wp_prime_x) * y;
}

double ode_residual_scaled(cplx x, const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat) {
  // psi factors out of every term; work with psi^(k)/psi to stay in range.
  const AnsatzLocal a = ansatz_local(x, p, lat);
  const LogDerivatives d = log_derivatives(a);
  const double gg = g_factor(p.g());
  const double g3 = gg * (p.g() - 2);
  const cplx t[] = {d.d3,
                    -kI * h.h1 * d.d2,
                    -h.h2 * d.d1,
                    -3.0 * gg * a.wp_x * d.d1,
                    kI * h.h3,
                    kI * gg * h.h1 * a.wp_x,
                    g3 * a.wp_prime_x};
  cplx sum = 0.0;
  double scale = 0.0;
  for (const cplx& v : t) {
    sum += v;
    scale = std::max(scale, std::abs(v));
  }
  return scale > 0.0 ? std::abs(sum) / scale : 0.0;
}

std::vector<cplx> regular_sample_points(const AnsatzParams& p, const PeriodLattice& lat, int count,
                                        std::uint64_t seed, double clearance) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<cplx> pts;
  long attempts = 0;
  while (static_cast<int>(pts.size()) < count) {
    if (++attempts > 1000L * count + 1000) throw InputError("cannot place regular sample points");
    const cplx x = unit(rng) * lat.omega1() + unit(rng) * lat.omega2();
    if (distance_to_singularities(x, p, lat) >= clearance) pts.push_back(x);
  }
  return pts;
}

double bloch_check(const AnsatzParams& p, const PeriodLattice& lat, int points, std::uint64_t seed) {
  const auto xs = regular_sample_points(p, lat, points, seed, 0.1 * std::abs(lat.omega1()));
  cplx lsum = 0.0;
  for (const cplx& l : p.lambdas) lsum += l;
  double dev = 0.0;
  for (int k = 1; k <= 2; ++k) {
    const cplx log_factor = p.gamma * lat.omega(k) + lat.eta(k) * lsum;
    for (const cplx& x : xs) {
      const cplx ratio = std::exp(log_psi(x + lat.omega(k), p, lat) - log_psi(x, p, lat) - log_factor);
      dev = std::max(dev, std::abs(ratio - 1.0));
    }
  }
  return dev;
}

cplx wronskian(cplx x, const AnsatzParams& a, const AnsatzParams& b, const AnsatzParams& c,
               const PeriodLattice& lat) {
  Eigen::Matrix3cd m;
  int col = 0;
  for (const AnsatzParams* p : {&a, &b, &c}) {
    const cplx y = psi(x, *p, lat);
    const LogDerivatives d = log_derivatives(x, *p, lat);
    m(0, col) = y;
    m(1, col) = d.d1 * y;
    m(2, col) = d.d2 * y;
    ++col;
  }
  return m.determinant();
}

IndependenceResult independence_check(const std::vector<SolutionReport>& reports, const MotionIntegrals& h,
                                      const PeriodLattice& lat, int points) {
  IndependenceResult out;
  std::vector<const AnsatzParams*> sols;
  for (const auto& r : reports) {
    if (r.converged && sols.size() < 3) sols.push_back(&r.params);
  }
  if (sols.size() < 3) {
    out.partial = true;
    return out;
  }

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double clearance = 0.1 * std::abs(lat.omega1());
  std::vector<cplx> xs;
  while (static_cast<int>(xs.size()) < points) {
    const cplx x = unit(rng) * lat.omega1() + unit(rng) * lat.omega2();
    bool ok = true;
    for (const auto* p : sols) ok = ok && distance_to_singularities(x, *p, lat) >= clearance;
    if (ok) xs.push_back(x);
  }

  // W = prod psi_i * det[1; L1_i; L2_i]; psi enters only through logs.
  out.wronskian_min = std::numeric_limits<double>::infinity();
  cplx log_w0 = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    Eigen::Matrix3cd m;
    double norms = 1.0;
    cplx log_prod = 0.0;
    for (int i = 0; i < 3; ++i) {
      const LogDerivatives d = log_derivatives(xs[j], *sols[static_cast<std::size_t>(i)], lat);
      m(0, i) = 1.0;
      m(1, i) = d.d1;
      m(2, i) = d.d2;
      norms *= std::sqrt(1.0 + std::norm(d.d1) + std::norm(d.d2));
      log_prod += log_psi(xs[j], *sols[static_cast<std::size_t>(i)], lat);
    }
    const cplx det = m.determinant();
    out.wronskian_min = std::min(out.wronskian_min, std::abs(det) / norms);
    const cplx log_w = log_prod + std::log(det);
    if (j == 0) {
      log_w0 = log_w;
    } else {
      const cplx ratio = std::exp(log_w - log_w0 - kI * h.h1 * (xs[j] - xs[0]));
      out.abel_dev = std::max(out.abel_dev, std::abs(ratio - 1.0));
    }
  }
  return out;
}

VerificationMetrics verify_params(const AnsatzParams& p, const MotionIntegrals& h, const PeriodLattice& lat,
                                  const VerifyOptions& opt) {
  VerificationMetrics m;
  const auto xs = regular_sample_points(p, lat, opt.sample_points, opt.seed, 0.1 * std::abs(lat.omega1()));
  for (const cplx& x : xs) {
    const BValue b = eval_B_scaled(x, p, h, lat);
    m.b_sup = std::max(m.b_sup, std::abs(b.value) / b.scale);
    m.ode_sup = std::max(m.ode_sup, ode_residual_scaled(x, p, h, lat));
  }
  const PoleStructure ps = check_pole_structure(p, h, lat);
  m.pole_coeff_max = ps.pole_coeff_max;
  m.residue_max = ps.residue_max;
  m.sum_rule = ps.sum_rule;
  m.constant_term = ps.constant_term_scaled;
  m.bloch_dev = bloch_check(p, lat);
  return m;
}

void verify(SolutionReport& report, const MotionIntegrals& h, const PeriodLattice& lat, const VerifyOptions& opt) {
  try {
    report.verification = verify_params(report.params, h, lat, opt);
    report.verified = report.converged && passes(*report.verification, opt.thresholds);
  } catch (const Error&) {
    report.verification.reset();
    report.verified = false;
  }
}

}  // namespace cmsep
