#include <doctest.h>

#include <random>

#include "cmsep/ansatz.hpp"
#include "cmsep/errors.hpp"
#include "cmsep/oracle.hpp"
#include "support/stencils.hpp"

using namespace cmsep;

namespace {

const PeriodLattice kSquare(2.0, cplx(0, 2));
const PeriodLattice kGeneric(2.0, cplx(0.6, 2.2));

std::vector<cplx> regular_points(const AnsatzParams& p, const PeriodLattice& lat, int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<cplx> pts;
  while (static_cast<int>(pts.size()) < n) {
    const cplx z = u(rng) * lat.omega1() + u(rng) * lat.omega2();
    if (distance_to_singularities(z, p, lat) > 0.2) pts.push_back(z);
  }
  return pts;
}

}  // namespace

TEST_CASE("coupling and parameter validation") {
  CHECK_THROWS_AS(Coupling(1), InputError);
  CHECK(Coupling(4).shifts() == 3);
  CHECK_THROWS_AS(AnsatzParams(Coupling(3), 0.0, {0.5}), InputError);
  const double sep = default_delta_sep(kSquare);
  CHECK_THROWS_AS(validate(AnsatzParams(Coupling(3), 0.0, {0.5, 0.5 + 2.0}), kSquare, sep), DegeneracyError);
  CHECK_THROWS_AS(validate(AnsatzParams(Coupling(2), 0.0, {cplx(0, 2)}), kSquare, sep), DegeneracyError);
  CHECK_NOTHROW(validate(AnsatzParams(Coupling(3), 0.0, {0.5, cplx(0.3, 1.0)}), kSquare, sep));
}

TEST_CASE("psi against the oracle sigma product") {
  const AnsatzParams p(Coupling(2), 0.0, {0.7});
  for (const cplx x : regular_points(p, kSquare, 10, 3)) {
    const cplx ref = oracle_wsigma(x + 0.7, kSquare, 60) / oracle_wsigma(x, kSquare, 60);
    CHECK(std::abs(psi(x, p, kSquare) - ref) < 1e-10 * std::abs(ref));
  }
  const AnsatzParams q(Coupling(3), cplx(0.2, -0.1), {0.7, cplx(-0.4, 0.9)});
  for (const cplx x : regular_points(q, kGeneric, 10, 4)) {
    const cplx s0 = oracle_wsigma(x, kGeneric, 60);
    const cplx ref = std::exp(q.gamma * x) * oracle_wsigma(x + q.lambdas[0], kGeneric, 60) *
                     oracle_wsigma(x + q.lambdas[1], kGeneric, 60) / (s0 * s0);
    CHECK(std::abs(psi(x, q, kGeneric) - ref) < 1e-10 * std::abs(ref));
  }
}

TEST_CASE("pole of order g-1 at the origin") {
  for (int g = 2; g <= 4; ++g) {
    std::vector<cplx> lam;
    for (int s = 0; s < g - 1; ++s) lam.push_back(cplx(0.4 + 0.3 * s, 0.2 + 0.5 * s));
    const AnsatzParams p(Coupling(g), cplx(0.1, 0.3), lam);
    const cplx dir = std::exp(cplx(0, 0.4));
    const cplx a = std::pow(1e-4 * dir, g - 1) * psi(1e-4 * dir, p, kSquare);
    const cplx b = std::pow(1e-5 * dir, g - 1) * psi(1e-5 * dir, p, kSquare);
    CHECK(std::abs(a) > 1e-6);
    CHECK(std::abs(a / b - 1.0) < 1e-3);
  }
  CHECK_THROWS_AS(psi(0.0, AnsatzParams(Coupling(2), 0.0, {0.7}), kSquare), PoleError);
}

TEST_CASE("Bloch factors") {
  const AnsatzParams zero(Coupling(3), 0.0, {cplx(0.5, 0.2), cplx(-0.5, -0.2)});
  CHECK(std::abs(bloch_factor(zero, kGeneric, 1) - 1.0) < 1e-15);
  CHECK(std::abs(bloch_factor(zero, kGeneric, 2) - 1.0) < 1e-15);

  const AnsatzParams half(Coupling(2), 0.0, {1.0});
  CHECK(std::abs(bloch_factor(half, kSquare, 1) - std::exp(kSquare.eta1())) < 1e-14);

  const AnsatzParams p(Coupling(3), cplx(0.3, -0.2), {cplx(0.6, 0.1), cplx(-0.2, 1.3)});
  for (const cplx x : regular_points(p, kGeneric, 20, 9)) {
    for (int k = 1; k <= 2; ++k) {
      const cplx ratio = psi(x + kGeneric.omega(k), p, kGeneric) / psi(x, p, kGeneric);
      CHECK(std::abs(ratio - bloch_factor(p, kGeneric, k)) < 1e-9 * std::abs(ratio));
    }
  }
}

TEST_CASE("log-derivatives against finite differences") {
  const AnsatzParams p(Coupling(3), cplx(0.3, -0.2), {cplx(0.6, 0.1), cplx(-0.2, 1.3)});
  auto f = [&](cplx x) { return psi(x, p, kGeneric); };
  auto lf = [&](cplx x) { return log_psi(x, p, kGeneric); };
  for (const cplx x : regular_points(p, kGeneric, 10, 13)) {
    const auto L = log_derivatives(x, p, kGeneric);
    const cplx v = f(x);
    const double h = 1e-3;
    CHECK(std::abs(testing::d1(lf, x, h) - L.d1) < 1e-6 * std::max(1.0, std::abs(L.d1)));
    CHECK(std::abs(testing::d2(f, x, h) / v - L.d2) < 1e-5 * std::max(1.0, std::abs(L.d2)));
    CHECK(std::abs(testing::d3(f, x, 5e-3) / v - L.d3) < 1e-5 * std::max(1.0, std::abs(L.d3)));
  }
}

TEST_CASE("log-derivatives are elliptic") {
  const AnsatzParams p(Coupling(4), cplx(0.3, -0.2), {cplx(0.6, 0.1), cplx(-0.2, 1.3), cplx(0.9, 0.7)});
  for (const cplx x : regular_points(p, kGeneric, 10, 19)) {
    for (int k = 1; k <= 2; ++k) {
      const auto a = log_derivatives(x, p, kGeneric);
      const auto b = log_derivatives(x + kGeneric.omega(k), p, kGeneric);
      CHECK(std::abs(a.d1 - b.d1) < 1e-10 * std::max(1.0, std::abs(a.d1)));
      CHECK(std::abs(a.d2 - b.d2) < 1e-10 * std::max(1.0, std::abs(a.d2)));
      CHECK(std::abs(a.d3 - b.d3) < 1e-10 * std::max(1.0, std::abs(a.d3)));
    }
  }
}
