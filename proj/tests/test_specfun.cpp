#include <doctest.h>

#include <cmath>
#include <numbers>

#include "neumax/quadrature.hpp"
#include "neumax/specfun.hpp"

using namespace neumax;
using namespace neumax::specfun;
using std::numbers::pi;

namespace {

// Plain power series for J1, long enough to be exact at moderate arguments.
double j1_series(double x) {
  double term = x / 2.0, sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -(x * x / 4.0) / (k * (k + 1.0));
    sum += term;
  }
  return sum;
}

double j0_series(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -(x * x / 4.0) / (double(k) * k);
    sum += term;
  }
  return sum;
}

double gl_integral(int nodes, double a, double b, auto f) {
  const QuadratureRule q = gauss_legendre(nodes, a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * f(q.nodes[i]);
  return s;
}

}  // namespace

TEST_CASE("bessel j1 matches the power series") {
  for (double x : {0.1, 0.7, 1.5, 3.0, 5.5, 8.0, 11.0}) {
    CHECK(bessel_j1(x) == doctest::Approx(j1_series(x)).epsilon(1e-12));
    CHECK(bessel_j0(x) == doctest::Approx(j0_series(x)).epsilon(1e-11));
  }
  CHECK(bessel_j1(0.0) == 0.0);
  CHECK(bessel_j1(-2.0) == doctest::Approx(-bessel_j1(2.0)));
  CHECK(std::abs(bessel_j1(1e-8) / 1e-8 - 0.5) < 1e-8);
}

TEST_CASE("bessel j1 is continuous across the evaluation regimes") {
  for (double x : {12.0, 50.0}) {
    CHECK(std::abs(bessel_j1(x - 1e-9) - bessel_j1(x + 1e-9)) < 1e-9);
  }
  // Large-argument leading behaviour sqrt(2/(pi x)) cos(x - 3pi/4).
  const double x = 200.0;
  CHECK(std::abs(bessel_j1(x) - std::sqrt(2.0 / (pi * x)) * std::cos(x - 0.75 * pi)) < 1e-4);
}

TEST_CASE("zeta is the first critical point of j1") {
  // Independent bisection on the series derivative.
  auto dj1 = [](double x) { return j0_series(x) - j1_series(x) / x; };
  double lo = 1.8, hi = 1.9;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (dj1(lo) * dj1(mid) <= 0 ? hi : lo) = mid;
  }
  const double zeta = find_zeta();
  CHECK(std::abs(zeta - 0.5 * (lo + hi)) < 1e-9);
  CHECK(std::abs(zeta - 1.8411837813) < 1e-9);
  CHECK(std::abs(bessel_j1_prime(zeta)) < 1e-12);
  CHECK(bessel_j1(zeta) == doctest::Approx(0.5818652).epsilon(1e-6));
  CHECK(mu1_disk() == doctest::Approx(3.39).epsilon(2e-3));
}

TEST_CASE("radial l2 integral agrees with quadrature") {
  const double direct = gl_integral(64, 0.0, 1.0, [](double r) { return radial_profile(r) * radial_profile(r) * r; });
  CHECK(radial_l2_integral() == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("sphere volumes") {
  CHECK(omega_n(1) == doctest::Approx(2 * pi));
  CHECK(omega_n(2) == doctest::Approx(4 * pi));
  CHECK(omega_n(3) == doctest::Approx(2 * pi * pi));
  // Half-integer Gamma values enter through even n.
  CHECK(omega_n(4) == doctest::Approx(8 * pi * pi / 3).epsilon(1e-13));
  CHECK(omega_n(5) == doctest::Approx(pi * pi * pi).epsilon(1e-13));
  CHECK(omega_n(6) == doctest::Approx(16 * pi * pi * pi / 15).epsilon(1e-13));
  for (int n = 2; n <= 30; ++n) {
    const double rec = omega_n(n - 1) * std::sqrt(pi) * std::tgamma(n / 2.0) / std::tgamma((n + 1) / 2.0);
    CHECK(omega_n(n) == doctest::Approx(rec).epsilon(1e-12));
  }
}

TEST_CASE("k_n closed form against quadrature") {
  CHECK(k_n(1) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(k_n(3) == doctest::Approx(64 * pi / 15).epsilon(1e-12));
  for (int n = 1; n <= 12; ++n) {
    // |grad X_s| = sin(theta) in polar coordinates about s.
    const double polar = gl_integral(80, 0.0, pi, [n](double t) { return std::pow(std::sin(t), 2 * n - 1); });
    const double inner = n == 1 ? 2.0 : omega_n(n - 1);  // the 0-sphere is two points
    CHECK(k_n(n) == doctest::Approx(inner * polar).epsilon(1e-8));
  }
}

TEST_CASE("bound constants") {
  const BoundConstants c3 = bound_constants(3);
  CHECK(c3.theorem_constant == doctest::Approx(35.83).epsilon(1e-3));
  CHECK(c3.conjecture_constant == doctest::Approx(34.77).epsilon(1e-3));
  CHECK(c3.ratio == doctest::Approx(1.031).epsilon(1e-3));
  for (int n = 1; n <= 99; n += 2) {
    const BoundConstants c = bound_constants(n);
    const double theorem = (n + 1) * std::pow(2 * k_n(n), 2.0 / n);
    const double conjecture = n * std::pow(2 * omega_n(n), 2.0 / n);
    CHECK(c.theorem_constant == doctest::Approx(theorem).epsilon(1e-13));
    CHECK(c.conjecture_constant == doctest::Approx(conjecture).epsilon(1e-13));
    CHECK(c.ratio == doctest::Approx(theorem / conjecture).epsilon(1e-13));
    CHECK_FALSE(c.even_dimension_warning);
    // The (1, 1.04) window from n = 3 on; n = 1 and monotonicity are acceptance criteria.
    if (n >= 3) {
      CHECK(c.ratio > 1.0);
      CHECK(c.ratio < 1.04);
    }
  }
  for (int n = 7; n <= 99; n += 2) CHECK(bound_constants(n).ratio < bound_constants(n - 2).ratio);
  CHECK(bound_constants(51).ratio < c3.ratio);
  CHECK(bound_constants(4).even_dimension_warning);
}

TEST_CASE("planar constants") {
  CHECK(std::abs(planar_bound() - 2 * 1.8411837813 * 1.8411837813 * pi) < 1e-3);
  CHECK(planar_bound() / pi == doctest::Approx(6.78).epsilon(1e-3));
  CHECK(planar_bound() < 8 * pi);
  CHECK(szego_bound() == doctest::Approx(planar_bound() / 2));
}
