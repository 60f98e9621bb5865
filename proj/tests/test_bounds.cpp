#include <doctest.h>

#include <cmath>
#include <numbers>

#include "neumax/bounds.hpp"
#include "neumax/errors.hpp"
#include "neumax/specfun.hpp"

using namespace neumax;
using std::numbers::pi;

namespace {
const auto uniform = [](Complex) { return 1.0; };
const auto unit_density = [](const Eigen::VectorXd&) { return 1.0; };
}  // namespace

TEST_CASE("lifted test function energy") {
  const double closed = dirichlet_energy_closed_form();
  CHECK(closed == doctest::Approx(2 * specfun::mu1_disk() * pi * specfun::radial_l2_integral()));
  // Conformal invariance: the energy of X_s itself.
  TestFunction plain{Cap::disk(0.0, 0.0), Eigen::Vector2d(1, 0), std::nullopt};
  CHECK(dirichlet_energy_quadrature(plain) == doctest::Approx(closed / 2).epsilon(1e-3));

  const DiscreteMeasure u = disk_quadrature(32, 64, uniform);
  const Cap a = Cap::disk(0.3, 0.5);
  const Rearrangement re = rearrange(u, a);
  TestFunction tf{a, Eigen::Vector2d(0.6, 0.8), re.trace};
  CHECK(dirichlet_energy_quadrature(tf) == doctest::Approx(closed).epsilon(1e-2));
  // The lift is symmetric under the cap reflection.
  const Complex z(0.2, 0.1);
  CHECK(lift_evaluate(tf, z) == doctest::Approx(lift_evaluate(tf, cap_reflection(a, z))).epsilon(1e-10));
}

TEST_CASE("l2 lower bound equality for the uniform measure") {
  const DiscreteMeasure u = disk_quadrature(64, 128, uniform);
  const L2Bound b = l2_lower_bound(u, Eigen::Vector2d(1, 0));
  CHECK(b.value == doctest::Approx(pi * specfun::radial_l2_integral()).epsilon(1e-10));
  CHECK(b.lower == doctest::Approx(pi * specfun::radial_l2_integral()));
  CHECK(b.holds);
  const DiscreteMeasure m = pullback_measure(ConformalDomain({1.0, 0.0, 0.15}), 32, 64);
  try {
    l2_lower_bound(m, Eigen::Vector2d(1, 0));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotMultiple);
  }
}

TEST_CASE("integration by parts") {
  const IbpCheck u = integration_by_parts_check(disk_quadrature(32, 64, uniform));
  CHECK(u.atom_sum == doctest::Approx(u.by_parts).epsilon(1e-10));
  const IbpCheck m = integration_by_parts_check(pullback_measure(ConformalDomain({1.0, 0.3}), 32, 64));
  CHECK(m.atom_sum == doctest::Approx(m.by_parts).epsilon(1e-10));
}

TEST_CASE("minimum of the direction form") {
  Eigen::Matrix2d a;
  a << 3.0, 1.0, 1.0, 2.0;
  Eigen::Vector2d s;
  const double v = min_direction_value(direction_form_from_matrix(a), &s);
  CHECK(v == doctest::Approx((5.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  CHECK(s.norm() == doctest::Approx(1.0));
}

TEST_CASE("certificate for the disk") {
  CertificateOptions opt;
  opt.n_r = 48;
  opt.n_theta = 96;
  const BoundReport disk = planar_bound_certificate(ConformalDomain({1.0}), "disk", opt);
  CHECK(disk.branch == "multiple-direct");
  CHECK(disk.quotient_sup == doctest::Approx(specfun::mu1_disk()).epsilon(1e-6));
  CHECK(disk.holds);
  const nlohmann::json j = report_to_json(disk);
  CHECK(j.at("domain") == "disk");
  CHECK(j.at("inequality") == "szego");
}

TEST_CASE("sphere gradient integral equals k_n") {
  for (int n = 1; n <= 12; ++n) {
    CHECK(sphere_gradient_integral(n, 16) == doctest::Approx(specfun::k_n(n)).epsilon(1e-10));
  }
}

TEST_CASE("lifted sphere gradient against finite differences") {
  Eigen::VectorXd p(4), s(4), x(4), t(4);
  p << 1, 0, 0, 0;
  s << 0, 1, 0, 0;
  x << 0.5, 0.5, 0.5, 0.5;
  t << 0.5, -0.5, 0.5, -0.5;  // tangent at x, unit length
  const Cap a = Cap::sphere(0.2, p);
  Eigen::VectorXd xi(4);
  xi << 0.1, 0.0, -0.2, 0.05;
  const double h = 1e-6;
  auto on_sphere = [&](double e) {
    Eigen::VectorXd y = x + e * t;
    return Eigen::VectorXd(y / y.norm());
  };
  const double deriv =
      (sphere_lift_value(a, xi, s, on_sphere(h)) - sphere_lift_value(a, xi, s, on_sphere(-h))) / (2 * h);
  CHECK(std::abs(deriv) <= sphere_lift_gradient(a, xi, s, x) + 1e-6);
}

TEST_CASE("hoelder gap") {
  SUBCASE("a triangle wave on the circle is the equality case") {
    // |u'| = 1 away from the kinks, which sit between quadrature nodes.
    const auto tri = [](const Eigen::VectorXd& x) { return std::abs(std::remainder(std::atan2(x(1), x(0)) - 0.123, 2 * pi)); };
    const HolderResult r = holder_gap_check(1, 64, tri, unit_density);
    CHECK(r.equality);
    CHECK(std::abs(r.R - r.Rprime) < 1e-8);
  }
  SUBCASE("the coordinate on the circle reverses the inequality") {
    const HolderResult r = holder_gap_check(1, 64, [](const Eigen::VectorXd& x) { return x(0); }, unit_density);
    CHECK(r.holds);
    CHECK(r.Rprime < r.R);
  }
  SUBCASE("coordinate on the three-sphere is strict") {
    const HolderResult r = holder_gap_check(3, 12, [](const Eigen::VectorXd& x) { return x(1); }, unit_density);
    CHECK(r.holds);
    CHECK(r.R < r.Rprime - 1e-6);
  }
  SUBCASE("random band-limited functions") {
    for (int k = 1; k <= 10; ++k) {
      const double a = 0.3 * k, b = 1.0 / k;
      const HolderResult r = holder_gap_check(
          3, 8, [a, b](const Eigen::VectorXd& x) { return std::sin(a * x(0) + b * x(2)) + x(1) * x(3); },
          [a](const Eigen::VectorXd& x) { return 1.0 + 0.2 * std::cos(a * x(1)); });
      CHECK(r.holds);
    }
  }
}

TEST_CASE("sphere quotient at the uniform measure") {
  const DiscreteMeasure g = sphere_quadrature(3, 6, unit_density);
  Eigen::VectorXd p(4), s(4);
  p << 0, 0, 0, 1;
  s << 1, 0, 0, 0;
  const SphereQuotient q = sphere_modified_quotient(g.scaled(1.0 / g.total_mass()), Cap::sphere(0.0, p), s, 12);
  CHECK(q.bound == doctest::Approx(specfun::bound_constants(3).theorem_constant));
  CHECK(q.denominator > 0.0);
  CHECK(std::isfinite(q.quotient));
}
