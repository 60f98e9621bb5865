#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "neumax/measures.hpp"
#include "neumax/moebius.hpp"

using namespace neumax;

namespace {

Complex random_disk_point(std::mt19937_64& rng, double radius = 0.95) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const Complex z(u(rng), u(rng));
    if (std::abs(z) < radius) return z;
  }
}

Eigen::VectorXd vec(Complex z) { return Eigen::Vector2d(z.real(), z.imag()); }

}  // namespace

TEST_CASE("disk moebius basics") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const Complex xi = random_disk_point(rng), z = random_disk_point(rng);
    CHECK(std::abs(disk_moebius(0.0, z) - z) < 1e-15);
    CHECK(std::abs(disk_moebius(xi, 0.0) - xi) < 1e-15);
    CHECK(std::abs(disk_moebius(-xi, disk_moebius(xi, z)) - z) < 1e-12);
    CHECK(std::abs(disk_moebius(xi, z)) < 1.0);
    const double h = 1e-6;
    const Complex fd = (disk_moebius(xi, z + h) - disk_moebius(xi, z - h)) / (2 * h);
    CHECK(std::abs(fd - disk_moebius_derivative(xi, z)) < 1e-7);
  }
}

TEST_CASE("ball moebius agrees with the disk map in dimension one") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const Complex xi = random_disk_point(rng);
    const double t = std::uniform_real_distribution<double>(0, 2 * std::numbers::pi)(rng);
    const Complex z = std::polar(1.0, t);
    const Eigen::VectorXd b = ball_moebius(vec(xi), vec(z));
    const Complex d = disk_moebius(xi, z);
    CHECK(std::abs(b(0) - d.real()) < 1e-13);
    CHECK(std::abs(b(1) - d.imag()) < 1e-13);
  }
}

TEST_CASE("ball moebius preserves the sphere") {
  Eigen::VectorXd xi(4);
  xi << 0.3, -0.5, 0.2, 0.6;
  const Eigen::VectorXd x = -xi / xi.norm();
  CHECK(std::abs(ball_moebius(xi, x).norm() - 1.0) < 1e-12);
  CHECK((ball_moebius(Eigen::VectorXd::Zero(4), x) - x).norm() < 1e-15);
  Eigen::VectorXd y(4);
  y << 0.5, 0.5, 0.5, 0.5;
  CHECK(std::abs(ball_moebius(xi, y).norm() - 1.0) < 1e-12);
  CHECK(ball_moebius_stretch(xi, y) > 0.0);
}

TEST_CASE("reflection") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Complex p = std::polar(1.0, double(i)), z = random_disk_point(rng);
    CHECK(std::abs(reflection(p, reflection(p, z)) - z) < 1e-13);
    CHECK(std::abs(reflection(p, p) + p) < 1e-13);
    const Eigen::VectorXd r = reflection(vec(p), vec(z));
    const Complex c = reflection(p, z);
    CHECK(std::abs(r(0) - c.real()) < 1e-13);
    CHECK(std::abs(r(1) - c.imag()) < 1e-13);
  }
}

TEST_CASE("renormalize symmetric measures") {
  const DiscreteMeasure u = disk_quadrature(32, 64, [](Complex) { return 1.0; });
  CHECK(renormalize(u).xi.xi.norm() < 1e-10);
  Eigen::MatrixXd pts(2, 2);
  pts << 0.4, -0.4, 0.2, -0.2;
  const DiscreteMeasure pair(Space::disk(), pts, Eigen::Vector2d(1.0, 1.0));
  CHECK(renormalize(pair).xi.xi.norm() < 1e-10);
}

TEST_CASE("renormalize recovers a known transport") {
  const DiscreteMeasure u = disk_quadrature(32, 64, [](Complex) { return 1.0; });
  const Eigen::Vector2d shift(0.3, -0.2);
  const DiscreteMeasure moved = moebius_pushforward(u, shift);
  const RenormResult res = renormalize(moved);
  CHECK(res.residual < 1e-10);
  // d_xi o d_shift = rotation only when xi = -shift.
  CHECK((res.xi.xi + shift).norm() < 1e-8);
  // Seeds only change the starting point.
  RenormOptions opt;
  opt.seed = 7;
  CHECK((renormalize(moved, opt).xi.xi - res.xi.xi).norm() < 1e-8);
}

TEST_CASE("renormalize on the sphere") {
  const DiscreteMeasure s = sphere_quadrature(3, 6, [](const Eigen::VectorXd& x) { return 1.0 + 0.5 * x(0); });
  const RenormResult res = renormalize(s);
  CHECK(res.residual < 1e-10);
  CHECK(moment_vector(moebius_pushforward(s, res.xi.xi)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("monotonicity of the radial eigenfunction under d_r") {
  CHECK(monotonicity_check(0.5, 100000));
  CHECK(monotonicity_check(0.99, 100000));
}
