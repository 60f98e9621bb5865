#include "neumax/moebius.hpp"

#include <cmath>
#include <random>

#include "neumax/errors.hpp"
#include "neumax/specfun.hpp"

namespace neumax {

Complex disk_moebius(Complex xi, Complex z) { return (z + xi) / (std::conj(xi) * z + 1.0); }

Complex disk_moebius_derivative(Complex xi, Complex z) {
  const Complex d = std::conj(xi) * z + 1.0;
  return (1.0 - std::norm(xi)) / (d * d);
}

Eigen::VectorXd ball_moebius(const Eigen::VectorXd& xi, const Eigen::VectorXd& x) {
  const double xi2 = xi.squaredNorm();
  const double x2 = x.squaredNorm();
  const double dot = xi.dot(x);
  const double denom = 1.0 + 2.0 * dot + xi2 * x2;
  return ((1.0 - xi2) * x + (1.0 + 2.0 * dot + x2) * xi) / denom;
}

double ball_moebius_stretch(const Eigen::VectorXd& xi, const Eigen::VectorXd& x) {
  return (1.0 - xi.squaredNorm()) / (1.0 + 2.0 * xi.dot(x) + xi.squaredNorm());
}

Eigen::VectorXd reflection(const Eigen::VectorXd& p, const Eigen::VectorXd& x) {
  return x - 2.0 * p.dot(x) * p;
}

Complex reflection(Complex p, Complex z) { return -p * p * std::conj(z); }

DiscreteMeasure moebius_pushforward(const DiscreteMeasure& m, const Eigen::VectorXd& xi) {
  if (m.space().is_disk()) {
    const Complex c(xi(0), xi(1));
    return m.pushforward([c](Complex z) { return disk_moebius(c, z); });
  }
  return m.pushforward_vec([&xi](const Eigen::VectorXd& x) { return ball_moebius(xi, x); });
}

DiscreteMeasure rotate(const DiscreteMeasure& m, double angle) {
  const Complex u = std::polar(1.0, angle);
  return m.pushforward([u](Complex z) { return u * z; });
}

DiscreteMeasure rotate(const DiscreteMeasure& m, const Eigen::MatrixXd& orthogonal) {
  return m.with_points(orthogonal * m.points());
}

namespace {

// Moment vector of (d_xi)_* m without materializing the pushed measure.
Eigen::VectorXd pushed_moments(const DiscreteMeasure& m, const Eigen::VectorXd& xi) {
  const auto& pts = m.points();
  const auto& w = m.weights();
  if (m.space().is_disk()) {
    const Complex c(xi(0), xi(1));
    Complex acc = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      acc += w(i) * disk_eigenfunction_pair(disk_moebius(c, {pts(0, i), pts(1, i)}));
    }
    return Eigen::Vector2d(acc.real(), acc.imag());
  }
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(pts.rows());
  for (Eigen::Index i = 0; i < m.size(); ++i) acc += w(i) * ball_moebius(xi, pts.col(i));
  return acc;
}

// xi' with d_delta o d_xi = (rotation) o d_xi'.
Eigen::VectorXd compose(const Space& space, const Eigen::VectorXd& xi, const Eigen::VectorXd& delta) {
  if (space.is_disk()) {
    const Complex v = disk_moebius({xi(0), xi(1)}, {delta(0), delta(1)});
    return Eigen::Vector2d(v.real(), v.imag());
  }
  return ball_moebius(xi, delta);
}

Eigen::VectorXd initial_point(int dim, const RenormOptions& options) {
  if (options.initial) return *options.initial;
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(dim);
  if (options.seed == 0) return xi;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uniform(0.0, 0.5);
  for (int k = 0; k < dim; ++k) xi(k) = gauss(rng);
  return xi * (uniform(rng) / xi.norm());
}

}  // namespace

RenormResult renormalize(const DiscreteMeasure& m, const RenormOptions& options) {
  const double mass = m.total_mass();
  if (!(mass > 0.0)) throw Error(ErrorKind::ZeroMass, "cannot renormalize a measure of zero mass");
  const Space space = m.space();
  const int dim = space.ambient_dim();
  const double scale = mass * (space.is_disk() ? specfun::radial_profile(1.0) : 1.0);

  Eigen::VectorXd xi = initial_point(dim, options);
  if (xi.norm() >= 1.0) throw Error(ErrorKind::InvalidArgument, "initial point outside the open ball");
  Eigen::VectorXd moments = pushed_moments(m, xi);

  constexpr double kNewtonSwitch = 1e-3;
  constexpr double kFdStep = 1e-6;
  constexpr double kTrustRadius = 0.5;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const double residual = moments.cwiseAbs().maxCoeff();
    if (residual < options.tol) return {MoebiusParam{space, xi}, residual, iter};

    Eigen::VectorXd delta;
    if (moments.norm() / scale > kNewtonSwitch) {
      delta = -0.5 * moments / scale;
    } else {
      Eigen::MatrixXd jac(dim, dim);
      for (int k = 0; k < dim; ++k) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
        e(k) = kFdStep;
        jac.col(k) = (pushed_moments(m, compose(space, xi, e)) - pushed_moments(m, compose(space, xi, -e))) /
                     (2.0 * kFdStep);
      }
      delta = -jac.fullPivLu().solve(moments);
      if (!delta.allFinite()) delta = -0.5 * moments / scale;
      if (delta.norm() > kTrustRadius) delta *= kTrustRadius / delta.norm();
    }

    // Backtrack until the moment norm decreases.
    Eigen::VectorXd next_xi;
    Eigen::VectorXd next_moments;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving) {
      next_xi = compose(space, xi, delta);
      if (next_xi.norm() < 1.0) {
        next_moments = pushed_moments(m, next_xi);
        if (next_moments.norm() < moments.norm()) {
          accepted = true;
          break;
        }
      }
      delta *= 0.5;
    }
    if (!accepted) {
      throw Error(ErrorKind::NonConvergence,
                  "renormalization stalled at residual " + std::to_string(residual));
    }
    xi = next_xi;
    moments = next_moments;
    if (xi.norm() > 1.0 - 1e-9) {
      throw Error(ErrorKind::NonConvergence, "renormalizer escaped to the boundary");
    }
  }
  const double residual = moments.cwiseAbs().maxCoeff();
  if (residual < options.tol) return {MoebiusParam{space, xi}, residual, options.max_iterations};
  throw Error(ErrorKind::NonConvergence,
              "no renormalizer after " + std::to_string(options.max_iterations) + " iterations");
}

bool monotonicity_check(double r, int samples, std::uint64_t seed) {
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::InvalidArgument, "monotonicity_check needs 0 < r < 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const Eigen::Vector2d e1(1.0, 0.0);
  for (int k = 0; k < samples; ++k) {
    const double rho = std::sqrt(uniform(rng)) * (1.0 - 1e-12);
    const Complex z = std::polar(rho, 2.0 * M_PI * uniform(rng));
    if (!(disk_eigenfunction(disk_moebius(r, z), e1) > disk_eigenfunction(z, e1))) return false;
  }
  return true;
}

}  // namespace neumax
