#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "neumax/measures.hpp"

namespace neumax {

/// Point xi of the open disk (as R^2) or ball defining d_xi.
struct MoebiusParam {
  Space space;
  Eigen::VectorXd xi;

  Complex as_complex() const { return {xi(0), xi(1)}; }
};

struct RenormResult {
  MoebiusParam xi;
  double residual = 0.0;  // sup-norm of the moment vector after transport
  int iterations = 0;
};

struct RenormOptions {
  double tol = 1e-10;
  int max_iterations = 500;
  std::uint64_t seed = 0;
  // Starting point; overrides the seed when set.
  std::optional<Eigen::VectorXd> initial;
};

/// d_xi(z) = (z + xi) / (conj(xi) z + 1).
Complex disk_moebius(Complex xi, Complex z);
Complex disk_moebius_derivative(Complex xi, Complex z);

/// Ball Moebius map d_xi(x) in R^{n+1}; preserves the unit sphere.
Eigen::VectorXd ball_moebius(const Eigen::VectorXd& xi, const Eigen::VectorXd& x);

/// Conformal factor of the ball map on the unit sphere, |d_xi'(x)|.
double ball_moebius_stretch(const Eigen::VectorXd& xi, const Eigen::VectorXd& x);

/// R_p(x) = x - 2 (p, x) p. On the disk this is R_p(z) = -p^2 conj(z).
Eigen::VectorXd reflection(const Eigen::VectorXd& p, const Eigen::VectorXd& x);
Complex reflection(Complex p, Complex z);

/// Pushforward of m by d_xi (disk or sphere).
DiscreteMeasure moebius_pushforward(const DiscreteMeasure& m, const Eigen::VectorXd& xi);

/// Rotation of a disk measure by exp(i angle); orthogonal map of a sphere measure.
DiscreteMeasure rotate(const DiscreteMeasure& m, double angle);
DiscreteMeasure rotate(const DiscreteMeasure& m, const Eigen::MatrixXd& orthogonal);

/// The unique xi such that (d_xi)_* m has vanishing moment vector.
RenormResult renormalize(const DiscreteMeasure& m, const RenormOptions& options = {});

/// Whether X_{e1}(d_r(z)) > X_{e1}(z) at `samples` random interior points.
bool monotonicity_check(double r, int samples, std::uint64_t seed = 0);

}  // namespace neumax
