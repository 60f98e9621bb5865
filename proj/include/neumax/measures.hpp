#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace neumax {

using Complex = std::complex<double>;

enum class SpaceKind { Disk, Sphere };

/// The closed unit disk, or the unit n-sphere in R^{n+1}.
struct Space {
  SpaceKind kind = SpaceKind::Disk;
  int n = 2;  // real dimension of the disk (2), or the sphere dimension

  static Space disk() { return {SpaceKind::Disk, 2}; }
  static Space sphere(int n) { return {SpaceKind::Sphere, n}; }

  bool is_disk() const { return kind == SpaceKind::Disk; }
  int ambient_dim() const { return is_disk() ? 2 : n + 1; }
  bool operator==(const Space&) const = default;
};

/// Tensor grid layout of a polar (disk) quadrature: atom i * n_theta + j sits
/// at radii[i] * exp(2 pi i j / n_theta).
struct PolarGrid {
  std::vector<double> radii;
  std::vector<double> radial_weights;
  int n_theta = 0;
  // When non-empty (size radii + 1), weights are exact masses of the polar
  // cells [edges[i], edges[i+1]] x [theta_j - dtheta/2, theta_j + dtheta/2]
  // rather than nodal quadrature weights.
  std::vector<double> edges;
};

/// Weighted atoms on the closed disk or on a sphere. Immutable; the total mass
/// is semantic (it is the area of the domain) and is never normalized
/// implicitly.
class DiscreteMeasure {
 public:
  DiscreteMeasure(Space space, Eigen::MatrixXd points, Eigen::VectorXd weights,
                  std::optional<PolarGrid> grid = std::nullopt);

  const Space& space() const { return space_; }
  Eigen::Index size() const { return weights_.size(); }
  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double total_mass() const { return total_mass_; }
  const std::optional<PolarGrid>& grid() const { return grid_; }

  Complex disk_point(Eigen::Index i) const { return {points_(0, i), points_(1, i)}; }

  /// Same atoms, weights multiplied by factor.
  DiscreteMeasure scaled(double factor) const;

  /// Same weights at new locations (a pushforward); drops the grid layout.
  DiscreteMeasure with_points(Eigen::MatrixXd points) const;

  /// Pushforward of a disk measure by a point map.
  DiscreteMeasure pushforward(const std::function<Complex(Complex)>& map) const;

  /// Pushforward of a sphere (or disk, as R^2) measure by a vector map.
  DiscreteMeasure pushforward_vec(
      const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map) const;

  /// Concatenation of atoms from two measures on the same space.
  static DiscreteMeasure concat(const DiscreteMeasure& a, const DiscreteMeasure& b);

 private:
  Space space_;
  Eigen::MatrixXd points_;
  Eigen::VectorXd weights_;
  double total_mass_ = 0.0;
  std::optional<PolarGrid> grid_;
};

/// Eigen-structure of the quadratic form V(s) = integral of X_s^2.
struct DirectionForm {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns match eigenvalues
  double eig_max = 0.0;
  double eig_second = 0.0;  // the other one on the disk, second largest on S^n
  Eigen::VectorXd max_direction;

  /// Relative eigen-gap (M - m) / (M + m).
  double gap() const;
  double value(const Eigen::VectorXd& s) const { return s.dot(matrix * s); }
};

/// Holomorphic map phi(z) = sum_k c_k z^k (k >= 1) of the unit disk onto a
/// simply-connected domain.
class ConformalDomain {
 public:
  /// Validates c1 != 0 and univalence; throws NotUnivalent otherwise.
  explicit ConformalDomain(std::vector<Complex> coeffs);

  const std::vector<Complex>& coeffs() const { return coeffs_; }
  Complex map(Complex z) const;
  Complex derivative(Complex z) const;
  /// pi * sum k |c_k|^2.
  double area() const;
  /// Whether the cheap sufficient condition sum_{k>=2} k|c_k| < |c_1| holds.
  bool has_coefficient_certificate() const;
  /// Max of |phi'| on the unit circle (bounds edge stretching of pushed meshes).
  double max_boundary_stretch() const;

 private:
  std::vector<Complex> coeffs_;
};

// Eigenfunctions of the first disk eigenvalue and their sphere analogues.
double disk_eigenfunction(Complex z, Eigen::Vector2d s);
/// X_{e1}, X_{e2} at z as a complex number f(|z|) z/|z|.
Complex disk_eigenfunction_pair(Complex z);

/// Gauss-Legendre (radial, weight r) times uniform (angular) quadrature of a
/// density on the unit disk.
DiscreteMeasure disk_quadrature(int n_r, int n_theta, const std::function<double(Complex)>& density);

/// Product quadrature of a density on the unit n-sphere (polar angles with
/// Gauss-Legendre, innermost circle uniform with 2 * resolution points).
DiscreteMeasure sphere_quadrature(int n, int resolution,
                                  const std::function<double(const Eigen::VectorXd&)>& density);

/// Pullback of Lebesgue measure on phi(D): density |phi'(z)|^2.
DiscreteMeasure pullback_measure(const ConformalDomain& domain, int n_r = 96, int n_theta = 192);

/// Component i equals the integral of X_{e_i}.
Eigen::VectorXd moment_vector(const DiscreteMeasure& m);

DirectionForm direction_form(const DiscreteMeasure& m);
DirectionForm direction_form_from_matrix(const Eigen::MatrixXd& matrix);

/// Integral of X_s X_t by direct atom sums (independent of the matrix route).
double bilinear_direct(const DiscreteMeasure& m, const Eigen::VectorXd& s, const Eigen::VectorXd& t);

/// Moment metric: sup over the dictionary {1, X_s, X_s^2 (|s| = 1), |z|^2,
/// |z|^4} of |integral f dm1 - integral f dm2|. Rotation invariant.
double measure_distance(const DiscreteMeasure& m1, const DiscreteMeasure& m2);

/// Versioned JSON document {schema, space, n, atoms: [[x..., w], ...]}.
nlohmann::json measure_to_json(const DiscreteMeasure& m);
DiscreteMeasure measure_from_json(const nlohmann::json& doc);

/// Domain documents: {"coeffs": [[re, im], ...]} with c_1 first.
ConformalDomain domain_from_json(const nlohmann::json& doc);
nlohmann::json domain_to_json(const ConformalDomain& d);

}  // namespace neumax
