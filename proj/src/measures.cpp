#include "neumax/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "neumax/errors.hpp"
#include "neumax/quadrature.hpp"
#include "neumax/specfun.hpp"

namespace neumax {

namespace {

constexpr double kPi = std::numbers::pi;

// Atoms may drift off the closed space by roundoff after long chains of
// Moebius maps; anything within this band is projected back.
constexpr double kProjectionBand = 1e-9;

void sanitize_points(const Space& space, Eigen::MatrixXd& points) {
  if (points.rows() != space.ambient_dim()) {
    throw Error(ErrorKind::SpaceMismatch, "atom dimension does not match the space");
  }
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    auto col = points.col(i);
    const double norm = col.norm();
    if (!std::isfinite(norm)) throw Error(ErrorKind::InvalidArgument, "non-finite atom");
    if (space.is_disk()) {
      if (norm > 1.0 + kProjectionBand) {
        throw Error(ErrorKind::InvalidArgument, "disk atom outside the closed unit disk");
      }
      if (norm > 1.0) col /= norm;
    } else {
      if (std::abs(norm - 1.0) > kProjectionBand) {
        throw Error(ErrorKind::InvalidArgument, "sphere atom off the unit sphere");
      }
      col /= norm;
    }
  }
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(Space space, Eigen::MatrixXd points, Eigen::VectorXd weights,
                                 std::optional<PolarGrid> grid)
    : space_(space), points_(std::move(points)), weights_(std::move(weights)), grid_(std::move(grid)) {
  if (points_.cols() != weights_.size()) {
    throw Error(ErrorKind::InvalidArgument, "points and weights differ in length");
  }
  if ((weights_.array() < 0.0).any()) {
    throw Error(ErrorKind::NegativeDensity, "negative atom weight");
  }
  sanitize_points(space_, points_);
  total_mass_ = weights_.sum();
}

DiscreteMeasure DiscreteMeasure::scaled(double factor) const {
  if (factor < 0.0) throw Error(ErrorKind::NegativeDensity, "negative scale factor");
  return DiscreteMeasure(space_, points_, weights_ * factor, grid_);
}

DiscreteMeasure DiscreteMeasure::with_points(Eigen::MatrixXd points) const {
  return DiscreteMeasure(space_, std::move(points), weights_);
}

DiscreteMeasure DiscreteMeasure::pushforward(const std::function<Complex(Complex)>& map) const {
  if (!space_.is_disk()) throw Error(ErrorKind::SpaceMismatch, "complex pushforward needs a disk measure");
  Eigen::MatrixXd out(2, size());
  for (Eigen::Index i = 0; i < size(); ++i) {
    const Complex w = map(disk_point(i));
    out(0, i) = w.real();
    out(1, i) = w.imag();
  }
  return with_points(std::move(out));
}

DiscreteMeasure DiscreteMeasure::pushforward_vec(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map) const {
  Eigen::MatrixXd out(points_.rows(), size());
  for (Eigen::Index i = 0; i < size(); ++i) out.col(i) = map(points_.col(i));
  return with_points(std::move(out));
}

DiscreteMeasure DiscreteMeasure::concat(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (!(a.space() == b.space())) throw Error(ErrorKind::SpaceMismatch, "concat of different spaces");
  Eigen::MatrixXd pts(a.points().rows(), a.size() + b.size());
  pts << a.points(), b.points();
  Eigen::VectorXd w(a.size() + b.size());
  w << a.weights(), b.weights();
  return DiscreteMeasure(a.space(), std::move(pts), std::move(w));
}

double DirectionForm::gap() const {
  const double denom = eig_max + eig_second;
  if (denom <= 0.0) return 0.0;
  return (eig_max - eig_second) / denom;
}

// ---------------------------------------------------------------------------
// Conformal domains

ConformalDomain::ConformalDomain(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty() || std::abs(coeffs_.front()) == 0.0) {
    throw Error(ErrorKind::NotUnivalent, "c1 must be nonzero");
  }
  if (has_coefficient_certificate()) return;

  // Fallback: phi' nonvanishing on a grid and a simple boundary curve that
  // winds once around phi(0).
  const double scale = std::abs(coeffs_.front());
  for (int i = 0; i <= 64; ++i) {
    const double r = i / 64.0;
    for (int j = 0; j < 256; ++j) {
      const Complex z = std::polar(r, 2.0 * kPi * j / 256.0);
      if (std::abs(derivative(z)) <= 1e-12 * scale) {
        throw Error(ErrorKind::NotUnivalent, "phi' vanishes on the sampling grid");
      }
    }
  }
  constexpr int kBoundary = 1024;
  std::vector<Complex> curve(kBoundary);
  for (int j = 0; j < kBoundary; ++j) curve[j] = map(std::polar(1.0, 2.0 * kPi * j / kBoundary));

  auto cross = [](Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); };
  auto segments_cross = [&](Complex p1, Complex p2, Complex q1, Complex q2) {
    const double d1 = cross(p2 - p1, q1 - p1);
    const double d2 = cross(p2 - p1, q2 - p1);
    const double d3 = cross(q2 - q1, p1 - q1);
    const double d4 = cross(q2 - q1, p2 - q1);
    return (d1 * d2 < 0.0) && (d3 * d4 < 0.0);
  };
  for (int a = 0; a < kBoundary; ++a) {
    const Complex p1 = curve[a];
    const Complex p2 = curve[(a + 1) % kBoundary];
    for (int b = a + 2; b < kBoundary; ++b) {
      if (a == 0 && b == kBoundary - 1) continue;
      if (segments_cross(p1, p2, curve[b], curve[(b + 1) % kBoundary])) {
        throw Error(ErrorKind::NotUnivalent, "boundary curve self-intersects");
      }
    }
  }
  double winding = 0.0;
  const Complex center = map(0.0);
  for (int j = 0; j < kBoundary; ++j) {
    winding += std::arg((curve[(j + 1) % kBoundary] - center) / (curve[j] - center));
  }
  if (std::abs(winding / (2.0 * kPi) - 1.0) > 1e-6) {
    throw Error(ErrorKind::NotUnivalent, "boundary curve does not wind once");
  }
}

Complex ConformalDomain::map(Complex z) const {
  Complex acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = (acc + *it) * z;
  return acc;
}

Complex ConformalDomain::derivative(Complex z) const {
  Complex acc = 0.0;
  for (std::size_t k = coeffs_.size(); k >= 1; --k) acc = acc * z + static_cast<double>(k) * coeffs_[k - 1];
  return acc;
}

double ConformalDomain::area() const {
  double sum = 0.0;
  for (std::size_t k = 1; k <= coeffs_.size(); ++k) sum += k * std::norm(coeffs_[k - 1]);
  return kPi * sum;
}

bool ConformalDomain::has_coefficient_certificate() const {
  double tail = 0.0;
  for (std::size_t k = 2; k <= coeffs_.size(); ++k) tail += k * std::abs(coeffs_[k - 1]);
  return tail < std::abs(coeffs_.front());
}

double ConformalDomain::max_boundary_stretch() const {
  double best = 0.0;
  for (int j = 0; j < 720; ++j) best = std::max(best, std::abs(derivative(std::polar(1.0, 2.0 * kPi * j / 720.0))));
  return best;
}

// ---------------------------------------------------------------------------
// Eigenfunctions and quadratures

Complex disk_eigenfunction_pair(Complex z) {
  const double r = std::abs(z);
  if (r == 0.0) return 0.0;
  return specfun::radial_profile(r) * z / r;
}

double disk_eigenfunction(Complex z, Eigen::Vector2d s) {
  const Complex x = disk_eigenfunction_pair(z);
  return x.real() * s.x() + x.imag() * s.y();
}

DiscreteMeasure disk_quadrature(int n_r, int n_theta, const std::function<double(Complex)>& density) {
  if (n_r < 4 || n_theta < 4) throw Error(ErrorKind::InvalidArgument, "disk_quadrature needs n_r, n_theta >= 4");
  const QuadratureRule radial = gauss_legendre(n_r, 0.0, 1.0);
  const double dtheta = 2.0 * kPi / n_theta;
  Eigen::MatrixXd pts(2, static_cast<Eigen::Index>(n_r) * n_theta);
  Eigen::VectorXd w(pts.cols());
  for (int i = 0; i < n_r; ++i) {
    const double r = radial.nodes[i];
    for (int j = 0; j < n_theta; ++j) {
      const Eigen::Index k = static_cast<Eigen::Index>(i) * n_theta + j;
      const Complex z = std::polar(r, j * dtheta);
      const double rho = density(z);
      if (!(rho >= 0.0)) throw Error(ErrorKind::NegativeDensity, "density negative on the grid");
      pts(0, k) = z.real();
      pts(1, k) = z.imag();
      w(k) = rho * r * radial.weights[i] * dtheta;
    }
  }
  PolarGrid grid{radial.nodes, radial.weights, n_theta, {}};
  return DiscreteMeasure(Space::disk(), std::move(pts), std::move(w), std::move(grid));
}

namespace {

// Nodes and weights of the uniform product rule on S^m, as rows of (m+1) coords.
void sphere_rule(int m, int resolution, std::vector<Eigen::VectorXd>& nodes, std::vector<double>& weights) {
  nodes.clear();
  weights.clear();
  if (m == 1) {
    const int count = 2 * resolution;
    for (int j = 0; j < count; ++j) {
      const double phi = 2.0 * kPi * j / count;
      Eigen::VectorXd x(2);
      x << std::cos(phi), std::sin(phi);
      nodes.push_back(x);
      weights.push_back(2.0 * kPi / count);
    }
    return;
  }
  std::vector<Eigen::VectorXd> inner_nodes;
  std::vector<double> inner_weights;
  sphere_rule(m - 1, resolution, inner_nodes, inner_weights);
  const QuadratureRule polar = gauss_legendre(resolution, 0.0, kPi);
  for (int i = 0; i < resolution; ++i) {
    const double theta = polar.nodes[i];
    const double jac = std::pow(std::sin(theta), m - 1) * polar.weights[i];
    for (std::size_t k = 0; k < inner_nodes.size(); ++k) {
      Eigen::VectorXd x(m + 1);
      x(0) = std::cos(theta);
      x.tail(m) = std::sin(theta) * inner_nodes[k];
      nodes.push_back(std::move(x));
      weights.push_back(jac * inner_weights[k]);
    }
  }
}

}  // namespace

DiscreteMeasure sphere_quadrature(int n, int resolution,
                                  const std::function<double(const Eigen::VectorXd&)>& density) {
  if (n < 1 || resolution < 2) throw Error(ErrorKind::InvalidArgument, "sphere_quadrature needs n >= 1, resolution >= 2");
  std::vector<Eigen::VectorXd> nodes;
  std::vector<double> weights;
  sphere_rule(n, resolution, nodes, weights);
  Eigen::MatrixXd pts(n + 1, static_cast<Eigen::Index>(nodes.size()));
  Eigen::VectorXd w(pts.cols());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double rho = density(nodes[k]);
    if (!(rho >= 0.0)) throw Error(ErrorKind::NegativeDensity, "density negative on the sphere grid");
    pts.col(static_cast<Eigen::Index>(k)) = nodes[k];
    w(static_cast<Eigen::Index>(k)) = rho * weights[k];
  }
  return DiscreteMeasure(Space::sphere(n), std::move(pts), std::move(w));
}

DiscreteMeasure pullback_measure(const ConformalDomain& domain, int n_r, int n_theta) {
  return disk_quadrature(n_r, n_theta, [&](Complex z) { return std::norm(domain.derivative(z)); });
}

namespace {

// Columns are (X_{e_1}, ..., X_{e_d}) at each atom.
Eigen::MatrixXd eigenfunction_values(const DiscreteMeasure& m) {
  if (!m.space().is_disk()) return m.points();
  Eigen::MatrixXd values(2, m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex x = disk_eigenfunction_pair(m.disk_point(i));
    values(0, i) = x.real();
    values(1, i) = x.imag();
  }
  return values;
}

}  // namespace

Eigen::VectorXd moment_vector(const DiscreteMeasure& m) { return eigenfunction_values(m) * m.weights(); }

DirectionForm direction_form_from_matrix(const Eigen::MatrixXd& matrix) {
  DirectionForm form;
  form.matrix = 0.5 * (matrix + matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(form.matrix);
  form.eigenvalues = solver.eigenvalues();
  form.eigenvectors = solver.eigenvectors();
  const Eigen::Index d = form.eigenvalues.size();
  form.eig_max = form.eigenvalues(d - 1);
  form.eig_second = d >= 2 ? form.eigenvalues(d - 2) : form.eig_max;
  Eigen::VectorXd v = form.eigenvectors.col(d - 1);
  Eigen::Index pivot = 0;
  v.cwiseAbs().maxCoeff(&pivot);
  if (v(pivot) < 0.0) v = -v;
  form.max_direction = v;
  return form;
}

DirectionForm direction_form(const DiscreteMeasure& m) {
  const Eigen::MatrixXd values = eigenfunction_values(m);
  const Eigen::MatrixXd matrix = values * m.weights().asDiagonal() * values.transpose();
  return direction_form_from_matrix(matrix);
}

double bilinear_direct(const DiscreteMeasure& m, const Eigen::VectorXd& s, const Eigen::VectorXd& t) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    double xs = 0.0;
    double xt = 0.0;
    if (m.space().is_disk()) {
      xs = disk_eigenfunction(m.disk_point(i), s.head<2>());
      xt = disk_eigenfunction(m.disk_point(i), t.head<2>());
    } else {
      xs = m.points().col(i).dot(s);
      xt = m.points().col(i).dot(t);
    }
    sum += m.weights()(i) * xs * xt;
  }
  return sum;
}

double measure_distance(const DiscreteMeasure& m1, const DiscreteMeasure& m2) {
  if (!(m1.space() == m2.space())) throw Error(ErrorKind::SpaceMismatch, "measure_distance across spaces");
  double dist = std::abs(m1.total_mass() - m2.total_mass());
  dist = std::max(dist, (moment_vector(m1) - moment_vector(m2)).norm());
  const Eigen::MatrixXd diff = direction_form(m1).matrix - direction_form(m2).matrix;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(diff, Eigen::EigenvaluesOnly);
  dist = std::max(dist, solver.eigenvalues().cwiseAbs().maxCoeff());
  if (m1.space().is_disk()) {
    auto radial = [](const DiscreteMeasure& m, int power) {
      const Eigen::ArrayXd r2 = m.points().colwise().squaredNorm().transpose().array();
      return (r2.pow(power) * m.weights().array()).sum();
    };
    dist = std::max(dist, std::abs(radial(m1, 1) - radial(m2, 1)));
    dist = std::max(dist, std::abs(radial(m1, 2) - radial(m2, 2)));
  }
  return dist;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json measure_to_json(const DiscreteMeasure& m) {
  nlohmann::json doc;
  doc["schema"] = 1;
  doc["space"] = m.space().is_disk() ? "disk" : "sphere";
  doc["n"] = m.space().n;
  nlohmann::json atoms = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    nlohmann::json atom = nlohmann::json::array();
    for (Eigen::Index d = 0; d < m.points().rows(); ++d) atom.push_back(m.points()(d, i));
    atom.push_back(m.weights()(i));
    atoms.push_back(std::move(atom));
  }
  doc["atoms"] = std::move(atoms);
  return doc;
}

DiscreteMeasure measure_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("schema").get<int>() != 1) throw Error(ErrorKind::Io, "unsupported measure schema");
    const std::string kind = doc.at("space").get<std::string>();
    Space space;
    if (kind == "disk") {
      space = Space::disk();
    } else if (kind == "sphere") {
      space = Space::sphere(doc.at("n").get<int>());
    } else {
      throw Error(ErrorKind::Io, "unknown space tag '" + kind + "'");
    }
    const auto& atoms = doc.at("atoms");
    const int dim = space.ambient_dim();
    Eigen::MatrixXd pts(dim, static_cast<Eigen::Index>(atoms.size()));
    Eigen::VectorXd w(pts.cols());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const auto& atom = atoms[i];
      if (atom.size() != static_cast<std::size_t>(dim + 1)) throw Error(ErrorKind::Io, "atom has wrong arity");
      for (int d = 0; d < dim; ++d) pts(d, static_cast<Eigen::Index>(i)) = atom[d].get<double>();
      w(static_cast<Eigen::Index>(i)) = atom[dim].get<double>();
    }
    return DiscreteMeasure(space, std::move(pts), std::move(w));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, std::string("malformed measure document: ") + e.what());
  }
}

ConformalDomain domain_from_json(const nlohmann::json& doc) {
  try {
    std::vector<Complex> coeffs;
    for (const auto& c : doc.at("coeffs")) {
      if (c.is_number()) {
        coeffs.emplace_back(c.get<double>(), 0.0);
      } else {
        coeffs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
      }
    }
    return ConformalDomain(std::move(coeffs));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, std::string("malformed domain document: ") + e.what());
  }
}

nlohmann::json domain_to_json(const ConformalDomain& d) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const Complex& c : d.coeffs()) coeffs.push_back({c.real(), c.imag()});
  return {{"coeffs", coeffs}};
}

}  // namespace neumax
