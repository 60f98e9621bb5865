#include "neumax/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "neumax/errors.hpp"
#include "neumax/quadrature.hpp"
#include "neumax/specfun.hpp"

namespace neumax {

namespace {

constexpr double kPi = std::numbers::pi;

// |grad X_s| at w by central differences.
double eigenfunction_gradient(Complex w, const Eigen::Vector2d& s) {
  constexpr double h = 1e-6;
  const double dx = (disk_eigenfunction(w + h, s) - disk_eigenfunction(w - h, s)) / (2.0 * h);
  const double dy =
      (disk_eigenfunction(w + Complex(0.0, h), s) - disk_eigenfunction(w - Complex(0.0, h), s)) / (2.0 * h);
  return std::hypot(dx, dy);
}

}  // namespace

double lift_evaluate(const TestFunction& tf, Complex z) {
  if (!tf.trace) return disk_eigenfunction(z, tf.s);
  const RearrangeMap psi(tf.cap, *tf.trace);
  const Complex inside = in_cap(tf.cap, z) ? z : cap_reflection(tf.cap, z);
  return disk_eigenfunction(psi.to_disk(inside), tf.s);
}

double dirichlet_energy_closed_form() {
  return 2.0 * specfun::mu1_disk() * kPi * specfun::radial_l2_integral();
}

double dirichlet_energy_quadrature(const TestFunction& tf, int n_r, int n_theta) {
  const QuadratureRule radial = gauss_legendre(n_r, 0.0, 1.0);
  if (!tf.trace) {
    const QuadratureRule angular = gauss_legendre(n_theta, 0.0, 2.0 * kPi);
    double sum = 0.0;
    for (int i = 0; i < n_r; ++i) {
      for (int j = 0; j < n_theta; ++j) {
        const double g = eigenfunction_gradient(std::polar(radial.nodes[i], angular.nodes[j]), tf.s);
        sum += radial.weights[i] * angular.weights[j] * radial.nodes[i] * g * g;
      }
    }
    return sum;
  }
  const RearrangeMap psi(tf.cap, *tf.trace);
  const Complex c = tf.cap.center();
  const double base_angle = std::arg(tf.cap.p_complex());
  const QuadratureRule angular = gauss_legendre(n_theta, -0.5 * kPi, 0.5 * kPi);

  // Half-disk a_{0,+-p} pushed by d_{rp} covers a (plus sign) and its complement.
  double total = 0.0;
  for (int side = 0; side < 2; ++side) {
    const double offset = side == 0 ? 0.0 : kPi;
    double sum = 0.0;
    for (int i = 0; i < n_r; ++i) {
      for (int j = 0; j < n_theta; ++j) {
        const Complex w = std::polar(radial.nodes[i], base_angle + offset + angular.nodes[j]);
        const Complex z = disk_moebius(c, w);
        const double jac = std::norm(disk_moebius_derivative(c, w)) * radial.nodes[i];
        double g = 0.0;
        if (side == 0) {
          const Complex v = psi.to_disk(z);
          g = eigenfunction_gradient(v, tf.s) / std::abs(psi.from_disk_derivative(v));
        } else {
          const Complex y = cap_reflection(tf.cap, z);
          const Complex v = psi.to_disk(y);
          g = eigenfunction_gradient(v, tf.s) / std::abs(psi.from_disk_derivative(v)) *
              cap_reflection_stretch(tf.cap, z);
        }
        sum += radial.weights[i] * angular.weights[j] * jac * g * g;
      }
    }
    total += sum;
  }
  return total;
}

L2Bound l2_lower_bound(const DiscreteMeasure& nu, const Eigen::Vector2d& s, double tolerance) {
  if (!nu.space().is_disk()) throw Error(ErrorKind::SpaceMismatch, "l2_lower_bound needs a disk measure");
  if (!(nu.total_mass() > 0.0)) throw Error(ErrorKind::ZeroMass, "empty measure");
  L2Bound out;
  out.gap = direction_form(nu).gap();
  if (out.gap > tolerance) {
    throw Error(ErrorKind::NotMultiple, "relative gap " + std::to_string(out.gap) + " exceeds tolerance");
  }
  const double scale = kPi / nu.total_mass();
  const Eigen::Vector2d unit = s.normalized();
  out.value = scale * bilinear_direct(nu, unit, unit);
  out.lower = kPi * specfun::radial_l2_integral();
  double avg = 0.0;
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    const double f = specfun::radial_profile(std::abs(nu.disk_point(i)));
    avg += nu.weights()(i) * f * f;
  }
  out.average = 0.5 * scale * avg;
  out.holds = out.value >= out.lower * (1.0 - kCertificateSlack);
  return out;
}

IbpCheck integration_by_parts_check(const DiscreteMeasure& nu) {
  if (!nu.space().is_disk()) throw Error(ErrorKind::SpaceMismatch, "integration_by_parts_check needs a disk measure");
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(nu.size());
  IbpCheck out;
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    const double r = std::abs(nu.disk_point(i));
    const double f = specfun::radial_profile(r);
    out.atom_sum += nu.weights()(i) * f * f;
    atoms.emplace_back(r, nu.weights()(i));
  }
  std::sort(atoms.begin(), atoms.end());
  // G is a step function; integrate (f^2)' = 2 f f' exactly between breakpoints.
  const QuadratureRule rule = gauss_legendre(6);
  double cumulative = 0.0;
  double integral = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    cumulative += atoms[k].second;
    const double lo = atoms[k].first;
    const double hi = (k + 1 < atoms.size()) ? atoms[k + 1].first : 1.0;
    if (hi <= lo) continue;
    double piece = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double r = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[q];
      piece += rule.weights[q] * 2.0 * specfun::radial_profile(r) * specfun::radial_profile_prime(r);
    }
    integral += cumulative * 0.5 * (hi - lo) * piece;
  }
  const double f1 = specfun::radial_profile(1.0);
  out.by_parts = f1 * f1 * cumulative - integral;
  return out;
}

double min_direction_value(const DirectionForm& form, Eigen::Vector2d* argmin) {
  auto value = [&](double t) {
    const Eigen::Vector2d s(std::cos(t), std::sin(t));
    return s.dot(form.matrix.topLeftCorner<2, 2>() * s);
  };
  constexpr int kSamples = 64;
  int best = 0;
  double best_value = value(0.0);
  for (int k = 1; k < kSamples; ++k) {
    const double v = value(kPi * k / kSamples);
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  const double step = kPi / kSamples;
  double lo = best * step - step;
  double hi = best * step + step;
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = value(x1);
  double f2 = value(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = value(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = value(x2);
    }
  }
  const double t = 0.5 * (lo + hi);
  const double result = std::min(best_value, value(t));
  if (argmin) *argmin = Eigen::Vector2d(std::cos(t), std::sin(t));
  return result;
}

BoundReport planar_bound_certificate(const ConformalDomain& domain, const std::string& domain_id,
                                     const CertificateOptions& options) {
  BoundReport report;
  report.domain_id = domain_id;
  report.area = domain.area();
  const DiscreteMeasure mu = pullback_measure(domain, options.n_r, options.n_theta);
  const Canonical canon = canonicalize(mu, options.renorm);
  const Classification cls = classify(canon.measure, options.multiplicity_eps);
  const double energy_one = specfun::mu1_disk() * kPi * specfun::radial_l2_integral();

  if (cls.multiple) {
    report.branch = "multiple-direct";
    report.bound = specfun::mu1_disk();
    report.gap = cls.gap;
    DirectionForm scaled = direction_form(canon.measure.scaled(kPi / canon.measure.total_mass()));
    report.min_denominator = min_direction_value(scaled);
    report.quotient_sup = energy_one / report.min_denominator;
  } else {
    report.branch = "simple-folded";
    report.bound = 2.0 * specfun::mu1_disk();
    std::vector<double> r_grid = options.r_grid;
    if (r_grid.empty()) {
      for (int i = 0; i < 9; ++i) r_grid.push_back(-0.8 + 0.2 * i);
    }
    std::vector<double> theta_grid;
    for (int j = 0; j < options.n_theta_scan; ++j) theta_grid.push_back(2.0 * kPi * j / options.n_theta_scan);
    const CapScanResult scan = scan_caps(canon.measure, r_grid, theta_grid, options.multiplicity_eps, options.renorm);
    report.cap = scan.cap;
    const Rearrangement re = rearrange(canon.measure, scan.cap, options.renorm);
    const DiscreteMeasure nu = re.nu.scaled(kPi / re.nu.total_mass());
    const DirectionForm form = direction_form(nu);
    report.gap = form.gap();
    report.min_denominator = min_direction_value(form);
    report.quotient_sup = 2.0 * energy_one / report.min_denominator;
  }
  report.margin = report.bound - report.quotient_sup;
  report.holds = report.quotient_sup <= report.bound * (1.0 + kCertificateSlack);
  return report;
}

nlohmann::json report_to_json(const BoundReport& report) {
  nlohmann::json doc;
  doc["domain"] = report.domain_id;
  doc["area"] = report.area;
  doc["quotient_sup"] = report.quotient_sup;
  doc["bound"] = report.bound;
  doc["margin"] = report.margin;
  doc["branch"] = report.branch;
  doc["gap"] = report.gap;
  doc["min_denominator"] = report.min_denominator;
  doc["slack"] = kCertificateSlack;
  doc["holds"] = report.holds;
  doc["inequality"] = report.branch == "multiple-direct" ? "szego" : "thm1.1";
  if (report.cap) {
    doc["cap"] = {{"r", report.cap->r}, {"angle", std::arg(report.cap->p_complex())}};
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Sphere

namespace {

Eigen::MatrixXd complement_basis(const Eigen::VectorXd& p) {
  const Eigen::Index d = p.size();
  Eigen::MatrixXd m(d, d + 1);
  m.col(0) = p;
  m.rightCols(d) = Eigen::MatrixXd::Identity(d, d);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  return q.rightCols(d - 1);
}

// Nodes and weights on S^{m} (m >= 0) as columns.
void unit_sphere_rule(int m, int resolution, Eigen::MatrixXd& nodes, Eigen::VectorXd& weights) {
  if (m == 0) {
    nodes = Eigen::RowVector2d(1.0, -1.0);
    weights = Eigen::Vector2d(1.0, 1.0);
    return;
  }
  const DiscreteMeasure rule = sphere_quadrature(m, resolution, [](const Eigen::VectorXd&) { return 1.0; });
  nodes = rule.points();
  weights = rule.weights();
}

double sphere_gradient_norm(const Eigen::VectorXd& s, const Eigen::VectorXd& y) {
  const double t = s.dot(y);
  return std::sqrt(std::max(0.0, 1.0 - t * t));
}

}  // namespace

double sphere_gradient_integral(int n, int resolution) {
  if (n < 1) throw Error(ErrorKind::DimensionUnsupported, "sphere dimension must be positive");
  // Polar angle from s: |grad X_s|^n = sin^n, times the sin^{n-1} area factor.
  // Slice areas follow |S^m| = |S^{m-1}| * int sin^{m-1} with the same rule.
  const QuadratureRule polar = gauss_legendre(2 * resolution, 0.0, kPi);
  auto sine_moment = [&](int power) {
    double sum = 0.0;
    for (std::size_t i = 0; i < polar.nodes.size(); ++i) sum += polar.weights[i] * std::pow(std::sin(polar.nodes[i]), power);
    return sum;
  };
  double slice = 2.0;
  for (int m = 1; m <= n - 1; ++m) slice *= sine_moment(m - 1);
  return slice * sine_moment(2 * n - 1);
}

double sphere_lift_value(const Cap& a, const Eigen::VectorXd& xi, const Eigen::VectorXd& s,
                         const Eigen::VectorXd& x) {
  const Eigen::VectorXd y = in_cap(a, x) ? x : cap_reflection(a, x);
  return s.dot(ball_moebius(xi, y));
}

double sphere_lift_gradient(const Cap& a, const Eigen::VectorXd& xi, const Eigen::VectorXd& s,
                            const Eigen::VectorXd& x) {
  if (in_cap(a, x)) return ball_moebius_stretch(xi, x) * sphere_gradient_norm(s, ball_moebius(xi, x));
  const Eigen::VectorXd c = a.r * a.p;
  const Eigen::VectorXd inner = ball_moebius(-c, x);
  const Eigen::VectorXd reflected = reflection(a.p, inner);
  const Eigen::VectorXd y = ball_moebius(c, reflected);
  const double tau_stretch = ball_moebius_stretch(c, reflected) * ball_moebius_stretch(-c, x);
  return ball_moebius_stretch(xi, y) * sphere_gradient_norm(s, ball_moebius(xi, y)) * tau_stretch;
}

SphereQuotient sphere_modified_quotient(const DiscreteMeasure& g, const Cap& a, const Eigen::VectorXd& s,
                                        int resolution, const RenormOptions& options) {
  if (g.space().is_disk()) throw Error(ErrorKind::SpaceMismatch, "sphere_modified_quotient needs a sphere measure");
  const int n = g.space().n;
  const DiscreteMeasure unit = g.scaled(1.0 / g.total_mass());
  SphereRearrangement re = rearrange_sphere(unit, a, options);
  const Eigen::VectorXd dir = s.normalized();

  // Polar grid on the cap {(x, p) >= c} around p.
  const double c = 2.0 * a.r / (1.0 + a.r * a.r);
  const double theta_max = std::acos(std::clamp(c, -1.0, 1.0));
  const QuadratureRule polar = gauss_legendre(2 * resolution, 0.0, theta_max);
  Eigen::MatrixXd inner_nodes;
  Eigen::VectorXd inner_weights;
  unit_sphere_rule(n - 1, resolution, inner_nodes, inner_weights);
  const Eigen::MatrixXd basis = complement_basis(a.p);
  double integral = 0.0;
  for (std::size_t i = 0; i < polar.nodes.size(); ++i) {
    const double theta = polar.nodes[i];
    const double jac = std::pow(std::sin(theta), n - 1) * polar.weights[i];
    for (Eigen::Index k = 0; k < inner_nodes.cols(); ++k) {
      const Eigen::VectorXd x = std::cos(theta) * a.p + std::sin(theta) * (basis * inner_nodes.col(k));
      const double lambda = ball_moebius_stretch(re.xi, x);
      const double grad = sphere_gradient_norm(dir, ball_moebius(re.xi, x));
      integral += jac * inner_weights(k) * std::pow(grad, n) * std::pow(lambda, n);
    }
  }
  SphereQuotient out{.numerator = std::pow(2.0 * integral, 2.0 / n),
                     .denominator = bilinear_direct(re.nu, dir, dir),
                     .quotient = 0.0,
                     .bound = specfun::bound_constants(n).theorem_constant,
                     .holds = false,
                     .xi = re.xi,
                     .nu = std::move(re.nu)};
  out.quotient = out.numerator / out.denominator;
  out.holds = out.quotient < out.bound;
  return out;
}

HolderResult holder_gap_check(int n, int resolution, const std::function<double(const Eigen::VectorXd&)>& u,
                              const std::function<double(const Eigen::VectorXd&)>& rho,
                              const std::function<double(const Eigen::VectorXd&)>& grad_norm) {
  const DiscreteMeasure base = sphere_quadrature(n, resolution, [](const Eigen::VectorXd&) { return 1.0; });
  const auto& pts = base.points();
  const auto& q = base.weights();
  double volume = 0.0;
  std::vector<double> density(base.size());
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    density[i] = rho(pts.col(i));
    if (!(density[i] > 0.0)) throw Error(ErrorKind::NegativeDensity, "metric density must be positive");
    volume += q(i) * density[i];
  }
  double energy = 0.0;
  double n_energy = 0.0;
  double l2 = 0.0;
  constexpr double h = 1e-5;
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    const Eigen::VectorXd x = pts.col(i);
    double g = 0.0;
    if (grad_norm) {
      g = grad_norm(x);
    } else {
      const Eigen::MatrixXd frame = complement_basis(x);
      double sq = 0.0;
      for (Eigen::Index k = 0; k < frame.cols(); ++k) {
        const double d =
            (u((x + h * frame.col(k)).normalized()) - u((x - h * frame.col(k)).normalized())) / (2.0 * h);
        sq += d * d;
      }
      g = std::sqrt(sq);
    }
    const double dens = density[i] / volume;
    const double value = u(x);
    energy += q(i) * g * g * std::pow(dens, (n - 2.0) / n);
    n_energy += q(i) * std::pow(g, n);
    l2 += q(i) * value * value * dens;
  }
  HolderResult out;
  out.R = energy / l2;
  out.Rprime = std::pow(n_energy, 2.0 / n) / l2;
  // For n = 1 the exponent n/2 is below 1 and the inequality reverses.
  out.holds = (n >= 2) ? out.R <= out.Rprime + 1e-10 : out.Rprime <= out.R + 1e-10;
  out.equality = std::abs(out.R - out.Rprime) < 1e-8;
  return out;
}

}  // namespace neumax
