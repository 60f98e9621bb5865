#include "neumax/caps.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "neumax/errors.hpp"
#include "neumax/quadrature.hpp"

namespace neumax {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

void check_cap(double r, double pnorm) {
  if (!(r > -1.0 && r < 1.0)) throw Error(ErrorKind::InvalidArgument, "cap parameter r must lie in (-1, 1)");
  if (std::abs(pnorm - 1.0) > 1e-9) throw Error(ErrorKind::InvalidArgument, "cap direction must be a unit vector");
}

}  // namespace

Cap Cap::disk(double r, double angle) { return disk(r, std::polar(1.0, angle)); }

Cap Cap::disk(double r, Complex p) {
  check_cap(r, std::abs(p));
  p /= std::abs(p);
  return Cap{Space::disk(), r, Eigen::Vector2d(p.real(), p.imag())};
}

Cap Cap::sphere(double r, const Eigen::VectorXd& p) {
  check_cap(r, p.norm());
  return Cap{Space::sphere(static_cast<int>(p.size()) - 1), r, p.normalized()};
}

bool in_cap(const Cap& a, Complex z, double tol) {
  const Complex w = disk_moebius(-a.center(), z);
  return (w * std::conj(a.p_complex())).real() >= -tol;
}

bool in_cap(const Cap& a, const Eigen::VectorXd& x, double tol) {
  if (a.space.is_disk()) return in_cap(a, Complex(x(0), x(1)), tol);
  return x.dot(a.p) >= 2.0 * a.r / (1.0 + a.r * a.r) - tol;
}

Complex cap_reflection(const Cap& a, Complex z) {
  const Complex c = a.center();
  return disk_moebius(c, reflection(a.p_complex(), disk_moebius(-c, z)));
}

Eigen::VectorXd cap_reflection(const Cap& a, const Eigen::VectorXd& x) {
  if (a.space.is_disk()) {
    const Complex w = cap_reflection(a, Complex(x(0), x(1)));
    return Eigen::Vector2d(w.real(), w.imag());
  }
  const Eigen::VectorXd c = a.r * a.p;
  return ball_moebius(c, reflection(a.p, ball_moebius(-c, x)));
}

double cap_reflection_stretch(const Cap& a, Complex z) {
  const Complex c = a.center();
  const Complex w = disk_moebius(-c, z);
  return std::abs(disk_moebius_derivative(c, reflection(a.p_complex(), w))) *
         std::abs(disk_moebius_derivative(-c, z));
}

std::vector<Complex> cap_boundary_samples(const Cap& a, int count) {
  std::vector<Complex> out;
  const Complex ip = kI * a.p_complex();
  for (int k = 0; k < count; ++k) {
    const double t = -1.0 + 2.0 * (k + 0.5) / count;
    out.push_back(disk_moebius(a.center(), t * ip));
  }
  return out;
}

DiscreteMeasure fold_measure(const DiscreteMeasure& m, const Cap& a) {
  if (!(m.space() == a.space)) throw Error(ErrorKind::SpaceMismatch, "cap and measure live on different spaces");
  Eigen::MatrixXd pts = m.points();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!in_cap(a, Eigen::VectorXd(pts.col(i)))) pts.col(i) = cap_reflection(a, Eigen::VectorXd(pts.col(i)));
  }
  return m.with_points(std::move(pts));
}

Cap moebius_image(const Cap& a, Complex xi) {
  const Complex c = a.center();
  const Complex p = a.p_complex();
  const Complex e1 = disk_moebius(xi, disk_moebius(c, kI * p));
  const Complex e2 = disk_moebius(xi, disk_moebius(c, -kI * p));
  const Complex inside = disk_moebius(xi, disk_moebius(c, 0.5 * p));

  const Complex sum = e1 + e2;
  double t = 0.0;
  Complex m;
  if (std::abs(sum) < 1e-14) {
    m = kI * e1;
  } else {
    m = sum / std::abs(sum);
    const Complex rel = e1 * std::conj(m);
    const double beta = std::atan2(std::abs(rel.imag()), rel.real());
    t = std::tan(0.25 * kPi - 0.5 * beta);
  }
  const Cap candidate{Space::disk(), t, Eigen::Vector2d(m.real(), m.imag())};
  if (in_cap(candidate, inside)) return candidate;
  return Cap{Space::disk(), -t, Eigen::Vector2d(-m.real(), -m.imag())};
}

// ---------------------------------------------------------------------------
// Cap-to-disk map

namespace {

// Cayley after Joukowski, (w^2 + 2iw + 1) / (w^2 - 2iw + 1).
Complex cayley_joukowski(Complex w) {
  const Complex w2 = w * w;
  return (w2 + 2.0 * kI * w + 1.0) / (w2 - 2.0 * kI * w + 1.0);
}

Complex cayley_joukowski_derivative(Complex w) {
  const Complex d = w * w - 2.0 * kI * w + 1.0;
  return 4.0 * kI * (1.0 - w * w) / (d * d);
}

Complex cayley_joukowski_inverse(Complex u) {
  const Complex gap = 1.0 - u;
  if (std::abs(gap) < 1e-300) return 0.0;
  const Complex k = kI * (1.0 + u) / gap;
  const Complex root = std::sqrt(k * k - 1.0);
  const Complex big1 = -k + root;
  const Complex big2 = -k - root;
  const Complex big = std::abs(big1) >= std::abs(big2) ? big1 : big2;
  return 1.0 / big;
}

}  // namespace

CapToDisk::CapToDisk(const Cap& b) : cap_(b) {
  if (!b.space.is_disk()) throw Error(ErrorKind::SpaceMismatch, "cap_to_disk needs a disk cap");
  center_ = b.center();
  rotation_ = kI * std::conj(b.p_complex());
  anchor_ = 0.5 * (1.0 + b.r) * b.p_complex();
  anchor_image_ = raw(anchor_);
  const Complex dh = raw_derivative(anchor_);
  phase_ = std::polar(1.0, -std::arg(dh));
}

Complex CapToDisk::raw(Complex z) const { return cayley_joukowski(rotation_ * disk_moebius(-center_, z)); }

Complex CapToDisk::raw_derivative(Complex z) const {
  const Complex w = rotation_ * disk_moebius(-center_, z);
  return cayley_joukowski_derivative(w) * rotation_ * disk_moebius_derivative(-center_, z);
}

Complex CapToDisk::raw_inverse(Complex u) const {
  return disk_moebius(center_, cayley_joukowski_inverse(u) / rotation_);
}

Complex CapToDisk::forward(Complex z) const {
  if (!in_cap(cap_, z, 1e-9)) throw Error(ErrorKind::EvaluationOutsideCap, "point outside the cap");
  const Complex u = raw(z);
  return disk_moebius(anchor_, phase_ * disk_moebius(-anchor_image_, u));
}

Complex CapToDisk::derivative(Complex z) const {
  if (!in_cap(cap_, z, 1e-9)) throw Error(ErrorKind::EvaluationOutsideCap, "point outside the cap");
  const Complex u = raw(z);
  const Complex v = phase_ * disk_moebius(-anchor_image_, u);
  return disk_moebius_derivative(anchor_, v) * phase_ * disk_moebius_derivative(-anchor_image_, u) *
         raw_derivative(z);
}

Complex CapToDisk::inverse(Complex w) const {
  const Complex u = disk_moebius(anchor_image_, disk_moebius(-anchor_, w) / phase_);
  return raw_inverse(u);
}

// ---------------------------------------------------------------------------
// Rearrangement

RearrangeMap::RearrangeMap(const Cap& a, const RearrangeTrace& trace)
    : cap_(a), xi_(trace.xi_a), eta_(trace.eta_a), phi_(trace.b) {}

Complex RearrangeMap::to_disk(Complex z) const {
  return disk_moebius(eta_, phi_.forward(disk_moebius(xi_, z)));
}

Complex RearrangeMap::from_disk(Complex w) const {
  return disk_moebius(-xi_, phi_.inverse(disk_moebius(-eta_, w)));
}

Complex RearrangeMap::from_disk_derivative(Complex w) const {
  const Complex w1 = disk_moebius(-eta_, w);
  const Complex w2 = phi_.inverse(w1);
  return disk_moebius_derivative(-xi_, w2) * phi_.inverse_derivative(w1) * disk_moebius_derivative(-eta_, w);
}

Rearrangement rearrange(const DiscreteMeasure& m, const Cap& a, const RenormOptions& options) {
  if (!m.space().is_disk() || !a.space.is_disk()) {
    throw Error(ErrorKind::SpaceMismatch, "rearrange works on disk measures; use rearrange_sphere");
  }
  const DiscreteMeasure folded = fold_measure(m, a);
  RearrangeTrace trace;
  trace.zeta_a_predicted = -2.0 * a.r / (1.0 + a.r * a.r) * a.p_complex();

  RenormOptions first = options;
  first.initial = Eigen::Vector2d(trace.zeta_a_predicted.real(), trace.zeta_a_predicted.imag());
  trace.xi_a = renormalize(folded, first).xi.as_complex();
  trace.b = moebius_image(a, trace.xi_a);
  const CapToDisk phi(trace.b);

  const Complex xi = trace.xi_a;
  const DiscreteMeasure mapped = folded.pushforward([&](Complex z) { return phi.forward(disk_moebius(xi, z)); });
  RenormOptions second = options;
  second.initial.reset();
  const RenormResult eta = renormalize(mapped, second);
  trace.eta_a = eta.xi.as_complex();
  trace.residual = eta.residual;

  const Complex zeta = trace.zeta_a_predicted;
  trace.eta_flipflop = disk_moebius(-zeta, xi);
  const Complex q = (std::conj(zeta) * trace.eta_flipflop + 1.0) / (zeta * std::conj(trace.eta_flipflop) + 1.0);
  trace.q_norm = std::abs(q);

  DiscreteMeasure nu = moebius_pushforward(mapped, eta.xi.xi);
  return {std::move(nu), trace};
}

SphereRearrangement rearrange_sphere(const DiscreteMeasure& m, const Cap& a, const RenormOptions& options) {
  if (m.space().is_disk() || !(m.space() == a.space)) {
    throw Error(ErrorKind::SpaceMismatch, "rearrange_sphere needs a sphere measure and cap");
  }
  const DiscreteMeasure folded = fold_measure(m, a);
  RenormOptions opts = options;
  if (!opts.initial) opts.initial = Eigen::VectorXd(-2.0 * a.r / (1.0 + a.r * a.r) * a.p);
  const RenormResult res = renormalize(folded, opts);
  return {moebius_pushforward(folded, res.xi.xi), res.xi.xi};
}

// ---------------------------------------------------------------------------
// Densities and subharmonic diagnostics

std::function<double(Complex)> pushed_density(std::function<double(Complex)> rho, Complex xi) {
  return [rho = std::move(rho), xi](Complex z) {
    return rho(disk_moebius(-xi, z)) * std::norm(disk_moebius_derivative(-xi, z));
  };
}

std::function<double(Complex)> rearranged_density(std::function<double(Complex)> rho, const Cap& a,
                                                  const RearrangeTrace& trace) {
  RearrangeMap psi(a, trace);
  return [rho = std::move(rho), a, psi](Complex w) {
    const Complex z = psi.from_disk(w);
    const double stretch = cap_reflection_stretch(a, z);
    const double folded = rho(z) + rho(cap_reflection(a, z)) * stretch * stretch;
    return folded * std::norm(psi.from_disk_derivative(w));
  };
}

namespace {

struct CellRule {
  std::array<double, 4> nodes;
  std::array<double, 4> weights;
};

const CellRule& cell_rule() {
  static const CellRule rule = [] {
    const QuadratureRule q = gauss_legendre(4, 0.0, 1.0);
    CellRule out;
    for (int k = 0; k < 4; ++k) {
      out.nodes[k] = q.nodes[k];
      out.weights[k] = q.weights[k];
    }
    return out;
  }();
  return rule;
}

double cell_gauss(const std::function<double(Complex)>& f, double r0, double r1, double t0, double t1) {
  const CellRule& rule = cell_rule();
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double rho = r0 + (r1 - r0) * rule.nodes[i];
    double ring = 0.0;
    for (int j = 0; j < 4; ++j) ring += rule.weights[j] * f(std::polar(rho, t0 + (t1 - t0) * rule.nodes[j]));
    sum += rule.weights[i] * rho * ring;
  }
  return sum * (r1 - r0) * (t1 - t0);
}

double cell_adaptive(const std::function<double(Complex)>& f, double r0, double r1, double t0, double t1,
                     double whole, double tol, int depth) {
  const double rm = 0.5 * (r0 + r1);
  const double tm = 0.5 * (t0 + t1);
  const double q00 = cell_gauss(f, r0, rm, t0, tm);
  const double q01 = cell_gauss(f, r0, rm, tm, t1);
  const double q10 = cell_gauss(f, rm, r1, t0, tm);
  const double q11 = cell_gauss(f, rm, r1, tm, t1);
  const double split = q00 + q01 + q10 + q11;
  if (depth <= 0 || std::abs(split - whole) <= tol) return split;
  const double sub_tol = 0.5 * tol;
  return cell_adaptive(f, r0, rm, t0, tm, q00, sub_tol, depth - 1) +
         cell_adaptive(f, r0, rm, tm, t1, q01, sub_tol, depth - 1) +
         cell_adaptive(f, rm, r1, t0, tm, q10, sub_tol, depth - 1) +
         cell_adaptive(f, rm, r1, tm, t1, q11, sub_tol, depth - 1);
}

}  // namespace

DiscreteMeasure density_cell_measure(const std::function<double(Complex)>& delta, int n_r, int n_theta) {
  if (n_r < 4 || n_theta < 4) throw Error(ErrorKind::InvalidArgument, "density_cell_measure needs n_r, n_theta >= 4");
  const QuadratureRule radial = gauss_legendre(n_r, 0.0, 1.0);
  std::vector<double> edges(n_r + 1, 0.0);
  for (int i = 0; i < n_r; ++i) edges[i + 1] = edges[i] + radial.weights[i];
  edges[n_r] = 1.0;

  const double dtheta = 2.0 * kPi / n_theta;
  Eigen::MatrixXd pts(2, static_cast<Eigen::Index>(n_r) * n_theta);
  Eigen::VectorXd w(pts.cols());
  for (int i = 0; i < n_r; ++i) {
    for (int j = 0; j < n_theta; ++j) {
      const Eigen::Index k = static_cast<Eigen::Index>(i) * n_theta + j;
      const double theta = j * dtheta;
      const double t0 = theta - 0.5 * dtheta;
      const double t1 = theta + 0.5 * dtheta;
      const double whole = cell_gauss(delta, edges[i], edges[i + 1], t0, t1);
      const double mass = cell_adaptive(delta, edges[i], edges[i + 1], t0, t1, whole, 1e-12, 14);
      if (!(mass >= 0.0)) throw Error(ErrorKind::NegativeDensity, "density negative on a grid cell");
      const Complex z = std::polar(radial.nodes[i], theta);
      pts(0, k) = z.real();
      pts(1, k) = z.imag();
      w(k) = mass;
    }
  }
  PolarGrid grid{radial.nodes, radial.weights, n_theta, edges};
  return DiscreteMeasure(Space::disk(), std::move(pts), std::move(w), std::move(grid));
}

namespace {

// Barycentric interpolation through Gauss-Legendre nodes on [0, 1].
class GaussInterpolant {
 public:
  GaussInterpolant(const std::vector<double>& nodes, const std::vector<double>& weights,
                   const std::vector<double>& values)
      : nodes_(nodes), values_(values), bary_(nodes.size()) {
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double t = 2.0 * nodes[j] - 1.0;
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      bary_[j] = sign * std::sqrt((1.0 - t * t) * 2.0 * weights[j]);
    }
  }

  double operator()(double x) const {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      const double diff = x - nodes_[j];
      if (diff == 0.0) return values_[j];
      const double c = bary_[j] / diff;
      num += c * values_[j];
      den += c;
    }
    return num / den;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> bary_;
};

}  // namespace

SubharmonicReport subharmonic_diagnostics(const DiscreteMeasure& nu) {
  if (!nu.space().is_disk() || !nu.grid()) throw Error(ErrorKind::GridMismatch, "measure carries no polar grid");
  const PolarGrid& grid = *nu.grid();
  const int n_r = static_cast<int>(grid.radii.size());
  if (grid.n_theta < 1 || nu.size() != static_cast<Eigen::Index>(n_r) * grid.n_theta) {
    throw Error(ErrorKind::GridMismatch, "atom count does not match the grid layout");
  }
  if (!(nu.total_mass() > 0.0)) throw Error(ErrorKind::ZeroMass, "empty measure");
  const double scale = kPi / nu.total_mass();

  std::vector<double> ring(n_r, 0.0);
  for (int i = 0; i < n_r; ++i) {
    for (int j = 0; j < grid.n_theta; ++j) ring[i] += nu.weights()(static_cast<Eigen::Index>(i) * grid.n_theta + j);
    ring[i] *= scale;
  }

  SubharmonicReport report;
  report.radii = grid.radii;
  report.W.resize(n_r);
  if (!grid.edges.empty()) {
    if (grid.edges.size() != static_cast<std::size_t>(n_r + 1)) throw Error(ErrorKind::GridMismatch, "bad edge count");
    double cumulative = 0.0;
    report.g_radii.push_back(0.0);
    report.G.push_back(0.0);
    for (int i = 0; i < n_r; ++i) {
      const double e0 = grid.edges[i];
      const double e1 = grid.edges[i + 1];
      report.W[i] = ring[i] / (0.5 * (e1 * e1 - e0 * e0));
      cumulative += ring[i];
      report.g_radii.push_back(e1);
      report.G.push_back(cumulative);
    }
  } else {
    for (int i = 0; i < n_r; ++i) report.W[i] = ring[i] / (grid.radii[i] * grid.radial_weights[i]);
    const GaussInterpolant interp(grid.radii, grid.radial_weights, report.W);
    const QuadratureRule unit = gauss_legendre(2 * n_r, 0.0, 1.0);
    std::vector<double> checks = grid.radii;
    checks.push_back(1.0);
    for (double r : checks) {
      double g = 0.0;
      for (std::size_t k = 0; k < unit.nodes.size(); ++k) {
        const double rho = r * unit.nodes[k];
        g += unit.weights[k] * interp(rho) * rho;
      }
      report.g_radii.push_back(r);
      report.G.push_back(g * r);
    }
  }
  for (int i = 0; i + 1 < n_r; ++i) {
    report.monotonicity_violation = std::max(report.monotonicity_violation, report.W[i] - report.W[i + 1]);
  }
  for (std::size_t k = 0; k < report.G.size(); ++k) {
    const double diff = report.G[k] - kPi * report.g_radii[k] * report.g_radii[k];
    report.growth_violation = std::max(report.growth_violation, diff);
    report.max_growth_gap = std::max(report.max_growth_gap, std::abs(diff));
  }
  return report;
}

}  // namespace neumax
