#include "neumax/directions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "neumax/errors.hpp"

namespace neumax {

namespace {

constexpr double kPi = std::numbers::pi;

// Householder reflection sending unit v to e1 (identity when v is already e1).
Eigen::MatrixXd reflect_to_e1(const Eigen::VectorXd& v) {
  const Eigen::Index d = v.size();
  Eigen::VectorXd u = v;
  u(0) -= 1.0;
  if (u.norm() < 1e-14) return Eigen::MatrixXd::Identity(d, d);
  return Eigen::MatrixXd::Identity(d, d) - 2.0 * u * u.transpose() / u.squaredNorm();
}

// Orthonormal basis of the complement of unit p, as columns.
Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& p) {
  const Eigen::Index d = p.size();
  Eigen::MatrixXd m(d, d + 1);
  m.col(0) = p;
  m.rightCols(d) = Eigen::MatrixXd::Identity(d, d);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  return q.rightCols(d - 1);
}

}  // namespace

Classification classify(const DiscreteMeasure& m, double eps) {
  if (!(m.total_mass() > 0.0)) throw Error(ErrorKind::ZeroMass, "cannot classify a zero measure");
  Classification out;
  out.form = direction_form(m);
  out.gap = out.form.gap();
  out.multiple = out.gap < eps;
  out.direction = out.form.max_direction;
  return out;
}

Canonical canonicalize(const DiscreteMeasure& m, const RenormOptions& options) {
  const RenormResult renorm = renormalize(m, options);
  const DiscreteMeasure centered = moebius_pushforward(m, renorm.xi.xi);
  const Eigen::VectorXd v = direction_form(centered).max_direction;
  Eigen::MatrixXd orthogonal;
  if (m.space().is_disk()) {
    const double angle = std::atan2(v(1), v(0));
    orthogonal = Eigen::Rotation2Dd(-angle).toRotationMatrix();
  } else {
    orthogonal = reflect_to_e1(v);
  }
  return {rotate(centered, orthogonal), renorm.xi.xi, orthogonal};
}

double projective_angle(double a, double b) {
  double d = a - b;
  d -= kPi * std::round(d / kPi);
  if (d <= -0.5 * kPi) d += kPi;
  return d;
}

CapDirection cap_direction(const DiscreteMeasure& m, double r, double theta, const RenormOptions& options) {
  const Rearrangement re = rearrange(m, Cap::disk(r, theta), options);
  const Eigen::MatrixXd b = direction_form(re.nu).matrix;
  const double trace = b(0, 0) + b(1, 1);
  CapDirection out;
  out.r = r;
  out.theta = theta;
  out.field = Eigen::Vector2d(b(0, 0) - b(1, 1), 2.0 * b(0, 1)) / trace;
  out.gap = out.field.norm();
  out.angle = 0.5 * std::atan2(out.field(1), out.field(0));
  if (out.angle < 0.0) out.angle += kPi;
  out.direction = Eigen::Vector2d(std::cos(out.angle), std::sin(out.angle));
  return out;
}

int winding_from_field(const std::vector<CapDirection>& loop) {
  double total = 0.0;
  for (std::size_t j = 0; j < loop.size(); ++j) {
    if (loop[j].gap < 1e-9) throw Error(ErrorKind::DegenerateField, "direction field degenerate on the loop");
    const CapDirection& next = loop[(j + 1) % loop.size()];
    total += projective_angle(next.angle, loop[j].angle);
  }
  return static_cast<int>(std::lround(total / kPi));
}

int winding_diagnostic(const DiscreteMeasure& m, double r, int n_theta, const RenormOptions& options) {
  if (n_theta < 3) throw Error(ErrorKind::InvalidArgument, "winding needs at least 3 samples");
  std::vector<CapDirection> loop;
  for (int j = 0; j < n_theta; ++j) loop.push_back(cap_direction(m, r, 2.0 * kPi * j / n_theta, options));
  return winding_from_field(loop);
}

namespace {

// Winding number of the field vector around a grid cell.
int cell_index(const CapDirection& a, const CapDirection& b, const CapDirection& c, const CapDirection& d) {
  const CapDirection* corners[4] = {&a, &b, &c, &d};
  double total = 0.0;
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector2d& u = corners[k]->field;
    const Eigen::Vector2d& v = corners[(k + 1) % 4]->field;
    total += std::atan2(u(0) * v(1) - u(1) * v(0), u.dot(v));
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

struct Refined {
  double r;
  double theta;
  double gap;
};

Refined newton_refine(const DiscreteMeasure& m, double r, double theta, double target,
                      const RenormOptions& options) {
  constexpr double kStep = 1e-5;
  constexpr double kRMax = 0.995;
  CapDirection cur = cap_direction(m, r, theta, options);
  for (int iter = 0; iter < 12 && cur.gap >= target; ++iter) {
    Eigen::Matrix2d jac;
    const double hr = (cur.r + kStep > kRMax) ? -kStep : kStep;
    jac.col(0) = (cap_direction(m, cur.r + hr, cur.theta, options).field - cur.field) / hr;
    jac.col(1) = (cap_direction(m, cur.r, cur.theta + kStep, options).field -
                  cap_direction(m, cur.r, cur.theta - kStep, options).field) /
                 (2.0 * kStep);
    Eigen::Vector2d step = -jac.fullPivLu().solve(cur.field);
    if (!step.allFinite()) break;
    const double scale = std::max({1.0, std::abs(step(0)) / 0.2, std::abs(step(1)) / 0.3});
    step /= scale;
    bool improved = false;
    for (int halving = 0; halving < 6; ++halving) {
      const double nr = std::clamp(cur.r + step(0), -kRMax, kRMax);
      const CapDirection trial = cap_direction(m, nr, cur.theta + step(1), options);
      if (trial.gap < cur.gap) {
        cur = trial;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  double theta_out = std::fmod(cur.theta, 2.0 * kPi);
  if (theta_out < 0.0) theta_out += 2.0 * kPi;
  return {cur.r, theta_out, cur.gap};
}

}  // namespace

CapScanResult scan_caps(const DiscreteMeasure& m, const std::vector<double>& r_grid,
                        const std::vector<double>& theta_grid, double eps, const RenormOptions& options) {
  if (!m.space().is_disk()) throw Error(ErrorKind::SpaceMismatch, "scan_caps works on disk measures");
  if (r_grid.size() < 2 || theta_grid.size() < 3) throw Error(ErrorKind::InvalidArgument, "scan grid too small");
  const std::size_t nr = r_grid.size();
  const std::size_t nt = theta_grid.size();

  CapScanResult result;
  for (double r : r_grid) {
    for (double theta : theta_grid) result.field.push_back(cap_direction(m, r, theta, options));
  }
  auto at = [&](std::size_t i, std::size_t j) -> const CapDirection& { return result.field[i * nt + (j % nt)]; };

  for (std::size_t i = 0; i < nr; ++i) {
    std::vector<CapDirection> loop(result.field.begin() + i * nt, result.field.begin() + (i + 1) * nt);
    try {
      result.winding_numbers.emplace_back(r_grid[i], winding_from_field(loop));
    } catch (const Error&) {
      result.winding_numbers.emplace_back(r_grid[i], 0);
    }
  }

  // Refinement starts: cells enclosing a zero of the field first, then the
  // best grid samples.
  struct Start {
    double r;
    double theta;
    double score;
  };
  std::vector<Start> starts;
  for (std::size_t i = 0; i + 1 < nr; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const double t0 = theta_grid[j];
      const double t1 = (j + 1 < nt) ? theta_grid[j + 1] : theta_grid[0] + 2.0 * kPi;
      if (cell_index(at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)) != 0) {
        const double score = std::min({at(i, j).gap, at(i + 1, j).gap, at(i + 1, j + 1).gap, at(i, j + 1).gap});
        starts.push_back({0.5 * (r_grid[i] + r_grid[i + 1]), 0.5 * (t0 + t1), score});
      }
    }
  }
  std::sort(starts.begin(), starts.end(), [](const Start& a, const Start& b) { return a.score < b.score; });
  std::vector<std::size_t> order(result.field.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return result.field[a].gap < result.field[b].gap; });
  for (std::size_t k = 0; k < std::min<std::size_t>(3, order.size()); ++k) {
    const CapDirection& c = result.field[order[k]];
    starts.push_back({c.r, c.theta, c.gap});
  }

  Refined best{result.field[order[0]].r, result.field[order[0]].theta, result.field[order[0]].gap};
  const double target = std::min(eps, 1e-6);
  for (std::size_t k = 0; k < starts.size() && k < 8; ++k) {
    const Refined cand = newton_refine(m, starts[k].r, starts[k].theta, target, options);
    ++result.refinements;
    if (cand.gap < best.gap) best = cand;
    if (best.gap < target) break;
  }
  result.cap = Cap::disk(best.r, best.theta);
  result.gap = best.gap;
  if (!(best.gap < eps)) {
    std::ostringstream msg;
    msg << "no multiple cap: best gap " << best.gap << " at r=" << best.r << ", theta=" << best.theta;
    throw Error(ErrorKind::NotFound, msg.str());
  }
  return result;
}

// ---------------------------------------------------------------------------
// Sphere degree

namespace {

Eigen::VectorXd psi_map(const Eigen::VectorXd& p) {
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(p.size());
  e1(0) = 1.0;
  return 2.0 * p(0) * p - e1;
}

// Central differences of psi along the tangent basis at p.
Eigen::MatrixXd psi_jacobian(const Eigen::VectorXd& p, const Eigen::MatrixXd& basis) {
  constexpr double h = 1e-6;
  Eigen::MatrixXd jac(p.size(), basis.cols());
  for (Eigen::Index k = 0; k < basis.cols(); ++k) {
    const Eigen::VectorXd plus = (p + h * basis.col(k)).normalized();
    const Eigen::VectorXd minus = (p - h * basis.col(k)).normalized();
    jac.col(k) = (psi_map(plus) - psi_map(minus)) / (2.0 * h);
  }
  return jac;
}

std::vector<Eigen::VectorXd> psi_preimages(const Eigen::VectorXd& y, const std::vector<Eigen::VectorXd>& starts) {
  std::vector<Eigen::VectorXd> found;
  for (const auto& start : starts) {
    Eigen::VectorXd p = start.normalized();
    bool converged = false;
    for (int iter = 0; iter < 60; ++iter) {
      const Eigen::VectorXd residual = psi_map(p) - y;
      if (residual.norm() < 1e-12) {
        converged = true;
        break;
      }
      const Eigen::MatrixXd basis = tangent_basis(p);
      const Eigen::MatrixXd jac = psi_jacobian(p, basis);
      Eigen::VectorXd t = jac.completeOrthogonalDecomposition().solve(-residual);
      if (t.norm() > 0.5) t *= 0.5 / t.norm();
      p = (p + basis * t).normalized();
    }
    if (!converged) continue;
    const bool duplicate =
        std::any_of(found.begin(), found.end(), [&](const Eigen::VectorXd& q) { return (q - p).norm() < 1e-7; });
    if (!duplicate) found.push_back(p);
  }
  return found;
}

int local_sign(const Eigen::VectorXd& p) {
  const Eigen::MatrixXd basis = tangent_basis(p);
  const Eigen::MatrixXd jac = psi_jacobian(p, basis);
  const Eigen::Index d = p.size();
  Eigen::MatrixXd source(d, d);
  Eigen::MatrixXd image(d, d);
  source.col(0) = p;
  source.rightCols(d - 1) = basis;
  image.col(0) = psi_map(p);
  image.rightCols(d - 1) = jac;
  const double s = source.determinant() * image.determinant();
  if (std::abs(s) < 1e-10) throw Error(ErrorKind::DegenerateField, "target is not a regular value");
  return s > 0 ? 1 : -1;
}

}  // namespace

DegreeResult sphere_degree_check(int n, const std::vector<Eigen::VectorXd>& grid, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "sphere dimension must be positive");
  if (n % 2 == 0) throw Error(ErrorKind::EvenDimension, "the degree argument needs odd n");
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty starting grid");
  for (const auto& g : grid) {
    if (g.size() != n + 1) throw Error(ErrorKind::SpaceMismatch, "grid point dimension mismatch");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd y(n + 1);
  for (int k = 0; k <= n; ++k) y(k) = gauss(rng);
  y.normalize();

  DegreeResult out;
  const auto plus = psi_preimages(y, grid);
  const auto minus = psi_preimages(-y, grid);
  for (const auto& p : plus) out.deg_psi += local_sign(p);
  int deg_minus = 0;
  for (const auto& p : minus) deg_minus += local_sign(p);
  // The antipodal map has degree (-1)^{n+1}; the projection to RP^n counts both sheets.
  const int antipodal = (n % 2 == 1) ? 1 : -1;
  out.deg_phi = out.deg_psi + antipodal * deg_minus;
  out.preimages = static_cast<int>(plus.size() + minus.size());
  return out;
}

// ---------------------------------------------------------------------------
// Sphere cap scan

namespace {

struct SphereEval {
  Cap cap;
  Eigen::VectorXd xi;
  DiscreteMeasure nu;
  Eigen::MatrixXd form;
  double gap;
};

SphereEval sphere_eval(const DiscreteMeasure& m, double r, const Eigen::VectorXd& p, const RenormOptions& options) {
  const Cap cap = Cap::sphere(r, p);
  SphereRearrangement re = rearrange_sphere(m, cap, options);
  const DirectionForm form = direction_form(re.nu);
  return {cap, re.xi, std::move(re.nu), form.matrix, form.gap()};
}

Eigen::Vector2d block_field(const Eigen::MatrixXd& form, const Eigen::MatrixXd& u) {
  const Eigen::Matrix2d c = u.transpose() * form * u;
  return Eigen::Vector2d(c(0, 0) - c(1, 1), 2.0 * c(0, 1)) / c.trace();
}

Eigen::MatrixXd top_two(const Eigen::MatrixXd& form) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(form);
  return solver.eigenvectors().rightCols(2);
}

}  // namespace

SphereCapScanResult sphere_scan_caps(const DiscreteMeasure& m, double eps, const RenormOptions& options) {
  if (m.space().is_disk()) throw Error(ErrorKind::SpaceMismatch, "sphere_scan_caps needs a sphere measure");
  const int n = m.space().n;
  if (n % 2 == 0) throw Error(ErrorKind::DimensionUnsupported, "the sphere scan covers odd dimensions only");
  const int d = n + 1;

  std::vector<Eigen::VectorXd> directions;
  for (int k = 0; k < d; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e(k) = 1.0;
    directions.push_back(e);
    directions.push_back(-e);
  }
  std::mt19937_64 rng(options.seed + 17);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < 32; ++k) {
    Eigen::VectorXd v(d);
    for (int c = 0; c < d; ++c) v(c) = gauss(rng);
    directions.push_back(v.normalized());
  }

  std::vector<SphereEval> coarse;
  for (double r : {-0.5, 0.0, 0.5, 0.8}) {
    for (const auto& p : directions) coarse.push_back(sphere_eval(m, r, p, options));
  }
  std::sort(coarse.begin(), coarse.end(), [](const SphereEval& a, const SphereEval& b) { return a.gap < b.gap; });

  const double target = std::min(eps, 1e-6);
  SphereEval best = coarse.front();
  for (std::size_t start = 0; start < std::min<std::size_t>(4, coarse.size()) && best.gap >= target; ++start) {
    SphereEval cur = coarse[start];
    for (int iter = 0; iter < 20 && cur.gap >= target; ++iter) {
      const Eigen::MatrixXd u = top_two(cur.form);
      const Eigen::MatrixXd basis = tangent_basis(cur.cap.p);
      const Eigen::Vector2d f0 = block_field(cur.form, u);
      constexpr double h = 1e-5;
      Eigen::MatrixXd jac(2, d);
      auto param_eval = [&](const Eigen::VectorXd& x) {
        const double r = std::clamp(cur.cap.r + x(0), -0.99, 0.99);
        const Eigen::VectorXd p = (cur.cap.p + basis * x.tail(d - 1)).normalized();
        return sphere_eval(m, r, p, options);
      };
      for (int k = 0; k < d; ++k) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
        x(k) = h;
        const Eigen::Vector2d fp = block_field(param_eval(x).form, u);
        const Eigen::Vector2d fm = block_field(param_eval(-x).form, u);
        jac.col(k) = (fp - fm) / (2.0 * h);
      }
      Eigen::VectorXd step = -jac.transpose() * (jac * jac.transpose()).ldlt().solve(f0);
      if (!step.allFinite()) break;
      if (step.norm() > 0.3) step *= 0.3 / step.norm();
      bool improved = false;
      for (int halving = 0; halving < 6; ++halving) {
        SphereEval trial = param_eval(step);
        if (trial.gap < cur.gap) {
          cur = std::move(trial);
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    if (cur.gap < best.gap) best = std::move(cur);
  }
  if (!(best.gap < eps)) {
    throw Error(ErrorKind::NotFound, "no multiple spherical cap: best gap " + std::to_string(best.gap));
  }
  return {best.cap, best.gap, best.xi, std::move(best.nu)};
}

}  // namespace neumax
