// Acceptance checks. Run with a criterion number (1-12) or with no argument
// for all of them; prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "neumax/bounds.hpp"
#include "neumax/caps.hpp"
#include "neumax/directions.hpp"
#include "neumax/errors.hpp"
#include "neumax/fem.hpp"
#include "neumax/measures.hpp"
#include "neumax/moebius.hpp"
#include "neumax/specfun.hpp"

using namespace neumax;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail] " << what << "; ";
    }
  }
  void note(const std::string& text) { detail << text << "; "; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

DiscreteMeasure uniform_disk() {
  return disk_quadrature(48, 96, [](Complex) { return 1.0; });
}

Eigen::Vector2d vec(Complex z) { return {z.real(), z.imag()}; }

// The measure the planar checks run on: pullback of z + 0.3 z^2,
// renormalized and rotated so that [e1] maximizes.
const DiscreteMeasure& quadratic_canonical() {
  static const DiscreteMeasure m = canonicalize(pullback_measure(ConformalDomain({1.0, 0.3}))).measure;
  return m;
}

// ---------------------------------------------------------------------------

void c01(Outcome& o) {
  const double z2 = std::pow(specfun::find_zeta(), 2);
  const double bound = specfun::planar_bound();
  o.note("zeta^2 = " + fmt("%.8f", z2) + ", 2 zeta^2 pi = " + fmt("%.6f", bound));
  o.require(z2 >= 3.3899 && z2 <= 3.3900, "zeta^2 in [3.3899, 3.3900]");
  o.require(bound >= 21.29 && bound <= 21.31, "planar bound in [21.29, 21.31]");
  o.require(std::abs(bound - 2.0 * z2 * kPi) < 1e-12, "planar bound equals 2 zeta^2 pi");
}

void c02(Outcome& o) {
  double prev = 0.0;
  int outside = 0;
  int rises = 0;
  for (int n = 1; n <= 99; n += 2) {
    const double ratio = specfun::bound_constants(n).ratio;
    if (!(ratio > 1.0 && ratio < 1.04)) {
      ++outside;
      o.note("ratio(" + std::to_string(n) + ") = " + fmt("%.6f", ratio) + " outside (1, 1.04)");
    }
    if (n >= 5 && !(ratio < prev)) {
      ++rises;
      o.note("ratio(" + std::to_string(n) + ") = " + fmt("%.6f", ratio) + " >= ratio(" + std::to_string(n - 2) +
             ") = " + fmt("%.6f", prev));
    }
    prev = ratio;
  }
  o.require(outside == 0, "every odd n in [1, 99] has ratio in (1, 1.04)");
  o.require(rises == 0, "ratio decreasing over odd n >= 3");
}

void c03(Outcome& o) {
  double worst = 0.0;
  for (int n = 1; n <= 12; ++n) {
    const double closed = specfun::k_n(n);
    const double quad = sphere_gradient_integral(n, 24);
    worst = std::max(worst, std::abs(closed - quad) / closed);
  }
  o.note("worst relative gap " + fmt("%.2e", worst));
  o.require(worst < 1e-8, "closed form matches quadrature to 1e-8");
  o.require(std::abs(specfun::k_n(1) - 4.0) < 1e-10, "K_1 = 4");
  o.require(std::abs(specfun::k_n(3) - 64.0 * kPi / 15.0) < 1e-10, "K_3 = 64 pi / 15");
}

void c04(Outcome& o) {
  const DiscreteMeasure uniform = uniform_disk();
  const double u = std::abs(renormalize(uniform).xi.as_complex());
  const DiscreteMeasure symmetric =
      disk_quadrature(48, 96, [](Complex z) { return 1.0 + 0.5 * std::real(z * z) + 0.3 * std::norm(z); });
  const double s = std::abs(renormalize(symmetric).xi.as_complex());
  o.note("uniform |xi| = " + fmt("%.1e", u) + ", symmetric |xi| = " + fmt("%.1e", s));
  o.require(u < 1e-9 && s < 1e-9, "symmetric measures are already renormalized");

  auto planted = [&](Complex xi) {
    const DiscreteMeasure m = moebius_pushforward(uniform, vec(-xi));
    return std::abs(renormalize(m).xi.as_complex() - xi);
  };
  const double e1 = planted(-0.3);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Complex random_xi = std::polar(0.7 * std::sqrt(unif(rng)), 2.0 * kPi * unif(rng));
  const double e2 = planted(random_xi);
  o.note("planted errors " + fmt("%.1e", e1) + ", " + fmt("%.1e", e2));
  o.require(e1 < 1e-8 && e2 < 1e-8, "planted renormalizers recovered to 1e-8");

  const DiscreteMeasure mu = pullback_measure(ConformalDomain({1.0, 0.3, 0.1}));
  const Complex base = renormalize(mu).xi.as_complex();
  double spread = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RenormOptions opt;
    opt.seed = seed;
    spread = std::max(spread, std::abs(renormalize(mu, opt).xi.as_complex() - base));
  }
  o.note("restart spread " + fmt("%.1e", spread));
  o.require(spread < 1e-9, "20 random restarts agree to 1e-9");
}

void c05(Outcome& o) {
  const DiscreteMeasure uniform = uniform_disk();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double r = 0.85 * unif(rng);
    const double angle = kPi * unif(rng);
    const Cap a = Cap::disk(r, angle);
    const DiscreteMeasure folded = uniform.pushforward([&](Complex z) { return cap_reflection(a, z); });
    const Complex xi = renormalize(folded).xi.as_complex();
    const Complex predicted = -2.0 * r / (1.0 + r * r) * a.p_complex();
    worst = std::max(worst, std::abs(xi - predicted));
  }
  o.note("worst deviation " + fmt("%.2e", worst));
  o.require(worst < 1e-6, "renormalizer of the reflected uniform measure is -2r/(1+r^2) p");
}

void c06(Outcome& o) {
  const DiscreteMeasure& mu = quadratic_canonical();
  for (Complex p : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
    const DiscreteMeasure reflected = mu.pushforward([&](Complex z) { return reflection(p, z); });
    double prev = std::numeric_limits<double>::infinity();
    std::string row;
    bool decreasing = true;
    double last = 0.0;
    for (double r : {0.9, 0.95, 0.99, 0.995}) {
      const Rearrangement re = rearrange(mu, Cap::disk(r, p));
      last = measure_distance(re.nu, reflected);
      row += fmt(" %.3e", last);
      decreasing = decreasing && last < prev;
      prev = last;
    }
    o.note("p = " + fmt("%.0f", p.real()) + "+" + fmt("%.0f", p.imag()) + "i distances" + row);
    o.require(decreasing, "distance strictly decreasing in r");
    o.require(last < 0.05, "distance below 0.05 at r = 0.995");
  }
}

void c07(Outcome& o) {
  const DiscreteMeasure& mu = quadratic_canonical();
  double worst_low = 0.0, worst_high = 0.0;
  for (int j = 0; j < 24; ++j) {
    const double theta = 2.0 * kPi * j / 24;
    worst_low = std::max(worst_low, std::abs(projective_angle(cap_direction(mu, -0.95, theta).angle, 0.0)));
    worst_high = std::max(worst_high, std::abs(projective_angle(cap_direction(mu, 0.95, theta).angle, 2.0 * theta)));
  }
  o.note("max deviation " + fmt("%.3f", worst_low * 180 / kPi) + " deg at r=-0.95, " +
         fmt("%.3f", worst_high * 180 / kPi) + " deg at r=0.95");
  o.require(worst_low < 5.0 * kPi / 180, "direction within 5 deg of [e1] at r = -0.95");
  o.require(worst_high < 10.0 * kPi / 180, "direction within 10 deg of [e^{2i theta}] at r = 0.95");
  const int w_low = winding_diagnostic(mu, -0.95, 32);
  const int w_high = winding_diagnostic(mu, 0.95, 32);
  o.note("winding " + std::to_string(w_low) + " and " + std::to_string(w_high));
  o.require(w_low == 0 && w_high == 4, "winding 0 at r = -0.95 and 4 at r = 0.95");
  std::vector<double> r_grid, theta_grid;
  for (int i = 0; i < 9; ++i) r_grid.push_back(-0.8 + 0.2 * i);
  for (int j = 0; j < 24; ++j) theta_grid.push_back(2.0 * kPi * j / 24);
  try {
    const CapScanResult scan = scan_caps(mu, r_grid, theta_grid, 1e-3);
    o.note("scan gap " + fmt("%.2e", scan.gap) + " at r = " + fmt("%.4f", scan.cap.r));
    o.require(scan.gap < 1e-3, "scan_caps reaches gap < 1e-3");
  } catch (const Error& e) {
    o.require(false, std::string("scan_caps: ") + e.what());
  }
}

void c08(Outcome& o) {
  const std::vector<std::vector<Complex>> corpus{{1.0, 0.3}, {1.0, 0.2, 0.05}, {1.0, 0.0, 0.15}};
  const std::vector<std::pair<double, double>> caps{{-0.5, 0.4}, {0.3, 1.0}, {0.7, -2.0}};
  double mono = 0.0, growth = 0.0;
  int count = 0;
  for (const auto& coeffs : corpus) {
    const ConformalDomain domain(coeffs);
    const DiscreteMeasure mu = pullback_measure(domain);
    const auto rho = [domain](Complex z) { return std::norm(domain.derivative(z)); };
    for (const auto& [r, angle] : caps) {
      const Cap a = Cap::disk(r, angle);
      const Rearrangement re = rearrange(mu, a);
      const DiscreteMeasure nu = density_cell_measure(rearranged_density(rho, a, re.trace));
      const SubharmonicReport rep = subharmonic_diagnostics(nu);
      mono = std::max(mono, rep.monotonicity_violation);
      growth = std::max(growth, rep.growth_violation);
      ++count;
    }
  }
  o.note(std::to_string(count) + " rearranged measures, W violation " + fmt("%.2e", mono) + ", G violation " +
         fmt("%.2e", growth));
  o.require(mono <= 1e-6, "W monotone within 1e-6");
  o.require(growth <= 1e-6, "G(r) <= pi r^2 + 1e-6");
  const SubharmonicReport flat = subharmonic_diagnostics(uniform_disk());
  o.note("uniform max |G - pi r^2| = " + fmt("%.2e", flat.max_growth_gap));
  o.require(flat.max_growth_gap < 1e-10, "uniform measure saturates G(r) = pi r^2");
}

void c09(Outcome& o) {
  const std::vector<std::pair<std::string, std::vector<Complex>>> corpus{
      {"identity", {1.0}}, {"z+0.3z^2", {1.0, 0.3}}, {"z+0.2z^2+0.05z^3", {1.0, 0.2, 0.05}}};
  for (const auto& [name, coeffs] : corpus) {
    const BoundReport rep = planar_bound_certificate(ConformalDomain(coeffs), name);
    o.note(name + ": " + rep.branch + " quotient " + fmt("%.5f", rep.quotient_sup) + " bound " +
           fmt("%.5f", rep.bound));
    o.require(rep.quotient_sup <= rep.bound * 1.01, name + " quotient within the branch bound");
    if (name == "identity") {
      o.require(rep.branch == "multiple-direct", "identity takes the multiple branch");
      o.require(std::abs(rep.bound - specfun::mu1_disk()) < 1e-12, "identity bound is mu1(D)");
    }
  }
}

void c10(Outcome& o) {
  using namespace fem;
  const double z2 = specfun::mu1_disk();
  const double pi2 = kPi * kPi;
  auto solve = [](const DomainSpec& spec) { return neumann_eigs(build_mesh(spec, 0.02), 2); };
  const SpectralResult disk = solve(DomainSpec::disk(1.0));
  const SpectralResult square = solve(DomainSpec::rectangle(1.0, 1.0));
  const SpectralResult rect = solve(DomainSpec::rectangle(2.0, 1.0));
  o.note("disk mu1 " + fmt("%.5f", disk.eigenvalues[1]) + ", square mu1 mu2 " + fmt("%.5f", square.eigenvalues[1]) +
         " " + fmt("%.5f", square.eigenvalues[2]) + ", 2x1 mu2 A " + fmt("%.4f", rect.eigenvalues[2] * rect.area));
  o.require(std::abs(disk.eigenvalues[1] / z2 - 1.0) < 0.01, "disk mu1 within 1% of zeta^2");
  o.require(std::abs(square.eigenvalues[1] / pi2 - 1.0) < 0.01 && std::abs(square.eigenvalues[2] / pi2 - 1.0) < 0.01,
            "square mu1, mu2 within 1% of pi^2");
  o.require(std::abs(rect.eigenvalues[2] * rect.area / (2.0 * pi2) - 1.0) < 0.02, "2x1 mu2 A within 2% of 2 pi^2");
  const CorpusReport report = verify_corpus(standard_corpus(), 0.02);
  double max1 = 0.0, max2 = 0.0;
  for (const auto& e : report.entries) {
    o.require(e.error.empty(), e.spec.id + " solved (" + e.error + ")");
    max1 = std::max(max1, e.mu1_area);
    max2 = std::max(max2, e.mu2_area);
  }
  o.note(std::to_string(report.entries.size()) + " corpus domains, max mu1 A " + fmt("%.4f", max1) + ", max mu2 A " +
         fmt("%.4f", max2));
  o.require(max2 <= 21.30 * 1.02, "all mu2 A <= 21.30 x 1.02");
  o.require(max1 <= 10.65 * 1.02, "all mu1 A <= 10.65 x 1.02");
}

void c11(Outcome& o) {
  using namespace fem;
  constexpr double kLimit = 21.2989;
  constexpr double kFemTolerance = 0.01;
  double prev = 0.0;
  bool increasing = true;
  bool below = true;
  double last = 0.0;
  std::string row;
  for (double eps : {0.4, 0.2, 0.1, 0.05}) {
    const double h = std::min(0.02, eps / 4.0);
    const SpectralResult res = neumann_eigs(build_mesh(DomainSpec::two_disks_neck(eps, 0.2), h), 2);
    last = res.eigenvalues[2] * res.area;
    row += fmt(" %.4f", last);
    increasing = increasing && last > prev;
    below = below && last < kLimit * (1.0 + kFemTolerance);
    prev = last;
  }
  o.note("mu2 A for eps 0.4, 0.2, 0.1, 0.05:" + row);
  o.require(increasing, "mu2 A strictly increasing as the neck closes");
  o.require(last >= 20.0, "eps = 0.05 value >= 20");
  o.require(below, "every value below 21.2989 + FEM tolerance");
}

void c12(Outcome& o) {
  constexpr int n = 3;
  constexpr int resolution = 12;
  const double bound = specfun::bound_constants(n).theorem_constant;
  const std::vector<std::pair<std::string, std::function<double(const Eigen::VectorXd&)>>> densities{
      {"uniform", [](const Eigen::VectorXd&) { return 1.0; }},
      {"perturbed", [](const Eigen::VectorXd& x) { return 1.0 + 0.4 * x(0) + 0.2 * x(1) * x(1); }}};
  for (const auto& [name, rho] : densities) {
    const DiscreteMeasure g = sphere_quadrature(n, resolution, rho);
    const DiscreteMeasure unit = g.scaled(1.0 / g.total_mass());
    const SphereCapScanResult scan = sphere_scan_caps(unit, 1e-3);
    // Test direction from the (multiple) top eigenspace of the rearranged measure.
    const Eigen::VectorXd s = direction_form(scan.nu).max_direction;
    const SphereQuotient q = sphere_modified_quotient(unit, scan.cap, s, resolution);
    const HolderResult hold = holder_gap_check(
        n, resolution, [&](const Eigen::VectorXd& x) { return sphere_lift_value(scan.cap, q.xi, s, x); }, rho,
        [&](const Eigen::VectorXd& x) { return sphere_lift_gradient(scan.cap, q.xi, s, x); });
    o.note(name + ": gap " + fmt("%.1e", scan.gap) + " denominator " + fmt("%.5f", q.denominator) + " R " +
           fmt("%.4f", hold.R) + " R' " + fmt("%.4f", hold.Rprime) + " modified quotient " + fmt("%.4f", q.quotient));
    o.require(q.denominator >= 1.0 / (n + 1) - 1e-3, name + " denominator >= 1/(n+1) - 1e-3");
    o.require(hold.holds, name + " R <= R'");
    o.require(q.quotient <= bound * 1.01, name + " modified quotient below (n+1)(2K_3)^{2/3} x 1.01");
  }
  const DiscreteMeasure starts = sphere_quadrature(n, 6, [](const Eigen::VectorXd&) { return 1.0; });
  std::vector<Eigen::VectorXd> grid;
  for (Eigen::Index i = 0; i < starts.size(); ++i) grid.push_back(starts.points().col(i));
  const DegreeResult deg = sphere_degree_check(n, grid);
  o.note("degrees (" + std::to_string(deg.deg_psi) + ", " + std::to_string(deg.deg_phi) + ")");
  o.require(deg.deg_psi == 2 && deg.deg_phi == 4, "sphere_degree_check returns (2, 4) for n = 3");
  bool even_rejected = false;
  try {
    std::vector<Eigen::VectorXd> g2{Eigen::Vector3d(1.0, 0.0, 0.0)};
    sphere_degree_check(2, g2);
  } catch (const Error& e) {
    even_rejected = e.kind() == ErrorKind::EvenDimension;
  }
  o.require(even_rejected, "n = 2 rejected with EvenDimension");
}

struct Criterion {
  const char* name;
  double budget_seconds;
  void (*run)(Outcome&);
};

const Criterion kCriteria[] = {
    {"constants", 1, c01},
    {"sphere constant ratio", 1, c02},
    {"K_n cross-check", 1, c03},
    {"renormalization", 10, c04},
    {"closed-form zeta_a", 30, c05},
    {"flip-flop trend", 120, c06},
    {"direction limits and winding", 300, c07},
    {"subharmonic bound", 60, c08},
    {"planar certificate", 300, c09},
    {"FEM ground truth", 600, c10},
    {"extremal two-disk family", 900, c11},
    {"sphere pipeline", 300, c12},
};

bool run_one(int index) {
  const Criterion& c = kCriteria[index - 1];
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    c.run(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(seconds < c.budget_seconds, "runtime " + fmt("%.1f", seconds) + " s within " + fmt("%.0f", c.budget_seconds) + " s");
  std::printf("criterion %02d %-30s %s (%.1f s) %s\n", index, c.name, o.pass ? "PASS" : "FAIL", seconds,
              o.detail.str().c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  constexpr int count = static_cast<int>(std::size(kCriteria));
  if (argc > 1) {
    const int index = std::atoi(argv[1]);
    if (index < 1 || index > count) {
      std::fprintf(stderr, "usage: acceptance [1-%d]\n", count);
      return 1;
    }
    return run_one(index) ? 0 : 1;
  }
  int failed = 0;
  for (int i = 1; i <= count; ++i) failed += run_one(i) ? 0 : 1;
  return failed == 0 ? 0 : 1;
}
