#pragma once

#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "neumax/caps.hpp"
#include "neumax/directions.hpp"
#include "neumax/measures.hpp"

namespace neumax {

/// Discretization allowance applied to every certificate inequality.
inline constexpr double kCertificateSlack = 1e-2;

/// u_a^s = X_s o psi_a^{-1} on a, lifted to the disk by tau_a. Without a
/// trace (the multiple branch) the test function is X_s itself.
struct TestFunction {
  Cap cap;
  Eigen::Vector2d s;
  std::optional<RearrangeTrace> trace;
};

double lift_evaluate(const TestFunction& tf, Complex z);

/// 2 mu1(D) pi I_f, the Dirichlet energy of any lifted test function.
double dirichlet_energy_closed_form();

/// Independent value of the lifted energy: polar grids on a and on its
/// complement, finite-difference gradient of X_s and exact conformal factors.
double dirichlet_energy_quadrature(const TestFunction& tf, int n_r = 64, int n_theta = 128);

struct L2Bound {
  double value = 0.0;     // integral of X_s^2 against nu, mass scaled to pi
  double lower = 0.0;     // pi I_f
  double average = 0.0;   // (1/2) integral of f(|z|)^2, mass scaled to pi
  double gap = 0.0;
  bool holds = false;     // value >= lower (1 - slack)
};

/// Throws NotMultiple when the relative gap of nu exceeds tolerance.
L2Bound l2_lower_bound(const DiscreteMeasure& nu, const Eigen::Vector2d& s, double tolerance = 1e-3);

struct IbpCheck {
  double atom_sum = 0.0;  // integral of f^2 dnu
  double by_parts = 0.0;  // f(1)^2 G(1) - integral (f^2)' G
};

/// The integral of f^2 dG two ways, with G the radial distribution of nu.
IbpCheck integration_by_parts_check(const DiscreteMeasure& nu);

struct BoundReport {
  std::string domain_id;
  double area = 0.0;
  double quotient_sup = 0.0;  // sup of R * Area / pi over the test space
  double bound = 0.0;         // 2 mu1(D) or mu1(D)
  double margin = 0.0;
  std::string branch;         // "simple-folded" or "multiple-direct"
  double gap = 0.0;           // relative gap of the measure the test space lives on
  std::optional<Cap> cap;
  double min_denominator = 0.0;
  bool holds = false;
};

struct CertificateOptions {
  int n_r = 96;
  int n_theta = 192;
  double multiplicity_eps = 1e-3;
  std::vector<double> r_grid;      // defaults to -0.8, -0.6, ..., 0.8
  int n_theta_scan = 24;
  RenormOptions renorm;
};

BoundReport planar_bound_certificate(const ConformalDomain& domain, const std::string& domain_id = "domain",
                                     const CertificateOptions& options = {});

nlohmann::json report_to_json(const BoundReport& report);

/// Smallest value of the direction form over unit s: 64 samples then
/// golden-section refinement.
double min_direction_value(const DirectionForm& form, Eigen::Vector2d* argmin = nullptr);

struct SphereQuotient {
  double numerator = 0.0;    // (2 integral over d_xi(a) of |grad X_s|^n)^{2/n}
  double denominator = 0.0;  // integral of X_s^2 d nu_a, unit-mass g
  double quotient = 0.0;
  double bound = 0.0;        // (n+1)(2 K_n)^{2/n}
  bool holds = false;
  Eigen::VectorXd xi;
  DiscreteMeasure nu;
};

/// Modified Rayleigh quotient of the lifted test function for a spherical cap.
SphereQuotient sphere_modified_quotient(const DiscreteMeasure& g, const Cap& a, const Eigen::VectorXd& s,
                                        int resolution = 24, const RenormOptions& options = {});

/// Integral of |grad X_s|^n over the full sphere by product quadrature (equals K_n).
double sphere_gradient_integral(int n, int resolution);

/// Gradient norm of the lifted spherical test function X_s o d_xi (tau_a on the complement).
double sphere_lift_gradient(const Cap& a, const Eigen::VectorXd& xi, const Eigen::VectorXd& s,
                            const Eigen::VectorXd& x);
double sphere_lift_value(const Cap& a, const Eigen::VectorXd& xi, const Eigen::VectorXd& s,
                         const Eigen::VectorXd& x);

struct HolderResult {
  double R = 0.0;
  double Rprime = 0.0;
  bool holds = false;     // R <= R' + 1e-10 (reversed for n = 1)
  bool equality = false;  // |R - R'| < 1e-8
};

/// R and R' of u for the metric with density rho against the round metric,
/// rho normalized to unit volume. The gradient norm is taken from grad_norm
/// when given, otherwise by central differences along a tangent frame.
HolderResult holder_gap_check(int n, int resolution, const std::function<double(const Eigen::VectorXd&)>& u,
                              const std::function<double(const Eigen::VectorXd&)>& rho,
                              const std::function<double(const Eigen::VectorXd&)>& grad_norm = nullptr);

}  // namespace neumax
