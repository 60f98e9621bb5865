#pragma once

#include <vector>

#include <Eigen/Dense>

#include "neumax/caps.hpp"
#include "neumax/measures.hpp"
#include "neumax/moebius.hpp"

namespace neumax {

struct Classification {
  bool multiple = false;
  double gap = 0.0;
  Eigen::VectorXd direction;  // projective maximizing direction (meaningful when simple)
  DirectionForm form;
};

/// Multiple iff the relative eigen-gap (M - m)/(M + m) is below eps.
Classification classify(const DiscreteMeasure& m, double eps = 1e-3);

struct Canonical {
  DiscreteMeasure measure;
  Eigen::VectorXd xi;          // renormalizer of the input
  Eigen::MatrixXd orthogonal;  // applied after d_xi; maps the max direction to e1
};

/// Renormalize, then rotate so that [e1] is a maximizing direction.
Canonical canonicalize(const DiscreteMeasure& m, const RenormOptions& options = {});

/// Direction data of the rearranged measure nu_a for a disk cap.
struct CapDirection {
  double r = 0.0;
  double theta = 0.0;
  Eigen::Vector2d field;  // ((B11 - B22), 2 B12) / trace; its norm is the gap
  double gap = 0.0;
  double angle = 0.0;     // direction angle in [0, pi)
  Eigen::Vector2d direction;
};

CapDirection cap_direction(const DiscreteMeasure& m, double r, double theta, const RenormOptions& options = {});

struct CapScanResult {
  Cap cap;
  double gap = 0.0;
  std::vector<CapDirection> field;       // grid samples, row-major in (r, theta)
  std::vector<std::pair<double, int>> winding_numbers;  // r-level -> half-turn count
  int refinements = 0;
};

/// Finds a cap whose rearranged measure is multiple (gap < eps). Grid cells
/// around which the direction field turns are refined by a 2-d Newton solve on
/// the field. Throws NotFound (naming the best cap) if no gap below eps.
CapScanResult scan_caps(const DiscreteMeasure& m, const std::vector<double>& r_grid,
                        const std::vector<double>& theta_grid, double eps = 1e-3,
                        const RenormOptions& options = {});

/// Total number of half-turns of theta -> [s(a_{r, e^{i theta}})] in RP^1.
int winding_diagnostic(const DiscreteMeasure& m, double r, int n_theta, const RenormOptions& options = {});
int winding_from_field(const std::vector<CapDirection>& loop);

/// Signed angle between projective directions, in (-pi/2, pi/2].
double projective_angle(double a, double b);

struct DegreeResult {
  int deg_psi = 0;
  int deg_phi = 0;
  int preimages = 0;
};

/// Degree of psi(p) = 2 (e1, p) p - e1 on S^n and of its projection to RP^n,
/// by signed preimage counting from the given starting points.
DegreeResult sphere_degree_check(int n, const std::vector<Eigen::VectorXd>& grid, std::uint64_t seed = 0);

struct SphereCapScanResult {
  Cap cap;
  double gap = 0.0;
  Eigen::VectorXd xi;
  DiscreteMeasure nu;
};

/// Sphere analogue of scan_caps (odd n): coarse search over (r, p) followed by
/// Gauss-Newton on the top-two block of the direction form.
SphereCapScanResult sphere_scan_caps(const DiscreteMeasure& m, double eps = 1e-3, const RenormOptions& options = {});

}  // namespace neumax
