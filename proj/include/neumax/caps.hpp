#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "neumax/measures.hpp"
#include "neumax/moebius.hpp"

namespace neumax {

/// The cap a_{r,p} = d_{rp}(a_{0,p}), where a_{0,p} is the half of the disk
/// (or sphere) on the side of p. r -> 1 shrinks the cap to p, r -> -1 grows it
/// to the whole space.
struct Cap {
  Space space;
  double r = 0.0;
  Eigen::VectorXd p;

  static Cap disk(double r, double angle);
  static Cap disk(double r, Complex p);
  static Cap sphere(double r, const Eigen::VectorXd& p);

  Complex p_complex() const { return {p(0), p(1)}; }
  Complex center() const { return r * p_complex(); }
};

/// Closed membership (boundary points belong to the cap).
bool in_cap(const Cap& a, Complex z, double tol = 0.0);
bool in_cap(const Cap& a, const Eigen::VectorXd& x, double tol = 0.0);

/// tau_a = d_{rp} o R_p o d_{-rp}, the reflection across the boundary of a.
Complex cap_reflection(const Cap& a, Complex z);
Eigen::VectorXd cap_reflection(const Cap& a, const Eigen::VectorXd& x);
/// |tau_a'(z)| (tau_a is anti-conformal, so this is its full stretch).
double cap_reflection_stretch(const Cap& a, Complex z);

/// Points of the boundary geodesic (disk caps), t in (-1, 1) along the chord.
std::vector<Complex> cap_boundary_samples(const Cap& a, int count);

/// Folded measure: atoms of m in a kept, the others moved into a by tau_a.
DiscreteMeasure fold_measure(const DiscreteMeasure& m, const Cap& a);

/// The image cap d_xi(a) of a disk cap.
Cap moebius_image(const Cap& a, Complex xi);

/// Explicit conformal map phi_b of a disk cap onto the unit disk: Moebius
/// normalization onto the upper half-disk, Joukowski onto the upper half-plane,
/// Cayley onto the disk, then a disk automorphism fixing the interior point
/// c_b = (1 + r_b)/2 p_b with positive derivative there. As the cap grows to the
/// disk, phi_b tends to the identity.
class CapToDisk {
 public:
  explicit CapToDisk(const Cap& b);

  const Cap& cap() const { return cap_; }
  /// Throws EvaluationOutsideCap for points outside the closed cap.
  Complex forward(Complex z) const;
  Complex derivative(Complex z) const;
  Complex inverse(Complex w) const;
  Complex inverse_derivative(Complex w) const { return 1.0 / derivative(inverse(w)); }

 private:
  Complex raw(Complex z) const;
  Complex raw_derivative(Complex z) const;
  Complex raw_inverse(Complex u) const;

  Cap cap_;
  Complex center_;    // r_b p_b
  Complex rotation_;  // i conj(p_b)
  Complex anchor_;    // c_b
  Complex anchor_image_;
  Complex phase_;
};

struct RearrangeTrace {
  Complex xi_a;               // Gamma of the folded measure
  Cap b;                      // T_a(a)
  Complex eta_a;              // Gamma of (phi_b o T_a)_* mu_a
  Complex zeta_a_predicted;   // -2r/(1 + r^2) p
  Complex eta_flipflop;       // d_{-zeta_a}(xi_a), the renormalizer of (d_zeta_a)_* mu_a
  double q_norm = 1.0;        // |q(a)|
  double residual = 0.0;      // moment sup-norm of nu_a
};

/// psi_a^{-1} = T'_a o phi_b o T_a : a -> D and its inverse.
class RearrangeMap {
 public:
  RearrangeMap(const Cap& a, const RearrangeTrace& trace);

  const Cap& cap() const { return cap_; }
  Complex to_disk(Complex z) const;
  Complex from_disk(Complex w) const;
  Complex from_disk_derivative(Complex w) const;

 private:
  Cap cap_;
  Complex xi_;
  Complex eta_;
  CapToDisk phi_;
};

struct Rearrangement {
  DiscreteMeasure nu;
  RearrangeTrace trace;
};

/// nu_a = (T'_a o phi_b o T_a)_* mu_a for a disk measure.
Rearrangement rearrange(const DiscreteMeasure& m, const Cap& a, const RenormOptions& options = {});

struct SphereRearrangement {
  DiscreteMeasure nu;
  Eigen::VectorXd xi;
};

/// nu_a = (d_xi(a))_* mu_a on the sphere.
SphereRearrangement rearrange_sphere(const DiscreteMeasure& m, const Cap& a, const RenormOptions& options = {});

/// Density of (d_xi)_* (rho dz).
std::function<double(Complex)> pushed_density(std::function<double(Complex)> rho, Complex xi);

/// The rearranged density delta(w) = [rho(z) + rho(tau z) |tau'(z)|^2] |psi'(w)|^2
/// with z = psi_a(w).
std::function<double(Complex)> rearranged_density(std::function<double(Complex)> rho, const Cap& a,
                                                  const RearrangeTrace& trace);

/// delta integrated exactly (adaptive cubature) over the cells of the standard
/// polar grid; the returned measure carries the cell layout in its PolarGrid.
DiscreteMeasure density_cell_measure(const std::function<double(Complex)>& delta, int n_r = 96,
                                     int n_theta = 192);

struct SubharmonicReport {
  std::vector<double> radii;     // where W is reported
  std::vector<double> W;         // angular integral of the density (ring average for cell grids)
  std::vector<double> g_radii;   // where G is reported
  std::vector<double> G;         // mass inside the disk of that radius
  double monotonicity_violation = 0.0;  // max of W(rho_i) - W(rho_{i+1}), clipped at 0
  double growth_violation = 0.0;        // max of G(r) - pi r^2, clipped at 0
  double max_growth_gap = 0.0;          // max |G(r) - pi r^2|
};

/// W and G of a grid measure after scaling it to total mass pi.
SubharmonicReport subharmonic_diagnostics(const DiscreteMeasure& nu);

}  // namespace neumax
