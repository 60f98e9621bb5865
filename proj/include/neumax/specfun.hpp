#pragma once

// Special functions and closed-form constants for the Neumann problem on the
// unit disk and the conformal eigenvalue bounds on odd-dimensional spheres.

namespace neumax::specfun {

/// Bessel function of the first kind, order 0.
double bessel_j0(double x);

/// Bessel function of the first kind, order 1. Power series (extended
/// precision) for |x| <= 12, Miller backward recurrence up to |x| <= 50,
/// Hankel asymptotics beyond.
double bessel_j1(double x);

/// J1'(x) = J0(x) - J1(x)/x, with the limit 1/2 at the origin.
double bessel_j1_prime(double x);

/// Smallest positive zero of J1'. Computed once and cached.
double find_zeta();

/// First positive Neumann eigenvalue of the unit disk (double), zeta^2.
double mu1_disk();

/// Radial profile f(r) = J1(zeta r) of the first disk eigenfunctions.
double radial_profile(double r);
double radial_profile_prime(double r);

/// Integral of f(r)^2 r over [0, 1], evaluated with the Bessel identity
/// (zeta^2 - 1) J1(zeta)^2 / (2 zeta^2).
double radial_l2_integral();

/// Volume of the unit round n-sphere.
double omega_n(int n);

/// K_n: integral of |grad X_s|^n over the round n-sphere.
double k_n(int n);

struct BoundConstants {
  int n = 0;
  double theorem_constant = 0.0;     // (n+1) (2 K_n)^{2/n}
  double conjecture_constant = 0.0;  // n (2 omega_n)^{2/n}
  double ratio = 0.0;
  bool even_dimension_warning = false;
};

BoundConstants bound_constants(int n);

/// 2 mu1(D) pi, the sharp constant for mu2 * Area on simply-connected domains.
double planar_bound();

/// mu1(D) pi, the Szego-Weinberger constant for mu1 * Area.
double szego_bound();

}  // namespace neumax::specfun
