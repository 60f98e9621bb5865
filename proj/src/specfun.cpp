#include "neumax/specfun.hpp"

#include <cmath>
#include <numbers>

#include "neumax/errors.hpp"

namespace neumax::specfun {

namespace {

constexpr double kPi = std::numbers::pi;

// Ascending series for J_nu, nu in {0, 1}. The terms stay below ~1e3 in
// magnitude for |x| <= 12, so extended precision keeps the result at
// double accuracy.
template <typename Real>
Real bessel_series(int nu, Real x) {
  const Real half = x / 2;
  const Real q = -half * half;
  Real term = (nu == 0) ? Real(1) : half;
  Real sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (Real(k) * Real(k + nu));
    sum += term;
    if (std::abs(term) < std::abs(sum) * Real(1e-21) && k > 2) break;
  }
  return sum;
}

// Hankel asymptotic expansion, |x| > 50 where the minimal term is ~e^{-2x}.
double bessel_hankel(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  const double eightx = 8.0 * x;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double prev_abs = INFINITY;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * eightx);
    const double abs_term = std::abs(term);
    if (abs_term > prev_abs || abs_term < 1e-18) break;
    prev_abs = abs_term;
    // k odd contributes to Q, k even to P, with alternating signs in pairs.
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 1) {
      q += sign * term;
    } else {
      p += sign * term;
    }
  }
  const double chi = x - (0.5 * nu + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

// Miller backward recurrence normalized by J0 + 2 sum J_{2k} = 1.
void bessel_miller(double x, double& j0, double& j1) {
  const int start = 2 * static_cast<int>((x + 20.0 + std::sqrt(40.0 * x)) / 2.0);
  double next = 0.0;   // J_{k+1}
  double cur = 1e-30;  // J_k
  double norm = 0.0;
  double j1_raw = 0.0;
  for (int k = start; k >= 1; --k) {
    const double prev = (2.0 * k / x) * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      j1_raw *= 1e-250;
    }
    const int order = k - 1;
    if (order == 1) j1_raw = cur;
    if (order > 0 && order % 2 == 0) norm += 2.0 * cur;
  }
  norm += cur;
  j0 = cur / norm;
  j1 = j1_raw / norm;
}

double j_positive(int nu, double ax) {
  if (ax <= 4.0) return bessel_series<double>(nu, ax);
  if (ax <= 12.0) return static_cast<double>(bessel_series<long double>(nu, ax));
  if (ax <= 50.0) {
    double j0 = 0.0;
    double j1 = 0.0;
    bessel_miller(ax, j0, j1);
    return nu == 0 ? j0 : j1;
  }
  return bessel_hankel(nu, ax);
}

}  // namespace

double bessel_j0(double x) { return j_positive(0, std::abs(x)); }

double bessel_j1(double x) {
  const double v = j_positive(1, std::abs(x));
  return x < 0 ? -v : v;
}

double bessel_j1_prime(double x) {
  if (std::abs(x) < 1e-8) return 0.5 - 3.0 * x * x / 16.0;
  return bessel_j0(x) - bessel_j1(x) / x;
}

namespace {

double compute_zeta() {
  // J1' changes sign once on (1, 3): positive before the maximum of J1.
  double lo = 1.0;
  double hi = 3.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (bessel_j1_prime(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double z = 0.5 * (lo + hi);
  // Newton polish with J1'' = -J1'/x - (1 - 1/x^2) J1.
  for (int i = 0; i < 3; ++i) {
    const double d1 = bessel_j1_prime(z);
    const double d2 = -d1 / z - (1.0 - 1.0 / (z * z)) * bessel_j1(z);
    z -= d1 / d2;
  }
  return z;
}

}  // namespace

double find_zeta() {
  static const double zeta = compute_zeta();
  return zeta;
}

double mu1_disk() {
  const double z = find_zeta();
  return z * z;
}

double radial_profile(double r) { return bessel_j1(find_zeta() * r); }

double radial_profile_prime(double r) {
  const double z = find_zeta();
  return z * bessel_j1_prime(z * r);
}

double radial_l2_integral() {
  const double z = find_zeta();
  const double j = bessel_j1(z);
  return (z * z - 1.0) * j * j / (2.0 * z * z);
}

double omega_n(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "omega_n requires n >= 1");
  const double half = 0.5 * (n + 1);
  return 2.0 * std::exp(half * std::log(kPi) - std::lgamma(half));
}

double k_n(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "k_n requires n >= 1");
  const double log_k = std::log(2.0) + 0.5 * (n + 1) * std::log(kPi) + std::lgamma(n) -
                       std::lgamma(0.5 * n) - std::lgamma(n + 0.5);
  return std::exp(log_k);
}

BoundConstants bound_constants(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "bound_constants requires n >= 1");
  BoundConstants out;
  out.n = n;
  const double exponent = 2.0 / n;
  out.theorem_constant = (n + 1) * std::pow(2.0 * k_n(n), exponent);
  out.conjecture_constant = n * std::pow(2.0 * omega_n(n), exponent);
  out.ratio = out.theorem_constant / out.conjecture_constant;
  out.even_dimension_warning = (n % 2 == 0);
  return out;
}

double planar_bound() { return 2.0 * mu1_disk() * kPi; }

double szego_bound() { return mu1_disk() * kPi; }

}  // namespace neumax::specfun
