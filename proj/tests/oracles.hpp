#pragma once

// Independent reference values used by the tests. Nothing here calls into
// the library's quadrature.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include "rotstokes/core.hpp"

namespace oracle {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286061;

/// K0(z) by its ascending series, adequate for |z| <= 5:
/// K0(z) = -(log(z/2) + γ) I0(z) + Σ_k (z²/4)^k / (k!)² H_k.
inline std::complex<double> bessel_k0(std::complex<double> z) {
  const std::complex<double> q = 0.25 * z * z;
  std::complex<double> term = 1.0;
  std::complex<double> i0 = 1.0;
  std::complex<double> tail = 0.0;
  double harmonic = 0.0;
  for (int k = 1; k < 80; ++k) {
    term *= q / (static_cast<double>(k) * k);
    harmonic += 1.0 / k;
    i0 += term;
    tail += term * harmonic;
  }
  return -(std::log(0.5 * z) + kEulerGamma) * i0 + tail;
}

/// ∫_0^∞ e^{iat} e^{-b/t} dt/t = 2 K0(2√(-iab)) for a > 0, b > 0.
inline std::complex<double> oscillatory_log_integral(double a, double b) {
  return 2.0 * bessel_k0(2.0 * std::sqrt(std::complex<double>(0.0, -a * b)));
}

/// Entries of ∫_0^∞ O(at)^T e^{-1/4t}/(8πt) dt = [[c, s], [-s, c]].
inline rotstokes::Mat22 center_matrix(double a) {
  const std::complex<double> v = oscillatory_log_integral(std::fabs(a), 0.25);
  const double c = v.real() / (8.0 * kPi);
  const double s = (a > 0 ? 1.0 : -1.0) * v.imag() / (8.0 * kPi);
  return {c, s, -s, c};
}

/// Deterministic uniform doubles in [0,1).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  rotstokes::Vec2 in_annulus(double r_lo, double r_hi) {
    const double r = uniform(r_lo, r_hi);
    const double phi = uniform(0.0, 2.0 * kPi);
    return {r * std::cos(phi), r * std::sin(phi)};
  }

 private:
  std::mt19937_64 engine_;
};

/// Composite Gauss–Legendre (5 points) on [lo, hi] with n panels.
template <class F>
double gauss5(F&& f, double lo, double hi, int n) {
  static const double x[] = {0.0, 0.5384693101056831, -0.5384693101056831, 0.9061798459386640, -0.9061798459386640};
  static const double w[] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                             0.2369268850561891};
  const double h = (hi - lo) / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double mid = lo + (i + 0.5) * h;
    for (int k = 0; k < 5; ++k) sum += w[k] * f(mid + 0.5 * h * x[k]);
  }
  return 0.5 * h * sum;
}

}  // namespace oracle
