#pragma once

// Plane geometry and closed-form kernels of the rotating Stokes system.
//
// Notation: x^⊥ = (-x2, x1), O(t) is the counter-clockwise rotation by t,
// G is the 2D heat kernel, H the elementary remainder of the unsteady Stokes
// kernel K = G I + H, E the steady Stokes fundamental solution and Q the
// pressure kernel.

#include <cmath>
#include <numbers>

namespace rotstokes {

struct Vec2 {
  double x1 = 0.0;
  double x2 = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double a, double b) : x1(a), x2(b) {}

  constexpr double operator[](int i) const { return i == 0 ? x1 : x2; }

  constexpr Vec2& operator+=(const Vec2& o) {
    x1 += o.x1;
    x2 += o.x2;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x1 -= o.x1;
    x2 -= o.x2;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x1 *= s;
    x2 *= s;
    return *this;
  }

  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x1, -a.x2}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x1 / s, a.x2 / s}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline double norm(const Vec2& a) { return std::hypot(a.x1, a.x2); }
constexpr double norm2(const Vec2& a) { return dot(a, a); }

/// 2x2 matrix, row-major: [[a11, a12], [a21, a22]].
struct Mat22 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 0.0;

  constexpr Mat22() = default;
  constexpr Mat22(double m11, double m12, double m21, double m22)
      : a11(m11), a12(m12), a21(m21), a22(m22) {}

  static constexpr Mat22 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat22 zero() { return {}; }

  constexpr double operator()(int i, int j) const {
    return i == 0 ? (j == 0 ? a11 : a12) : (j == 0 ? a21 : a22);
  }
  constexpr double& operator()(int i, int j) {
    return i == 0 ? (j == 0 ? a11 : a12) : (j == 0 ? a21 : a22);
  }

  constexpr Mat22 transpose() const { return {a11, a21, a12, a22}; }
  constexpr double trace() const { return a11 + a22; }
  constexpr double det() const { return a11 * a22 - a12 * a21; }

  constexpr Mat22& operator+=(const Mat22& o) {
    a11 += o.a11;
    a12 += o.a12;
    a21 += o.a21;
    a22 += o.a22;
    return *this;
  }
  constexpr Mat22& operator-=(const Mat22& o) {
    a11 -= o.a11;
    a12 -= o.a12;
    a21 -= o.a21;
    a22 -= o.a22;
    return *this;
  }
  constexpr Mat22& operator*=(double s) {
    a11 *= s;
    a12 *= s;
    a21 *= s;
    a22 *= s;
    return *this;
  }

  friend constexpr Mat22 operator+(Mat22 a, const Mat22& b) { return a += b; }
  friend constexpr Mat22 operator-(Mat22 a, const Mat22& b) { return a -= b; }
  friend constexpr Mat22 operator-(const Mat22& a) { return {-a.a11, -a.a12, -a.a21, -a.a22}; }
  friend constexpr Mat22 operator*(double s, Mat22 a) { return a *= s; }
  friend constexpr Mat22 operator*(Mat22 a, double s) { return a *= s; }
  friend constexpr Mat22 operator/(Mat22 a, double s) { return a *= (1.0 / s); }
  friend constexpr Mat22 operator*(const Mat22& a, const Mat22& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
  }
  friend constexpr Vec2 operator*(const Mat22& a, const Vec2& v) {
    return {a.a11 * v.x1 + a.a12 * v.x2, a.a21 * v.x1 + a.a22 * v.x2};
  }
  friend constexpr bool operator==(const Mat22&, const Mat22&) = default;
};

/// Frobenius norm.
inline double norm(const Mat22& m) {
  return std::sqrt(m.a11 * m.a11 + m.a12 * m.a12 + m.a21 * m.a21 + m.a22 * m.a22);
}

/// Largest entry in absolute value.
inline double max_abs(const Mat22& m) {
  return std::fmax(std::fmax(std::fabs(m.a11), std::fabs(m.a12)),
                   std::fmax(std::fabs(m.a21), std::fabs(m.a22)));
}

/// u ⊗ v = (u_j v_k).
constexpr Mat22 outer(const Vec2& u, const Vec2& v) {
  return {u.x1 * v.x1, u.x1 * v.x2, u.x2 * v.x1, u.x2 * v.x2};
}

/// Angular velocity, resolvent damping and quadrature controls shared by all
/// kernel evaluations.
struct KernelParams {
  double a = 1.0;         // angular velocity, nonzero for rotating kernels
  double eps = 0.0;       // resolvent damping ε >= 0
  double tol_abs = 1e-10;
  double tol_rel = 1e-10;
  double t_split = 1.0;   // near-field / far-field split point δ in time
  int max_periods = 512;  // tail truncation for oscillatory integrals

  /// Throws DomainError when the quadrature fields are out of range.
  void validate() const;
  /// As validate(), and additionally requires a != 0.
  void validate_rotating() const;
};

// ---------------------------------------------------------------------------
// Geometry

constexpr Vec2 perp(const Vec2& v) { return {-v.x2, v.x1}; }

/// O(t) = [[cos t, -sin t], [sin t, cos t]].
inline Mat22 rotation(double t) {
  const double c = std::cos(t);
  const double s = std::sin(t);
  return {c, -s, s, c};
}

// ---------------------------------------------------------------------------
// Kernels

/// G(x,t) = e^{-|x|^2/4t} / (4πt). Throws DomainError for t <= 0.
double heat_kernel(const Vec2& x, double t);

/// Elementary form of H(x,t) = ∫_t^∞ ∇²G(x,s) ds. At x = 0 returns the
/// limit -I/(8πt).
Mat22 h_kernel(const Vec2& x, double t);

/// Unsteady Stokes kernel K = G I + H; symmetric with trace G.
Mat22 k_kernel(const Vec2& x, double t);

/// Steady Stokes fundamental solution (1/4π)[log(1/|x|) I + x⊗x/|x|²].
/// Throws SingularityError at x = 0.
Mat22 stokes_E(const Vec2& x);

/// Pressure kernel x / (2π|x|²). Throws SingularityError at x = 0.
Vec2 pressure_Q(const Vec2& x);

/// Cauchy stress T(u,p) = Du - p I with Du = ∇u + ∇u^T.
Mat22 cauchy_stress(const Mat22& grad_u, double p);

/// T(u,p) + a (u ⊗ x^⊥ - x^⊥ ⊗ u).
Mat22 modified_stress(const Mat22& grad_u, double p, const Vec2& u, const Vec2& x, double a);

namespace detail {

// Entire functions of w = |x|²/4t that appear in K and its ρ-derivatives,
// evaluated without cancellation for small w:
//   phi1(w) = (1 - e^{-w}) / w
//   phi2(w) = (1 - e^{-w}(1 + w)) / w²
//   phi3(w) = (e^{-w} - 2 phi2(w)) / w
//   psi(w)  = (phi1(w) - 1) / w
double phi1(double w);
double phi2(double w);
double phi3(double w);
double psi(double w);

}  // namespace detail

}  // namespace rotstokes
