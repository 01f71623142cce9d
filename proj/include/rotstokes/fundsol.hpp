#pragma once

// The velocity kernel of the rotating Stokes system
//
//   Γ_a(x,y) = ∫_0^∞ O(at)^T K(O(at)x - y, t) dt,
//
// its x-gradient and the damped (resolvent) variant with e^{-εt}. The time
// integral converges only conditionally; it is assembled as an absolutely
// convergent centered part plus a constant center matrix C_a.
//
// Each time integral is split at a time T past which the Gaussian factors
// are flat. [0,T] is integrated numerically (log-spaced panels near t = 0,
// half-revolution panels after). On [T,∞) the integrand is expanded in
// powers of 1/4t with trigonometric-polynomial coefficients in at; every
// term then integrates in closed form through E_m((ε - ika)T).

#include <array>
#include <optional>
#include <vector>

#include "rotstokes/core.hpp"

namespace rotstokes {

/// Separation below which Γ_a is not evaluated.
inline constexpr double kEtaMin = 1e-4;

/// Γ_a split by kernel piece: G I, the x⊗x part of H and the isotropic part
/// of H, each integrated on its own without centering.
struct GammaDecomposition {
  Mat22 gamma0;
  Mat22 gamma11;
  Mat22 gamma12;
};

struct GammaEval {
  Mat22 value;
  double abs_error_estimate = 0.0;
  long evaluations = 0;
  std::optional<GammaDecomposition> decomposition;
};

/// C_a = ∫_0^∞ O(at)^T e^{-1/4t} / (8πt) dt = [[c, s], [-s, c]].
struct CenterConstant {
  Mat22 value;
  double a = 0.0;
};

/// d[l](j,k) = ∂Γ_jk / ∂x_l.
struct KernelGradient {
  std::array<Mat22, 2> d{};

  double operator()(int l, int j, int k) const { return d[l](j, k); }

  KernelGradient& operator+=(const KernelGradient& o) {
    d[0] += o.d[0];
    d[1] += o.d[1];
    return *this;
  }
  KernelGradient& operator-=(const KernelGradient& o) {
    d[0] -= o.d[0];
    d[1] -= o.d[1];
    return *this;
  }
  friend KernelGradient operator+(KernelGradient a, const KernelGradient& b) { return a += b; }
  friend KernelGradient operator-(KernelGradient a, const KernelGradient& b) { return a -= b; }
  friend KernelGradient operator*(double s, KernelGradient a) {
    a.d[0] *= s;
    a.d[1] *= s;
    return a;
  }
};

inline double quad_norm(const KernelGradient& g) { return std::fmax(max_abs(g.d[0]), max_abs(g.d[1])); }

inline void flatten(const KernelGradient& g, std::vector<double>& out) {
  for (const Mat22& m : g.d) out.insert(out.end(), {m.a11, m.a12, m.a21, m.a22});
}

/// Requires a != 0. Both scalar integrals are computed in the oscillatory
/// class; results are cached per (a, tolerances) and shared across threads.
CenterConstant center_constant(double a, const KernelParams& params);

/// Γ_a(x,y) at ε = 0 (params.eps is ignored). With `decompose` the three
/// pieces are returned as well; their sum is an independent, uncentered
/// evaluation of the same kernel. Throws TooClose when |x - y| < kEtaMin.
GammaEval gamma(const Vec2& x, const Vec2& y, const KernelParams& params, bool decompose = false);

/// x^⊥ ⊗ y^⊥ / (4π|x|²). Throws SingularityError at x = 0.
Mat22 gamma_leading(const Vec2& x, const Vec2& y);

/// ∇_x Γ_a(x,y) from the analytically differentiated kernel.
KernelGradient grad_gamma(const Vec2& x, const Vec2& y, const KernelParams& params);

/// ∫_0^∞ e^{-εt} O(at)^T K(O(at)x - y, t) dt with ε = params.eps > 0.
GammaEval gamma_eps(const Vec2& x, const Vec2& y, const KernelParams& params);

}  // namespace rotstokes
