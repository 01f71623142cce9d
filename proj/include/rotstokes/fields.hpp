#pragma once

// Volume potentials u = ∫ Γ_a(x,y) f(y) dy and p = ∫ Q(x-y)·f(y) dy,
// finite-difference residuals of the rotating Stokes system, and a few
// explicit auxiliary fields.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rotstokes/core.hpp"

namespace rotstokes {

enum class DecayClass { compact, fast_decay };

/// A force density f with the metadata the potentials need: a truncation
/// radius outside which f is negligible (or zero), a length scale on which
/// it varies, and its torque and force moments computed once at construction.
class SourceField {
 public:
  using Eval = std::function<Vec2(const Vec2&)>;

  /// `support_radius` bounds the region where f is nonzero (compact) or
  /// where it exceeds the truncation floor (fast_decay). `feature_length`
  /// sets the quadrature resolution.
  SourceField(std::string name, Eval eval, double support_radius, DecayClass decay_class,
              double feature_length);

  Vec2 operator()(const Vec2& y) const { return eval_(y); }

  const std::string& name() const { return name_; }
  double support_radius() const { return support_radius_; }
  DecayClass decay_class() const { return decay_class_; }
  double feature_length() const { return feature_length_; }
  bool is_zero() const { return zero_; }

  /// ∫ y^⊥·f dy
  double moment_torque() const { return torque_; }
  /// ∫ f dy
  Vec2 moment_force() const { return force_; }

  /// y -> f(y - c), with the support radius enlarged by |c|.
  SourceField shifted(const Vec2& c) const;

  /// Sum of two fields (for linearity checks).
  friend SourceField operator+(const SourceField& f, const SourceField& g);
  /// c f.
  friend SourceField operator*(double c, const SourceField& f);

  // Presets.
  /// amplitude · y^⊥ e^{-|y|²/width²}; torque π amplitude width⁴.
  static SourceField rotational_gaussian(double amplitude = 1.0, double width = 1.0);
  /// amplitude · (cos φ, sin φ) e^{-|y|²/width²}; force π amplitude width² (cos φ, sin φ).
  static SourceField force_gaussian(double amplitude = 1.0, double width = 1.0, double angle = 0.0);
  /// amplitude · y^⊥ (1 - |y|²/R²)³ for |y| < R, zero outside.
  static SourceField rotational_bump(double amplitude = 1.0, double radius = 1.0);
  static SourceField zero();
  /// Bilinear interpolation of samples on a uniform grid, zero outside the
  /// grid. `values` is row-major with x1 varying fastest (nx * ny entries).
  static SourceField grid(double xmin, double xmax, double ymin, double ymax, int nx, int ny,
                          std::vector<Vec2> values);
  /// Named preset with optional parameters ("amplitude", "width", "angle",
  /// "radius", and a shift "cx", "cy"). Throws DomainError for an unknown
  /// name or parameter.
  static SourceField preset(const std::string& name,
                            const std::vector<std::pair<std::string, double>>& parameters = {});

 private:
  std::string name_;
  Eval eval_;
  double support_radius_;
  DecayClass decay_class_;
  double feature_length_;
  bool zero_ = false;
  double torque_ = 0.0;
  Vec2 force_;
};

struct Moments {
  double torque = 0.0;
  Vec2 force;
};

/// Torque and force moments by polar Gauss–Legendre quadrature over the
/// support; throws ToleranceNotMet when two resolutions disagree by more
/// than max(params.tol_abs, 1e-9 · scale).
Moments moments(const SourceField& f, const KernelParams& params);

/// ∫ (1 + |y|)|f(y)| dy.
double weighted_l1(const SourceField& f);

/// sup over |y| >= r0 of |y|³ log|y| |f(y)|, sampled on 64 rays.
double weighted_tail_sup(const SourceField& f, double r0);

struct FieldSample {
  Vec2 u;
  Mat22 grad_u;  // grad_u(j,l) = ∂u_j/∂x_l
  double p = 0.0;
  double err_estimate = 0.0;
};

/// u(x) = ∫ Γ_a(x,y) f(y) dy with params.a.
Vec2 velocity_potential(const SourceField& f, const Vec2& x, const KernelParams& params);

/// p(x) = ∫ Q(x-y)·f(y) dy.
double pressure_potential(const SourceField& f, const Vec2& x, const KernelParams& params);

/// u, p and (when `with_gradient`) ∇u from one pass over the quadrature nodes.
FieldSample sample_field(const SourceField& f, const Vec2& x, const KernelParams& params,
                         bool with_gradient);

struct ResidualReport {
  Vec2 momentum_residual;
  double divergence = 0.0;
  double fd_step = 0.0;
};

/// Central differences of u and p with step h = fd_step · max(1, |x|):
/// -Δu - a(x^⊥·∇u - u^⊥) + ∇p - f(x) and div u.
ResidualReport pde_residual(const SourceField& f, const Vec2& x, const KernelParams& params,
                            double fd_step = 1e-2);

/// w = -β(x - x0) / (2π|x - x0|²) and its gradient ∂w_j/∂x_l.
std::pair<Vec2, Mat22> flux_carrier(const Vec2& x, const Vec2& x0, double beta);

/// w = (a/2) ∇^⊥(ζ(|x|)|x|²) with ζ = 1 on [0,R], 0 on [2R,∞) and a quintic
/// smoothstep in between. Requires R >= 1.
Vec2 rotational_lift(const Vec2& x, double a, double R);

struct AnalyticField {
  std::function<Vec2(const Vec2&)> value;
  std::function<Mat22(const Vec2&)> gradient;  // (j,l) = ∂_l v_j
};

struct SkewIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = ∫_A [(x^⊥·∇u - u^⊥)·v + u·(x^⊥·∇v - v^⊥)] dx over the annulus
/// R1 < |x - center| < R2, rhs = Σ over both circles of ∫ (ν·x^⊥)(u·v) dσ
/// with ν the outward normal of the annulus.
SkewIdentity skew_identity_check(const AnalyticField& u, const AnalyticField& v, double R1, double R2,
                                 const KernelParams& params, const Vec2& center = {});

}  // namespace rotstokes
