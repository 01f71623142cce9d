#pragma once

// Flow around the unit disk rotating with angular velocity a, boundary
// quadrature on circles, and the force, torque and energy identities checked
// against it.

#include <functional>
#include <optional>
#include <vector>

#include "rotstokes/core.hpp"

namespace rotstokes {

/// v(y) = a y^⊥/|y|² for |y| >= 1; pressure p0 (stokes) or
/// p0 - a²/(2|y|²) (navier_stokes).
struct DiskSolution {
  enum class Variant { stokes, navier_stokes };

  double a = 1.0;
  Variant variant = Variant::stokes;
  double p0 = 0.0;
};

/// Throw DomainError strictly inside the disk (|y| < 1 - 1e-12).
Vec2 disk_velocity(const DiskSolution& sol, const Vec2& y);
double disk_pressure(const DiskSolution& sol, const Vec2& y);
/// (j,l) = ∂v_j/∂y_l.
Mat22 disk_grad(const DiskSolution& sol, const Vec2& y);
/// Cauchy stress of the disk solution.
Mat22 disk_stress(const DiskSolution& sol, const Vec2& y);

/// -Δv + ∇q + v·∇v by central differences with step `h`.
Vec2 ns_residual_check(const DiskSolution& sol, const Vec2& y, double h = 1e-4);

/// Stokes part -Δv + ∇q and div v by central differences with step `h`.
std::pair<Vec2, double> stokes_residual_check(const DiskSolution& sol, const Vec2& y, double h = 1e-4);

/// Equispaced trapezoidal rule on a circle. out_of_fluid orients ν from the
/// exterior fluid into the disk, into_fluid the opposite way.
struct BoundaryQuadrature {
  enum class NormalOrientation { out_of_fluid, into_fluid };

  struct Node {
    Vec2 point;
    Vec2 normal;
    double weight;
  };

  Vec2 center;
  double radius = 1.0;
  int n_nodes = 64;
  NormalOrientation normal_orientation = NormalOrientation::out_of_fluid;

  /// Throws DomainError for radius <= 0 or n_nodes < 8.
  std::vector<Node> nodes() const;
};

using StressField = std::function<Mat22(const Vec2&)>;
using VelocityField = std::function<Vec2(const Vec2&)>;

/// ∫ T ν dσ.
Vec2 boundary_integral_force(const BoundaryQuadrature& quad, const StressField& stress_at);

/// ∫ y^⊥·{(T + a u⊗y^⊥)ν} dσ; the a-term is included when `velocity` is set.
double boundary_integral_torque(const BoundaryQuadrature& quad, const StressField& stress_at,
                                const std::optional<VelocityField>& velocity = std::nullopt, double a = 0.0);

struct EnergyBalance {
  double lhs = 0.0;         // (1/2)∫_{1<|x|<R} |Du|² dx
  double rhs = 0.0;         // boundary terms on |x| = 1 and |x| = R
  double outer_term = 0.0;  // the |x| = R part of rhs
};

/// Energy identity for the Stokes disk solution on the annulus 1 < |x| < R
/// with u_∞ = 0 and f = 0. The boundary terms are (Tν)·u + a(ν·x^⊥)|u|²/2
/// with ν pointing out of the annulus.
EnergyBalance energy_balance_check(const DiskSolution& sol, double R_outer, const KernelParams& params);

}  // namespace rotstokes
