#include "rotstokes/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rotstokes/errors.hpp"
#include "rotstokes/quad.hpp"

namespace rotstokes {

namespace {

constexpr double kPi = std::numbers::pi;

void require_exterior(const Vec2& y, const char* who) {
  if (norm(y) < 1.0 - 1e-12) throw DomainError(std::string(who) + ": point lies inside the disk");
}

}  // namespace

Vec2 disk_velocity(const DiskSolution& sol, const Vec2& y) {
  require_exterior(y, "disk_velocity");
  return (sol.a / norm2(y)) * perp(y);
}

double disk_pressure(const DiskSolution& sol, const Vec2& y) {
  require_exterior(y, "disk_pressure");
  if (sol.variant == DiskSolution::Variant::navier_stokes) return sol.p0 - 0.5 * sol.a * sol.a / norm2(y);
  return sol.p0;
}

Mat22 disk_grad(const DiskSolution& sol, const Vec2& y) {
  require_exterior(y, "disk_grad");
  const double r2 = norm2(y);
  const Mat22 rot{0.0, -1.0, 1.0, 0.0};
  return (sol.a / r2) * rot - (2.0 * sol.a / (r2 * r2)) * outer(perp(y), y);
}

Mat22 disk_stress(const DiskSolution& sol, const Vec2& y) {
  return cauchy_stress(disk_grad(sol, y), disk_pressure(sol, y));
}

Vec2 ns_residual_check(const DiskSolution& sol, const Vec2& y, double h) {
  const auto [stokes, div] = stokes_residual_check(sol, y, h);
  (void)div;
  const Vec2 e1{h, 0.0};
  const Vec2 e2{0.0, h};
  const Vec2 v = disk_velocity(sol, y);
  const Vec2 d1 = (disk_velocity(sol, y + e1) - disk_velocity(sol, y - e1)) / (2.0 * h);
  const Vec2 d2 = (disk_velocity(sol, y + e2) - disk_velocity(sol, y - e2)) / (2.0 * h);
  return stokes + v.x1 * d1 + v.x2 * d2;
}

std::pair<Vec2, double> stokes_residual_check(const DiskSolution& sol, const Vec2& y, double h) {
  if (!(h > 0.0)) throw DomainError("stokes_residual_check: step must be positive");
  const Vec2 e1{h, 0.0};
  const Vec2 e2{0.0, h};
  const Vec2 v = disk_velocity(sol, y);
  const Vec2 vxp = disk_velocity(sol, y + e1);
  const Vec2 vxm = disk_velocity(sol, y - e1);
  const Vec2 vyp = disk_velocity(sol, y + e2);
  const Vec2 vym = disk_velocity(sol, y - e2);
  const Vec2 lap = (vxp + vxm + vyp + vym - 4.0 * v) / (h * h);
  const Vec2 grad_q{(disk_pressure(sol, y + e1) - disk_pressure(sol, y - e1)) / (2.0 * h),
                    (disk_pressure(sol, y + e2) - disk_pressure(sol, y - e2)) / (2.0 * h)};
  const double div = (vxp.x1 - vxm.x1 + vyp.x2 - vym.x2) / (2.0 * h);
  return {-lap + grad_q, div};
}

std::vector<BoundaryQuadrature::Node> BoundaryQuadrature::nodes() const {
  if (!(radius > 0.0)) throw DomainError("BoundaryQuadrature: radius must be positive");
  if (n_nodes < 8) throw DomainError("BoundaryQuadrature: need at least 8 nodes");
  const double sign = normal_orientation == NormalOrientation::out_of_fluid ? -1.0 : 1.0;
  const double w = 2.0 * kPi * radius / n_nodes;
  std::vector<Node> out;
  out.reserve(n_nodes);
  for (int k = 0; k < n_nodes; ++k) {
    const double phi = 2.0 * kPi * k / n_nodes;
    const Vec2 e{std::cos(phi), std::sin(phi)};
    out.push_back({center + radius * e, sign * e, w});
  }
  return out;
}

Vec2 boundary_integral_force(const BoundaryQuadrature& quad, const StressField& stress_at) {
  Vec2 total;
  for (const auto& n : quad.nodes()) total += n.weight * (stress_at(n.point) * n.normal);
  return total;
}

double boundary_integral_torque(const BoundaryQuadrature& quad, const StressField& stress_at,
                                const std::optional<VelocityField>& velocity, double a) {
  double total = 0.0;
  for (const auto& n : quad.nodes()) {
    Mat22 s = stress_at(n.point);
    if (velocity) s += a * outer((*velocity)(n.point), perp(n.point));
    total += n.weight * dot(perp(n.point), s * n.normal);
  }
  return total;
}

EnergyBalance energy_balance_check(const DiskSolution& sol, double R_outer, const KernelParams& params) {
  if (sol.variant != DiskSolution::Variant::stokes) {
    throw DomainError("energy_balance_check: requires the Stokes disk solution");
  }
  if (!(R_outer > 1.0)) throw DomainError("energy_balance_check: R_outer must exceed 1");
  (void)params;

  // (1/2)∫|Du|² on geometric radial panels (ratio <= 2) and equispaced angles.
  constexpr int kOrder = 16;
  constexpr int kAngles = 64;
  const GaussRule g = gauss_legendre(kOrder);
  const int panels = std::max(1, static_cast<int>(std::ceil(std::log2(R_outer))));
  const double ratio = std::pow(R_outer, 1.0 / panels);
  EnergyBalance out;
  double lo = 1.0;
  for (int p = 0; p < panels; ++p) {
    const double hi = (p + 1 == panels) ? R_outer : lo * ratio;
    for (int i = 0; i < kOrder; ++i) {
      const double r = 0.5 * (lo + hi) + 0.5 * (hi - lo) * g.nodes[i];
      const double wr = 0.5 * (hi - lo) * g.weights[i] * r * (2.0 * kPi / kAngles);
      for (int k = 0; k < kAngles; ++k) {
        const double phi = 2.0 * kPi * k / kAngles;
        const Mat22 gu = disk_grad(sol, r * Vec2{std::cos(phi), std::sin(phi)});
        const Mat22 du = gu + gu.transpose();
        const double sq = du.a11 * du.a11 + du.a12 * du.a12 + du.a21 * du.a21 + du.a22 * du.a22;
        out.lhs += 0.5 * wr * sq;
      }
    }
    lo = hi;
  }

  auto boundary = [&](double radius, BoundaryQuadrature::NormalOrientation orientation) {
    const BoundaryQuadrature quad{{}, radius, 256, orientation};
    double total = 0.0;
    for (const auto& n : quad.nodes()) {
      const Vec2 u = disk_velocity(sol, n.point);
      const double tnu = dot(disk_stress(sol, n.point) * n.normal, u);
      total += n.weight * (tnu + 0.5 * sol.a * dot(n.normal, perp(n.point)) * norm2(u));
    }
    return total;
  };
  // Out of the annulus: into the disk on |x| = 1, outward on |x| = R.
  const double inner = boundary(1.0, BoundaryQuadrature::NormalOrientation::out_of_fluid);
  out.outer_term = boundary(R_outer, BoundaryQuadrature::NormalOrientation::into_fluid);
  out.rhs = inner + out.outer_term;
  return out;
}

}  // namespace rotstokes
