#include "rotstokes/quad.hpp"

#include <numbers>
#include <string>

namespace rotstokes {

namespace {

constexpr double kPi = std::numbers::pi;

void require_nonzero(const Vec2& x, const char* who) {
  if (!(norm2(x) > 0.0)) throw SingularityError(std::string(who) + ": singular at x = 0");
}

}  // namespace

TailStrategy TailStrategy::oscillatory(double frequency) {
  if (!(frequency != 0.0) || !std::isfinite(frequency)) {
    throw DomainError("TailStrategy::oscillatory: frequency must be finite and nonzero");
  }
  return {Mode::period_sum_accelerated, 2.0 * kPi / std::fabs(frequency)};
}

namespace detail {

void flatten(double v, std::vector<double>& out) { out.push_back(v); }

void flatten(const Vec2& v, std::vector<double>& out) {
  out.push_back(v.x1);
  out.push_back(v.x2);
}

void flatten(const Mat22& v, std::vector<double>& out) {
  out.insert(out.end(), {v.a11, v.a12, v.a21, v.a22});
}

}  // namespace detail

GaussRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

double centered_scalar_log(const Vec2& x, const KernelParams& params) {
  require_nonzero(x, "centered_scalar_log");
  const double r2 = norm2(x);
  // G - e^{-1/4t}/(4πt) written with expm1 so the large-t cancellation is exact.
  auto g = [r2](double t) {
    const double s = 0.25 / t;
    return (std::expm1(-r2 * s) - std::expm1(-s)) / (4.0 * kPi * t);
  };
  return integrate_0_inf<double>(g, params, TailStrategy::absolute()).value;
}

Mat22 centered_stokes_E(const Vec2& x, const KernelParams& params) {
  require_nonzero(x, "centered_stokes_E");
  const double r2 = norm2(x);
  const Mat22 xx = outer(x, x);
  auto g = [r2, xx](double t) {
    const double s = 0.25 / t;
    const double w = r2 * s;
    // 8πt (G + iso part of H) - e^{-e s} = 2 expm1(-w) - w psi(w) - expm1(-e s).
    const double iso = (2.0 * std::expm1(-w) - w * detail::psi(w) - std::expm1(-std::numbers::e * s)) /
                       (8.0 * kPi * t);
    const double aniso = detail::phi2(w) / (16.0 * kPi * t * t);
    return iso * Mat22::identity() + aniso * xx;
  };
  return integrate_0_inf<Mat22>(g, params, TailStrategy::absolute()).value;
}

}  // namespace rotstokes
