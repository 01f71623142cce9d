#include "rotstokes/core.hpp"

#include <string>

#include "rotstokes/errors.hpp"

namespace rotstokes {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesCutoff = 0.5;
constexpr int kSeriesTerms = 24;

void require_positive_time(double t, const char* who) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw DomainError(std::string(who) + ": time must be positive and finite, got " +
                      std::to_string(t));
  }
}

}  // namespace

void KernelParams::validate() const {
  if (!std::isfinite(a)) throw DomainError("KernelParams: a must be finite");
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw DomainError("KernelParams: eps must be >= 0");
  if (!(tol_abs > 0.0)) throw DomainError("KernelParams: tol_abs must be > 0");
  if (!(tol_rel > 0.0)) throw DomainError("KernelParams: tol_rel must be > 0");
  if (!(t_split > 0.0)) throw DomainError("KernelParams: t_split must be > 0");
  if (max_periods <= 0) throw DomainError("KernelParams: max_periods must be positive");
}

void KernelParams::validate_rotating() const {
  validate();
  if (a == 0.0) throw DomainError("KernelParams: angular velocity a must be nonzero");
}

namespace detail {

double phi1(double w) {
  if (w < kSeriesCutoff) {
    // Σ (-w)^j / (j+1)!
    double term = 1.0;
    double sum = 1.0;
    for (int j = 1; j < kSeriesTerms; ++j) {
      term *= -w / (j + 1);
      sum += term;
    }
    return sum;
  }
  return -std::expm1(-w) / w;
}

double phi2(double w) {
  if (w < kSeriesCutoff) {
    // Σ (-1)^j (j+1) w^j / (j+2)!
    double pw = 0.5;  // (-w)^j / (j+2)!
    double sum = 0.5;
    for (int j = 1; j < kSeriesTerms; ++j) {
      pw *= -w / (j + 2);
      sum += (j + 1) * pw;
    }
    return sum;
  }
  const double e = std::exp(-w);
  return (-std::expm1(-w) - w * e) / (w * w);
}

double phi3(double w) {
  if (w < kSeriesCutoff) {
    // Σ (-1)^{j+1} (j+1)(j+2) w^j / (j+3)!
    double pw = 1.0 / 6.0;  // (-w)^j / (j+3)!
    double sum = -2.0 * pw;
    for (int j = 1; j < kSeriesTerms; ++j) {
      pw *= -w / (j + 3);
      sum -= (j + 1) * (j + 2) * pw;
    }
    return sum;
  }
  return (std::exp(-w) - 2.0 * phi2(w)) / w;
}

double psi(double w) {
  if (w < kSeriesCutoff) {
    // -Σ (-w)^j / (j+2)!
    double term = 0.5;
    double sum = 0.5;
    for (int j = 1; j < kSeriesTerms; ++j) {
      term *= -w / (j + 2);
      sum += term;
    }
    return -sum;
  }
  return (phi1(w) - 1.0) / w;
}

}  // namespace detail

double heat_kernel(const Vec2& x, double t) {
  require_positive_time(t, "heat_kernel");
  return std::exp(-norm2(x) / (4.0 * t)) / (4.0 * kPi * t);
}

Mat22 h_kernel(const Vec2& x, double t) {
  require_positive_time(t, "h_kernel");
  // H = -phi1(w)/(8πt) I + phi2(w)/(16πt²) x⊗x, which is the elementary form
  // regrouped so that nothing is divided by |x|².
  const double w = norm2(x) / (4.0 * t);
  const double iso = -detail::phi1(w) / (8.0 * kPi * t);
  const double aniso = detail::phi2(w) / (16.0 * kPi * t * t);
  return iso * Mat22::identity() + aniso * outer(x, x);
}

Mat22 k_kernel(const Vec2& x, double t) {
  return heat_kernel(x, t) * Mat22::identity() + h_kernel(x, t);
}

Mat22 stokes_E(const Vec2& x) {
  const double r2 = norm2(x);
  if (!(r2 > 0.0)) throw SingularityError("stokes_E: singular at x = 0");
  const double lg = -0.5 * std::log(r2);
  return (lg * Mat22::identity() + outer(x, x) / r2) / (4.0 * kPi);
}

Vec2 pressure_Q(const Vec2& x) {
  const double r2 = norm2(x);
  if (!(r2 > 0.0)) throw SingularityError("pressure_Q: singular at x = 0");
  return x / (2.0 * kPi * r2);
}

Mat22 cauchy_stress(const Mat22& grad_u, double p) {
  const double off = grad_u.a12 + grad_u.a21;
  return {2.0 * grad_u.a11 - p, off, off, 2.0 * grad_u.a22 - p};
}

Mat22 modified_stress(const Mat22& grad_u, double p, const Vec2& u, const Vec2& x, double a) {
  const Vec2 xp = perp(x);
  return cauchy_stress(grad_u, p) + a * (outer(u, xp) - outer(xp, u));
}

}  // namespace rotstokes
