#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rotstokes/core.hpp"
#include "rotstokes/errors.hpp"

using namespace rotstokes;
using oracle::kPi;

TEST_CASE("perp and rotation") {
  const Vec2 v{3.0, -2.0};
  CHECK(perp(v) == Vec2{2.0, 3.0});
  CHECK(dot(v, perp(v)) == 0.0);
  const Mat22 o = rotation(0.7);
  CHECK(o.det() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(max_abs(o * o.transpose() - Mat22::identity()) < 1e-15);
  const Vec2 r = rotation(kPi / 2) * Vec2{1.0, 0.0};
  CHECK(std::fabs(r.x1) < 1e-16);
  CHECK(r.x2 == doctest::Approx(1.0));
  // O(t) v^⊥ = (O(t) v)^⊥
  const Vec2 a = o * perp(v), b = perp(o * v);
  CHECK(norm(a - b) < 1e-15);
}

TEST_CASE("outer product and norms") {
  const Mat22 m = outer({1.0, 2.0}, {3.0, 4.0});
  CHECK(m == Mat22{3.0, 4.0, 6.0, 8.0});
  CHECK(m.det() == 0.0);
  CHECK(max_abs(m) == 8.0);
  CHECK(norm(m) == doctest::Approx(std::sqrt(9.0 + 16.0 + 36.0 + 64.0)));
}

TEST_CASE("heat kernel") {
  CHECK(heat_kernel({0.0, 0.0}, 1.0) == doctest::Approx(1.0 / (4.0 * kPi)));
  CHECK(heat_kernel({2.0, 0.0}, 0.5) == doctest::Approx(std::exp(-2.0) / (2.0 * kPi)));
  CHECK_THROWS_AS(heat_kernel({1.0, 0.0}, 0.0), DomainError);
  CHECK_THROWS_AS(heat_kernel({1.0, 0.0}, -1.0), DomainError);
  // unit mass: ∫ G(x,t) dx = 1
  const double t = 0.3;
  const double mass = oracle::gauss5([t](double r) { return heat_kernel({r, 0.0}, t) * 2.0 * kPi * r; }, 0.0, 10.0, 200);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("K is symmetric with trace G") {
  oracle::Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const Vec2 x = rng.in_annulus(0.0, 5.0);
    const double t = std::exp(rng.uniform(-6.0, 6.0));
    const Mat22 k = k_kernel(x, t);
    CHECK(std::fabs(k.a12 - k.a21) <= 1e-15 * max_abs(k));
    CHECK(k.trace() == doctest::Approx(heat_kernel(x, t)).epsilon(1e-12));
  }
}

TEST_CASE("H at the origin and near it") {
  for (double t : {0.01, 1.0, 100.0}) {
    const Mat22 h0 = h_kernel({0.0, 0.0}, t);
    CHECK(max_abs(h0 + (1.0 / (8.0 * kPi * t)) * Mat22::identity()) < 1e-15 / t);
    const Mat22 h1 = h_kernel({1e-9, 0.0}, t);
    CHECK(max_abs(h1 - h0) < 1e-12 / t);
  }
}

TEST_CASE("H matches the time integral of the Hessian of G") {
  // H(x,t) = ∫_t^∞ ∇²G(x,s) ds with ∂_j∂_k G = G (x_j x_k/(4s²) - δ_jk/(2s)).
  auto hessian = [](const Vec2& x, double s) {
    const double g = heat_kernel(x, s);
    return Mat22{g * (x.x1 * x.x1 / (4 * s * s) - 1 / (2 * s)), g * x.x1 * x.x2 / (4 * s * s),
                 g * x.x1 * x.x2 / (4 * s * s), g * (x.x2 * x.x2 / (4 * s * s) - 1 / (2 * s))};
  };
  oracle::Rng rng(12);
  for (int i = 0; i < 12; ++i) {
    const Vec2 x = rng.in_annulus(0.1, 3.0);
    const double t = std::exp(rng.uniform(-3.0, 2.0));
    // s = t e^u, u in [0, 40]
    Mat22 ref;
    for (int e = 0; e < 4; ++e) {
      const int j = e / 2, k = e % 2;
      ref(j, k) = oracle::gauss5(
          [&](double u) {
            const double s = t * std::exp(u);
            return hessian(x, s)(j, k) * s;
          },
          0.0, 40.0, 800);
    }
    const Mat22 h = h_kernel(x, t);
    CHECK(max_abs(h - ref) < 1e-11 * std::fmax(1.0, max_abs(h)));
  }
}

TEST_CASE("phi helpers agree with direct formulas away from zero") {
  for (double w : {0.5, 0.8, 2.0, 10.0, 50.0}) {
    const double e = std::exp(-w);
    const double p1 = (1 - e) / w;
    const double p2 = (1 - e * (1 + w)) / (w * w);
    CHECK(detail::phi1(w) == doctest::Approx(p1).epsilon(1e-13));
    CHECK(detail::phi2(w) == doctest::Approx(p2).epsilon(1e-12));
    CHECK(detail::phi3(w) == doctest::Approx((e - 2 * p2) / w).epsilon(1e-10));
    CHECK(detail::psi(w) == doctest::Approx((p1 - 1) / w).epsilon(1e-12));
  }
  // series limits at w = 0
  CHECK(detail::phi1(0.0) == 1.0);
  CHECK(detail::phi2(0.0) == 0.5);
  CHECK(detail::psi(0.0) == -0.5);
  CHECK(detail::phi3(0.0) == doctest::Approx(-1.0 / 3.0));
  // continuity across the series/closed-form switch
  for (double w : {0.4999999, 0.5000001}) {
    CHECK(std::fabs(detail::phi2(w) - detail::phi2(0.5)) < 1e-7);
  }
}

TEST_CASE("steady Stokes kernel and pressure") {
  const Vec2 x{1.0, 0.0};
  const Mat22 e = stokes_E(x);
  CHECK(e.a11 == doctest::Approx(1.0 / (4.0 * kPi)));
  CHECK(std::fabs(e.a22) < 1e-17);
  CHECK(e.a12 == 0.0);
  const Vec2 q = pressure_Q({3.0, 4.0});
  CHECK(q.x1 == doctest::Approx(3.0 / (50.0 * kPi)));
  CHECK(q.x2 == doctest::Approx(4.0 / (50.0 * kPi)));
  CHECK_THROWS_AS(stokes_E({0.0, 0.0}), SingularityError);
  CHECK_THROWS_AS(pressure_Q({0.0, 0.0}), SingularityError);

  // (E, Q) solves -ΔE + ∇Q = 0 and div E = 0 away from 0; central differences.
  const double h = 1e-3;
  const Vec2 p{0.7, -1.1};
  for (int k = 0; k < 2; ++k) {
    double div = 0.0;
    for (int j = 0; j < 2; ++j) {
      double lap = 0.0;
      for (int l = 0; l < 2; ++l) {
        const Vec2 d = l == 0 ? Vec2{h, 0} : Vec2{0, h};
        lap += (stokes_E(p + d)(j, k) - 2 * stokes_E(p)(j, k) + stokes_E(p - d)(j, k)) / (h * h);
      }
      const Vec2 d = j == 0 ? Vec2{h, 0} : Vec2{0, h};
      const double dq = (pressure_Q(p + d)[k] - pressure_Q(p - d)[k]) / (2 * h);
      CHECK(std::fabs(-lap + dq) < 1e-6);
      div += (stokes_E(p + d)(j, k) - stokes_E(p - d)(j, k)) / (2 * h);
    }
    CHECK(std::fabs(div) < 1e-6);
  }
}

TEST_CASE("stress tensors") {
  const Mat22 g{1.0, 2.0, -0.5, 3.0};
  const Mat22 t = cauchy_stress(g, 0.25);
  CHECK(t == Mat22{2.0 - 0.25, 1.5, 1.5, 6.0 - 0.25});
  const Vec2 u{0.3, -0.2}, x{1.0, 2.0};
  const Mat22 m = modified_stress(g, 0.25, u, x, 2.0);
  const Mat22 expected = t + 2.0 * (outer(u, perp(x)) - outer(perp(x), u));
  CHECK(max_abs(m - expected) < 1e-15);
}

TEST_CASE("KernelParams validation") {
  KernelParams p;
  CHECK_NOTHROW(p.validate_rotating());
  p.a = 0.0;
  CHECK_NOTHROW(p.validate());
  CHECK_THROWS_AS(p.validate_rotating(), DomainError);
  p = {};
  p.tol_abs = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = {};
  p.eps = -1.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = {};
  p.t_split = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = {};
  p.max_periods = 0;
  CHECK_THROWS_AS(p.validate(), DomainError);
}
