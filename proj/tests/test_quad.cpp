#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rotstokes/quad.hpp"

using namespace rotstokes;
using oracle::kPi;

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {1, 2, 5, 8, 16}) {
    const GaussRule g = gauss_legendre(n);
    REQUIRE(g.nodes.size() == static_cast<std::size_t>(n));
    for (int p = 0; p < 2 * n; ++p) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += g.weights[i] * std::pow(g.nodes[i], p);
      const double exact = (p % 2 == 1) ? 0.0 : 2.0 / (p + 1);
      CHECK(sum == doctest::Approx(exact).epsilon(1e-14));
    }
  }
}

TEST_CASE("adaptive Gauss-Kronrod on smooth and peaked integrands") {
  const std::array<double, 2> br{0.0, kPi};
  auto r = adaptive_gauss_kronrod<double>([](double x) { return std::sin(x); }, br, 1e-13, 1e-13);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
  const std::array<double, 2> br2{-1.0, 1.0};
  auto peak = [](double x) { return 1e-3 / (x * x + 1e-6); };
  auto r2 = adaptive_gauss_kronrod<double>(peak, br2, 1e-12, 1e-12);
  CHECK(r2.value == doctest::Approx(2.0 * std::atan(1000.0)).epsilon(1e-11));
  CHECK(r2.abs_error_estimate < 1e-10);
}

TEST_CASE("Euler transform accelerates an alternating series") {
  std::vector<double> partial{0.0};
  for (int k = 1; k <= 20; ++k) partial.push_back(partial.back() + ((k % 2) ? 1.0 : -1.0) / k);
  const double raw_err = std::fabs(partial.back() - std::log(2.0));
  const double acc_err = std::fabs(detail::euler_accelerate(partial, 12) - std::log(2.0));
  CHECK(raw_err > 1e-2);
  CHECK(acc_err < 1e-7);
}

TEST_CASE("gamma-function identities, single form") {
  // ∫_0^∞ e^{-r²/t} t^{-m} dt = Γ(m-1) / r^{2(m-1)}
  const struct {
    int m;
    double r;
  } cases[] = {{2, 1.0}, {2, 3.0}, {3, 1.0}, {3, 2.0}, {4, 1.5}};
  KernelParams p;
  for (const auto& c : cases) {
    auto g = [&c](double t) { return std::exp(-c.r * c.r / t) / std::pow(t, c.m); };
    const double v = integrate_0_inf<double>(g, p, TailStrategy::absolute()).value;
    const double expected = std::tgamma(c.m - 1.0) / std::pow(c.r, 2 * (c.m - 1));
    CHECK(std::fabs(v - expected) < 1e-10);
  }
}

TEST_CASE("gamma-function identities, iterated form") {
  // ∫_0^∞ ∫_t^∞ e^{-r²/s} s^{-(m+1)} ds dt = ∫_0^∞ e^{-r²/s} s^{-m} ds
  KernelParams p;
  for (const auto& [m, r] : std::vector<std::pair<int, double>>{{3, 1.0}, {2, 1.0}, {3, 2.0}}) {
    auto inner = [&](double t) {
      auto h = [&](double u) {
        const double s = t + u;
        return std::exp(-r * r / s) / std::pow(s, m + 1);
      };
      return integrate_0_inf<double>(h, p, TailStrategy::absolute()).value;
    };
    const double v = integrate_0_inf<double>(inner, p, TailStrategy::absolute()).value;
    CHECK(std::fabs(v - std::tgamma(m - 1.0) / std::pow(r, 2 * (m - 1))) < 1e-10);
  }
}

TEST_CASE("oscillatory class matches the Kelvin-function closed form") {
  KernelParams p;
  for (double a : {0.5, 1.0, 3.0, 8.0}) {
    for (double b : {0.25, 1.0}) {
      auto g = [a, b](double t) { return Vec2{std::cos(a * t), std::sin(a * t)} * (std::exp(-b / t) / t); };
      const QuadResult<Vec2> r = integrate_0_inf<Vec2>(g, p, TailStrategy::oscillatory(a));
      const auto ref = oracle::oscillatory_log_integral(a, b);
      CHECK(std::fabs(r.value.x1 - ref.real()) < 1e-8);
      CHECK(std::fabs(r.value.x2 - ref.imag()) < 1e-8);
      CHECK(r.tail_periods_used > 0);
    }
  }
}

TEST_CASE("oscillatory class against an exponentially damped brute-force sum") {
  // With e^{-t/4} damping the integral converges absolutely and a plain
  // composite rule on [0, 400] is an independent reference.
  const double a = 2.0;
  auto g = [a](double t) { return std::cos(a * t) * std::exp(-0.5 / t - 0.25 * t) / t; };
  KernelParams p;
  const double v = integrate_0_inf<double>(g, p, TailStrategy::oscillatory(a)).value;
  const double brute = oracle::gauss5([&](double u) { return g(std::exp(u)) * std::exp(u); }, -8.0, 0.0, 400) +
                       oracle::gauss5(g, 1.0, 400.0, 8000);
  CHECK(std::fabs(v - brute) < 1e-9);
}

TEST_CASE("absolute-class results do not depend on the split point") {
  KernelParams p;
  auto g1 = [](double t) { return std::exp(-2.0 / t) / (t * t); };
  auto g2 = [](double t) { return std::exp(-t) * std::exp(-0.1 / t) / std::sqrt(t); };
  for (double split : {1.0, 0.5, 0.25, 2.0}) {
    KernelParams q = p;
    q.t_split = split;
    const double a1 = integrate_0_inf<double>(g1, p, TailStrategy::absolute()).value;
    const double b1 = integrate_0_inf<double>(g1, q, TailStrategy::absolute()).value;
    CHECK(std::fabs(a1 - b1) <= 2 * p.tol_abs);
    const double a2 = integrate_0_inf<double>(g2, p, TailStrategy::absolute()).value;
    const double b2 = integrate_0_inf<double>(g2, q, TailStrategy::absolute()).value;
    CHECK(std::fabs(a2 - b2) <= 2 * p.tol_abs);
  }
}

TEST_CASE("oscillatory integral stays bounded by C/|a|") {
  // |a| · |∫ e^{iat} e^{-r²/t} dt/t| over a = 1..64 at r = 1/2.
  KernelParams p;
  double lo = 1e300, hi = 0.0;
  for (double a = 1.0; a <= 64.0; a *= 2.0) {
    auto g = [a](double t) { return Vec2{std::cos(a * t), std::sin(a * t)} * (std::exp(-0.25 / t) / t); };
    const double v = a * norm(integrate_0_inf<Vec2>(g, p, TailStrategy::oscillatory(a)).value);
    lo = std::fmin(lo, v);
    hi = std::fmax(hi, v);
  }
  CHECK(hi / lo <= 50.0);
  CHECK(hi < 2.0);
}

TEST_CASE("centered log identity") {
  KernelParams p;
  for (int i = 0; i < 20; ++i) {
    const double r = 0.05 * std::pow(400.0, i / 19.0);
    const double v = centered_scalar_log({r, 0.0}, p);
    CHECK(std::fabs(v - std::log(1.0 / r) / (2 * kPi)) < 1e-8);
  }
  CHECK(std::fabs(centered_scalar_log({0.0, 1.0}, p)) < 1e-8);
}

TEST_CASE("centered Stokes identity") {
  KernelParams p;
  oracle::Rng rng(21);
  for (int i = 0; i < 20; ++i) {
    const Vec2 x = rng.in_annulus(0.1, 10.0);
    CHECK(max_abs(centered_stokes_E(x, p) - stokes_E(x)) < 1e-6);
  }
}

TEST_CASE("failure modes") {
  KernelParams p;
  CHECK_THROWS_AS(TailStrategy::oscillatory(0.0), DomainError);
  // a growing envelope never settles
  auto grow = [](double t) { return std::cos(t) * t; };
  CHECK_THROWS_AS(integrate_0_inf<double>(grow, p, TailStrategy::oscillatory(1.0)), NonConvergence);
  // a non-integrable absolute-class integrand exhausts the tolerance
  auto slow = [](double t) { return 1.0 / (1.0 + t); };
  CHECK_THROWS_AS(integrate_0_inf<double>(slow, p, TailStrategy::absolute()), ToleranceNotMet);
  try {
    integrate_0_inf<double>(slow, p, TailStrategy::absolute());
  } catch (const ToleranceNotMet& e) {
    CHECK(e.estimate().size() == 1);
    CHECK(e.error_bound() > 0.0);
  }
  KernelParams bad = p;
  bad.tol_abs = -1.0;
  CHECK_THROWS_AS(integrate_0_inf<double>(slow, bad, TailStrategy::absolute()), DomainError);
}

TEST_CASE("evaluation is deterministic") {
  KernelParams p;
  auto g = [](double t) { return Vec2{std::cos(3 * t), std::sin(3 * t)} * (std::exp(-1.0 / t) / t); };
  const auto r1 = integrate_0_inf<Vec2>(g, p, TailStrategy::oscillatory(3.0));
  const auto r2 = integrate_0_inf<Vec2>(g, p, TailStrategy::oscillatory(3.0));
  CHECK(r1.value == r2.value);
  CHECK(r1.evaluations == r2.evaluations);
}
