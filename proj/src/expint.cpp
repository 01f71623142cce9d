#include "rotstokes/detail/expint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rotstokes/errors.hpp"

namespace rotstokes::detail {

namespace {

using cplx = std::complex<double>;

constexpr int kMaxIter = 2000;
constexpr double kEps = 1e-17;
constexpr double kTiny = 1e-300;

cplx expint_series(int n, cplx z) {
  const int nm1 = n - 1;
  cplx ans = nm1 != 0 ? cplx(1.0 / nm1) : -std::log(z) - std::numbers::egamma;
  cplx fact = 1.0;
  for (int i = 1; i <= kMaxIter; ++i) {
    fact *= -z / static_cast<double>(i);
    cplx del;
    if (i != nm1) {
      del = -fact / static_cast<double>(i - nm1);
    } else {
      double digamma = -std::numbers::egamma;
      for (int k = 1; k <= nm1; ++k) digamma += 1.0 / k;
      del = fact * (-std::log(z) + digamma);
    }
    ans += del;
    if (std::abs(del) < std::abs(ans) * kEps) return ans;
  }
  throw NonConvergence("expint_n: power series did not converge");
}

// Modified Lentz evaluation of the continued fraction
//   E_n(z) = e^{-z} / (z + n - 1·n/(z + n + 2 - 2(n+1)/(z + n + 4 - ...))).
cplx expint_fraction(int n, cplx z) {
  cplx b = z + static_cast<double>(n);
  cplx c = 1.0 / kTiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (n - 1 + i);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const cplx del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h * std::exp(-z);
  }
  throw NonConvergence("expint_n: continued fraction did not converge");
}

}  // namespace

cplx expint_n(int n, cplx z) {
  if (n < 1) throw DomainError("expint_n: order must be >= 1");
  if (z == cplx(0.0)) {
    if (n == 1) throw SingularityError("expint_n: E_1 is singular at 0");
    return 1.0 / (n - 1.0);
  }
  if (z.real() < 0.0) throw DomainError("expint_n: requires Re z >= 0");
  return std::abs(z) < 1.0 ? expint_series(n, z) : expint_fraction(n, z);
}

std::vector<cplx> expint_table(int nmax, cplx z) {
  std::vector<cplx> e(static_cast<std::size_t>(std::max(nmax, 0)));
  if (nmax <= 0) return e;
  if (std::abs(z) < 1.0) {
    for (int n = 1; n <= nmax; ++n) e[n - 1] = expint_n(n, z);
    return e;
  }
  // Downward recurrence is stable for n < |z|, upward for n > |z|.
  const int pivot = std::clamp(static_cast<int>(std::abs(z)), 1, nmax);
  const cplx ez = std::exp(-z);
  e[pivot - 1] = expint_n(pivot, z);
  for (int n = pivot - 1; n >= 1; --n) e[n - 1] = (ez - static_cast<double>(n) * e[n]) / z;
  for (int n = pivot; n < nmax; ++n) e[n] = (ez - z * e[n - 1]) / static_cast<double>(n);
  return e;
}

}  // namespace rotstokes::detail
