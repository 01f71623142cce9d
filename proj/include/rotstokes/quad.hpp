#pragma once

// Improper time integrals ∫_0^∞ g(t) dt for absolutely integrable g and for
// oscillatory, conditionally convergent g (a frequency-a factor times a
// slowly decaying envelope), plus the two centering identities that recover
// the Laplace and Stokes fundamental solutions from the heat kernel.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "rotstokes/core.hpp"
#include "rotstokes/errors.hpp"

namespace rotstokes {

template <class V>
struct QuadResult {
  V value{};
  double abs_error_estimate = 0.0;
  long evaluations = 0;
  int tail_periods_used = 0;
  bool converged = true;
};

/// How the part of the integral beyond the split point δ is handled.
///
/// direct_adaptive: g is absolutely integrable; [δ,∞) is mapped onto (0,1]
/// by t = δ/v and integrated adaptively.
///
/// period_sum_accelerated: g oscillates with the given period; [δ,∞) is cut
/// into half-period chunks whose partial sums alternate asymptotically and
/// are accelerated by repeated averaging (Euler transform). The error
/// estimate is the last accelerated increment, a heuristic rather than a
/// bound.
struct TailStrategy {
  enum class Mode { period_sum_accelerated, direct_adaptive };

  Mode mode = Mode::direct_adaptive;
  double period = 1.0;

  static TailStrategy absolute() { return {Mode::direct_adaptive, 1.0}; }
  static TailStrategy oscillatory(double frequency);
};

// Norms used for error control of scalar, vector and matrix integrands.
inline double quad_norm(double v) { return std::fabs(v); }
inline double quad_norm(const Vec2& v) { return std::fmax(std::fabs(v.x1), std::fabs(v.x2)); }
inline double quad_norm(const Mat22& m) { return max_abs(m); }

namespace detail {

struct KronrodRule {
  static constexpr std::array<double, 8> xgk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wgk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  // 7-point Gauss weights at xgk[1], xgk[3], xgk[5], xgk[7].
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

template <class V>
struct Panel {
  double lo;
  double hi;
  V value;
  double error;
};

/// One 15-point Kronrod panel with the QUADPACK error heuristic.
template <class V, class F>
Panel<V> kronrod15(F& f, double lo, double hi) {
  using R = KronrodRule;
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  std::array<V, 15> fv;
  fv[7] = f(center);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * R::xgk[j];
    fv[j] = f(center - dx);
    fv[14 - j] = f(center + dx);
  }

  V resk = R::wgk[7] * fv[7];
  V resg = R::wg[3] * fv[7];
  for (int j = 0; j < 7; ++j) {
    resk += R::wgk[j] * (fv[j] + fv[14 - j]);
    if (j % 2 == 1) resg += R::wg[j / 2] * (fv[j] + fv[14 - j]);
  }
  const V mean = 0.5 * resk;
  double resasc = R::wgk[7] * quad_norm(fv[7] - mean);
  double resabs = R::wgk[7] * quad_norm(fv[7]);
  for (int j = 0; j < 7; ++j) {
    resasc += R::wgk[j] * (quad_norm(fv[j] - mean) + quad_norm(fv[14 - j] - mean));
    resabs += R::wgk[j] * (quad_norm(fv[j]) + quad_norm(fv[14 - j]));
  }
  resasc *= std::fabs(half);
  resabs *= std::fabs(half);

  double err = quad_norm(resk - resg) * std::fabs(half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::fmin(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double kEpsilon = 2.220446049250313e-16;
  err = std::fmax(err, 50.0 * kEpsilon * resabs);
  return {lo, hi, half * resk, err};
}

}  // namespace detail

/// Globally adaptive Gauss–Kronrod (7/15) quadrature over the union of the
/// intervals delimited by `breaks` (sorted ascending, at least two points).
/// The panel with the largest error estimate is bisected until the summed
/// estimate falls below max(tol_abs, tol_rel |I|) or `max_evals` is spent;
/// in the latter case `converged` is false. Deterministic: the same inputs
/// produce bitwise identical results.
template <class V, class F>
QuadResult<V> adaptive_gauss_kronrod(F&& f, std::span<const double> breaks, double tol_abs,
                                     double tol_rel, long max_evals = 2'000'000) {
  using P = detail::Panel<V>;
  QuadResult<V> out;
  if (breaks.size() < 2) return out;

  auto by_error = [](const P& l, const P& r) {
    if (l.error != r.error) return l.error < r.error;
    return l.lo > r.lo;
  };
  std::vector<P> heap;
  heap.reserve(breaks.size() * 2);
  V total{};
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    heap.push_back(detail::kronrod15<V>(f, breaks[i], breaks[i + 1]));
    out.evaluations += 15;
    total += heap.back().value;
    total_err += heap.back().error;
  }
  std::make_heap(heap.begin(), heap.end(), by_error);

  auto target = [&] { return std::fmax(tol_abs, tol_rel * quad_norm(total)); };
  while (!heap.empty() && total_err > target()) {
    if (out.evaluations + 30 > max_evals) {
      out.converged = false;
      break;
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const P worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // Interval exhausted at machine resolution; keep it and stop refining.
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      out.converged = false;
      break;
    }
    P left = detail::kronrod15<V>(f, worst.lo, mid);
    P right = detail::kronrod15<V>(f, mid, worst.hi);
    out.evaluations += 30;
    total += (left.value + right.value) - worst.value;
    total_err += (left.error + right.error) - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
  }

  // Re-sum in positional order so the result does not depend on the
  // refinement history through rounding.
  std::sort(heap.begin(), heap.end(), [](const P& l, const P& r) { return l.lo < r.lo; });
  V sum{};
  double err = 0.0;
  for (const P& p : heap) {
    sum += p.value;
    err += p.error;
  }
  out.value = sum;
  out.abs_error_estimate = err;
  return out;
}

namespace detail {

/// ∫_0^δ g(t) dt through t = δ e^u, u ∈ [-70, 0]; the sliver below δ e^{-70}
/// is approximated by one rectangle.
template <class V, class F>
QuadResult<V> integrate_near_field(F& g, double delta, double tol_abs, double tol_rel) {
  constexpr double kLogSpan = 70.0;
  constexpr double kStep = 2.5;
  std::vector<double> breaks;
  for (double u = -kLogSpan; u < 0.0; u += kStep) breaks.push_back(u);
  breaks.push_back(0.0);
  auto h = [&](double u) {
    const double t = delta * std::exp(u);
    return t * g(t);
  };
  QuadResult<V> r = adaptive_gauss_kronrod<V>(h, breaks, tol_abs, tol_rel);
  const double t_lo = delta * std::exp(-kLogSpan);
  r.value += t_lo * g(t_lo);
  r.evaluations += 1;
  return r;
}

/// ∫_δ^∞ g(t) dt through t = δ/v, v ∈ (0,1], for absolutely integrable g.
/// t·g(t) at the last breakpoint t = 2^48 δ is added to the error estimate;
/// it is O(1) for integrands that decay too slowly to be integrable.
template <class V, class F>
QuadResult<V> integrate_far_field(F& g, double delta, double tol_abs, double tol_rel) {
  constexpr int kLevels = 48;
  std::vector<double> breaks;
  breaks.push_back(0.0);
  for (int k = kLevels; k >= 0; --k) breaks.push_back(std::ldexp(1.0, -k));
  auto h = [&](double v) { return (delta / (v * v)) * g(delta / v); };
  QuadResult<V> r = adaptive_gauss_kronrod<V>(h, breaks, tol_abs, tol_rel);
  const double t_hi = std::ldexp(delta, kLevels);
  r.abs_error_estimate += t_hi * quad_norm(g(t_hi));
  r.evaluations += 1;
  return r;
}

}  // namespace detail

/// ∫_0^∞ g(t) dt. The caller declares the integrand class through `tail`.
/// Throws NonConvergence when oscillatory tail increments stop decreasing
/// and ToleranceNotMet (with the best estimate) when the budget runs out.
template <class V, class F>
QuadResult<V> integrate_0_inf(F&& g, const KernelParams& params, const TailStrategy& tail);

/// Gauss–Legendre rule with n points on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

/// ∫_0^∞ (G(x,t) - e^{-1/4t}/(4πt)) dt, equal to (1/2π) log(1/|x|).
double centered_scalar_log(const Vec2& x, const KernelParams& params);

/// ∫_0^∞ (K(x,t) - e^{-e/4t}/(8πt) I) dt, equal to stokes_E(x).
Mat22 centered_stokes_E(const Vec2& x, const KernelParams& params);

// ---------------------------------------------------------------------------

namespace detail {

void flatten(double v, std::vector<double>& out);
void flatten(const Vec2& v, std::vector<double>& out);
void flatten(const Mat22& v, std::vector<double>& out);

template <class V>
[[noreturn]] void throw_tolerance(const char* what, const V& estimate, double err) {
  std::vector<double> flat;
  flatten(estimate, flat);
  throw ToleranceNotMet(what, std::move(flat), err);
}

/// Euler (repeated-averaging) transform of the last `depth`+1 partial sums.
template <class V>
V euler_accelerate(const std::vector<V>& partial, int depth) {
  const std::size_t n = partial.size();
  const int k = std::min<int>(depth, static_cast<int>(n) - 1);
  std::vector<V> row(partial.end() - (k + 1), partial.end());
  for (int level = 0; level < k; ++level) {
    for (int i = 0; i + 1 < static_cast<int>(row.size()) - level; ++i) {
      row[i] = 0.5 * (row[i] + row[i + 1]);
    }
  }
  return row.front();
}

}  // namespace detail

template <class V, class F>
QuadResult<V> integrate_0_inf(F&& g, const KernelParams& params, const TailStrategy& tail) {
  params.validate();
  if (!(tail.period > 0.0)) throw DomainError("integrate_0_inf: tail period must be positive");
  const double delta = params.t_split;
  const double tol_near_abs = 0.25 * params.tol_abs;
  const double tol_near_rel = 0.25 * params.tol_rel;

  QuadResult<V> near = detail::integrate_near_field<V>(g, delta, tol_near_abs, tol_near_rel);
  QuadResult<V> out;
  out.evaluations = near.evaluations;

  if (tail.mode == TailStrategy::Mode::direct_adaptive) {
    QuadResult<V> far = detail::integrate_far_field<V>(g, delta, tol_near_abs, tol_near_rel);
    out.value = near.value + far.value;
    out.abs_error_estimate = near.abs_error_estimate + far.abs_error_estimate;
    out.evaluations += far.evaluations;
    out.converged = near.converged && far.converged;
    const double target = std::fmax(params.tol_abs, params.tol_rel * quad_norm(out.value));
    if (!out.converged || !std::isfinite(quad_norm(out.value)) || !(out.abs_error_estimate <= target)) {
      detail::throw_tolerance("integrate_0_inf: absolute-class tolerance not met", out.value,
                              out.abs_error_estimate);
    }
    return out;
  }

  // Oscillatory class: half-period chunks plus Euler acceleration.
  constexpr int kDepth = 12;
  constexpr int kMinChunks = kDepth + 6;
  constexpr int kSettled = 3;
  const double chunk = 0.5 * tail.period;
  const int max_chunks = 2 * params.max_periods;

  std::vector<V> partial;
  partial.reserve(static_cast<std::size_t>(max_chunks) + 1);
  partial.push_back(near.value);
  double quad_err = near.abs_error_estimate;
  V accelerated = near.value;
  V previous = near.value;
  double increment = INFINITY;
  std::vector<double> increments;
  double largest_pair = 0.0;  // max over j of |piece_j| + |piece_{j-1}|
  double last_piece = 0.0;
  double pair = 0.0;
  int settled = 0;
  const double chunk_tol = 0.05 * params.tol_abs;

  for (int j = 0; j < max_chunks; ++j) {
    const double lo = delta + j * chunk;
    const std::array<double, 2> br = {lo, lo + chunk};
    QuadResult<V> piece = adaptive_gauss_kronrod<V>(g, br, chunk_tol, 0.05 * params.tol_rel);
    out.evaluations += piece.evaluations;
    quad_err += piece.abs_error_estimate;
    partial.push_back(partial.back() + piece.value);
    const double piece_norm = quad_norm(piece.value);
    pair = piece_norm + last_piece;
    last_piece = piece_norm;
    if (j > 0) largest_pair = std::fmax(largest_pair, pair);

    if (static_cast<int>(partial.size()) <= kDepth + 1) continue;
    accelerated = detail::euler_accelerate(partial, kDepth);
    increment = quad_norm(accelerated - previous);
    previous = accelerated;
    increments.push_back(increment);
    const double target = std::fmax(params.tol_abs, params.tol_rel * quad_norm(accelerated));
    settled = (increment < target) ? settled + 1 : 0;
    if (j + 1 >= kMinChunks && settled >= kSettled) {
      // Euler averaging also assigns finite values to divergent alternating
      // sums; accept only when the chunks themselves have started to shrink.
      if (pair > 0.0 && pair >= 0.999 * largest_pair) {
        throw NonConvergence("integrate_0_inf: oscillatory chunks are not decreasing");
      }
      out.value = accelerated;
      out.abs_error_estimate = increment + quad_err;
      out.tail_periods_used = (j + 1 + 1) / 2;
      return out;
    }
    // Increments of an accelerated alternating tail shrink steadily; flag a
    // tail that has not improved over the last 64 chunks.
    const std::size_t n = increments.size();
    if (n > 96 && increments[n - 1] > increments[n - 65] && increments[n - 1] > target) {
      throw NonConvergence("integrate_0_inf: oscillatory tail increments are not decreasing");
    }
  }
  detail::throw_tolerance("integrate_0_inf: oscillatory tail did not settle within max_periods",
                          accelerated, increment + quad_err);
}

}  // namespace rotstokes
