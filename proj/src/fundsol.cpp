#include "rotstokes/fundsol.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

#include "rotstokes/detail/expint.hpp"
#include "rotstokes/errors.hpp"
#include "rotstokes/quad.hpp"

namespace rotstokes {

namespace {

constexpr double kPi = std::numbers::pi;

// The tail starts where ρ_max / 4T drops to this value; the power series in
// 1/4t is then truncated once ratio^m / m! falls below kSeriesFloor.
constexpr double kTailRatio = 4.0;
constexpr double kSeriesFloor = 1e-18;
constexpr int kMaxSeriesTerms = 80;

// Kernel pieces: G I, the isotropic and the x⊗x parts of H, and the center
// subtraction -e^{-1/4t}/(8πt) I.
enum Piece : unsigned { kHeat = 1u, kIso = 2u, kAniso = 4u, kCenter = 8u };
constexpr unsigned kUncentered = kHeat | kIso | kAniso;
constexpr unsigned kCentered = kUncentered | kCenter;

template <int N>
struct MatPack {
  std::array<Mat22, N> m{};

  MatPack& operator+=(const MatPack& o) {
    for (int i = 0; i < N; ++i) m[i] += o.m[i];
    return *this;
  }
  MatPack& operator-=(const MatPack& o) {
    for (int i = 0; i < N; ++i) m[i] -= o.m[i];
    return *this;
  }
  friend MatPack operator+(MatPack a, const MatPack& b) { return a += b; }
  friend MatPack operator-(MatPack a, const MatPack& b) { return a -= b; }
  friend MatPack operator*(double s, MatPack a) {
    for (auto& x : a.m) x *= s;
    return a;
  }
};

template <int N>
double quad_norm(const MatPack<N>& p) {
  double r = 0.0;
  for (const auto& x : p.m) r = std::fmax(r, max_abs(x));
  return r;
}

template <int N>
void flatten(const MatPack<N>& p, std::vector<double>& out) {
  for (const auto& x : p.m) out.insert(out.end(), {x.a11, x.a12, x.a21, x.a22});
}

struct Coeff {
  double A = 0.0;
  double B = 0.0;
};

// Kernel restricted to `mask` as A I + B z⊗z at ρ = |z|², time t.
Coeff time_coeffs(unsigned mask, double rho, double t) {
  const double s = 0.25 / t;
  const double w = rho * s;
  Coeff c;
  if ((mask & (kHeat | kIso | kCenter)) == (kHeat | kIso | kCenter)) {
    // 8πt (G + iso - center) = 2 expm1(-w) - w psi(w) - expm1(-s), free of cancellation.
    c.A = (2.0 * std::expm1(-w) - w * detail::psi(w) - std::expm1(-s)) * s / (2.0 * kPi);
  } else {
    if (mask & kHeat) c.A += std::exp(-w) * s / kPi;
    if (mask & kIso) c.A -= detail::phi1(w) * s / (2.0 * kPi);
    if (mask & kCenter) c.A -= std::exp(-s) * s / (2.0 * kPi);
  }
  if (mask & kAniso) c.B = detail::phi2(w) * s * s / kPi;
  return c;
}

// ρ-derivatives of the uncentered coefficients.
Coeff time_dcoeffs(double rho, double t) {
  const double s = 0.25 / t;
  const double w = rho * s;
  Coeff c;
  c.A = (-std::exp(-w) + 0.5 * detail::phi2(w)) * s * s / kPi;
  c.B = detail::phi3(w) * s * s * s / kPi;
  return c;
}

// Large-time expansion A = Σ a_m s^m, B = Σ b_m s^m with s = 1/4t, m = 1..M.
// With τ_n = (-ρ)^n / n! the coefficients are
//   heat  a_m = τ_{m-1}/π,   iso a_m = -τ_{m-1}/(2πm),
//   aniso b_m = τ_{m-2}/(πm), center a_m = -(-1)^{m-1}/((m-1)! 2π).
void series_coeffs(unsigned mask, double rho, int M, double* a, double* b) {
  double tau_prev = 0.0;  // τ_{m-2}
  double tau = 1.0;       // τ_{m-1}
  double sign_fact = 1.0; // (-1)^{m-1}/(m-1)!
  for (int m = 1; m <= M; ++m) {
    double am = 0.0;
    double bm = 0.0;
    if (mask & kHeat) am += tau / kPi;
    if (mask & kIso) am -= tau / (2.0 * kPi * m);
    if (mask & kCenter) am -= sign_fact / (2.0 * kPi);
    if ((mask & kAniso) && m >= 2) bm = tau_prev / (kPi * m);
    a[m - 1] = am;
    b[m - 1] = bm;
    tau_prev = tau;
    tau *= -rho / m;
    sign_fact *= -1.0 / m;
  }
}

// ρ-derivatives: heat -τ_{m-2}/π, iso τ_{m-2}/(2πm), aniso -τ_{m-3}/(πm).
void series_dcoeffs(double rho, int M, double* da, double* db) {
  double tau3 = 0.0;  // τ_{m-3}
  double tau2 = 0.0;  // τ_{m-2}
  double tau1 = 1.0;  // τ_{m-1}
  for (int m = 1; m <= M; ++m) {
    da[m - 1] = -tau2 / kPi + tau2 / (2.0 * kPi * m);
    db[m - 1] = -tau3 / (kPi * m);
    tau3 = tau2;
    tau2 = tau1;
    tau1 *= -rho / m;
  }
}

struct Frame {
  Mat22 ot;  // O(θ)^T
  Vec2 z;    // O(θ)x - y
  Vec2 c0;   // O(θ)e_1
  Vec2 c1;   // O(θ)e_2
  double rho;
};

Frame frame_at(double theta, const Vec2& x, const Vec2& y) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Frame f;
  f.ot = {c, s, -s, c};
  f.z = {c * x.x1 - s * x.x2 - y.x1, s * x.x1 + c * x.x2 - y.x2};
  f.c0 = {c, s};
  f.c1 = {-s, c};
  f.rho = norm2(f.z);
  return f;
}

Mat22 assemble(const Frame& f, double A, double B) {
  return f.ot * (A * Mat22::identity() + B * outer(f.z, f.z));
}

KernelGradient assemble_grad(const Frame& f, double dA, double B, double dB) {
  KernelGradient g;
  const Mat22 zz = outer(f.z, f.z);
  const std::array<Vec2, 2> cols = {f.c0, f.c1};
  for (int l = 0; l < 2; ++l) {
    const Vec2& c = cols[l];
    const double zc = dot(f.z, c);
    const Mat22 m = (2.0 * dA * zc) * Mat22::identity() + (2.0 * dB * zc) * zz +
                    B * (outer(c, f.z) + outer(f.z, c));
    g.d[l] = f.ot * m;
  }
  return g;
}

// Closed-form integration of the large-time series on [T,∞). The weight
// W(j,m) turns Σ_j W(j,m) P_m(θ_j) into T^{1-m} 4^{-m} Σ_k c_{m,k} E_m((ε-ika)T),
// where c_{m,k} are the Fourier coefficients of P_m sampled at θ_j = 2πj/N.
struct TailPlan {
  double T = 0.0;
  int M = 0;
  int N = 0;
  std::vector<double> theta;
  std::vector<double> W;  // W[j*M + m-1]

  double weight(int j, int m) const { return W[static_cast<std::size_t>(j) * M + (m - 1)]; }
};

TailPlan build_tail_plan(double a, double eps, double T, int M, int extra_degree) {
  TailPlan p;
  p.T = T;
  p.M = M;
  const int D = M + extra_degree;
  p.N = 2 * D + 2;

  using cplx = std::complex<double>;
  std::vector<std::vector<cplx>> J(static_cast<std::size_t>(D) + 1);
  for (int k = 0; k <= D; ++k) {
    if (k == 0 && eps == 0.0) {
      J[0].assign(M, cplx(0.0));
      for (int m = 2; m <= M; ++m) J[0][m - 1] = 1.0 / (m - 1.0);
    } else {
      J[k] = detail::expint_table(M, cplx(eps * p.T, -k * a * p.T));
    }
  }

  std::vector<double> cs(p.N);
  std::vector<double> sn(p.N);
  p.theta.resize(p.N);
  for (int j = 0; j < p.N; ++j) {
    p.theta[j] = 2.0 * kPi * j / p.N;
    cs[j] = std::cos(p.theta[j]);
    sn[j] = std::sin(p.theta[j]);
  }

  std::vector<double> scale(M);
  double sc = p.T / (4.0 * p.T);
  for (int m = 1; m <= M; ++m) {
    scale[m - 1] = sc / p.N;
    sc /= 4.0 * p.T;
  }

  p.W.assign(static_cast<std::size_t>(p.N) * M, 0.0);
  for (int j = 0; j < p.N; ++j) {
    for (int m = 1; m <= M; ++m) {
      double acc = J[0][m - 1].real();
      for (int k = 1; k <= D; ++k) {
        const int idx = static_cast<int>((static_cast<long>(k) * j) % p.N);
        // Re(e^{-ikθ} J) = cos(kθ) Re J + sin(kθ) Im J
        acc += 2.0 * (cs[idx] * J[k][m - 1].real() + sn[idx] * J[k][m - 1].imag());
      }
      p.W[static_cast<std::size_t>(j) * M + (m - 1)] = scale[m - 1] * acc;
    }
  }
  return p;
}

struct PlanKey {
  double a, eps, T;
  int M, extra;
  auto tie() const { return std::tie(a, eps, T, M, extra); }
  bool operator<(const PlanKey& o) const { return tie() < o.tie(); }
};

// Plans depend on (a, ε, T, M) only. T is rounded up to a power of 2^{1/8}
// so that nearby evaluations share a plan; each thread keeps its own cache,
// and a plan is a pure function of its key, so results stay deterministic.
const TailPlan& tail_plan(double a, double eps, double rho_max, int extra_degree) {
  const double t_min = std::max({rho_max / (4.0 * kTailRatio), 1.0, 2.0 / std::fabs(a)});
  const double T = std::exp2(std::ceil(8.0 * std::log2(t_min)) / 8.0);
  const double q = rho_max / (4.0 * T);
  int M = 3;
  double term = q * q * q / 6.0;
  while (term >= kSeriesFloor && M < kMaxSeriesTerms) {
    ++M;
    term *= q / M;
  }

  constexpr std::size_t kMaxPlans = 512;
  thread_local std::map<PlanKey, TailPlan> cache;
  const PlanKey key{a, eps, T, M, extra_degree};
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  if (cache.size() >= kMaxPlans) cache.clear();
  return cache.emplace(key, build_tail_plan(a, eps, T, M, extra_degree)).first->second;
}

template <int N>
MatPack<N> value_tail(const TailPlan& plan, const Vec2& x, const Vec2& y,
                      const std::array<unsigned, N>& masks) {
  MatPack<N> out;
  std::vector<double> a(plan.M);
  std::vector<double> b(plan.M);
  for (int j = 0; j < plan.N; ++j) {
    const Frame f = frame_at(plan.theta[j], x, y);
    for (int i = 0; i < N; ++i) {
      series_coeffs(masks[i], f.rho, plan.M, a.data(), b.data());
      double alpha = 0.0;
      double beta = 0.0;
      for (int m = 1; m <= plan.M; ++m) {
        alpha += plan.weight(j, m) * a[m - 1];
        beta += plan.weight(j, m) * b[m - 1];
      }
      out.m[i] += assemble(f, alpha, beta);
    }
  }
  return out;
}

KernelGradient grad_tail(const TailPlan& plan, const Vec2& x, const Vec2& y) {
  KernelGradient out;
  std::vector<double> a(plan.M);
  std::vector<double> b(plan.M);
  std::vector<double> da(plan.M);
  std::vector<double> db(plan.M);
  for (int j = 0; j < plan.N; ++j) {
    const Frame f = frame_at(plan.theta[j], x, y);
    series_coeffs(kAniso, f.rho, plan.M, a.data(), b.data());
    series_dcoeffs(f.rho, plan.M, da.data(), db.data());
    double alpha = 0.0;
    double beta = 0.0;
    double dbeta = 0.0;
    for (int m = 1; m <= plan.M; ++m) {
      const double w = plan.weight(j, m);
      alpha += w * da[m - 1];
      beta += w * b[m - 1];
      dbeta += w * db[m - 1];
    }
    out += assemble_grad(f, alpha, beta, dbeta);
  }
  return out;
}

// Adaptive integration of F over [0,T] in a variable τ that is logarithmic
// below t_log (t = t_log e^τ) and linear above (t = t_log + τ). Panel ends
// sit at every half revolution so each panel sees at most half a turn.
template <class V, class F>
QuadResult<V> integrate_finite(F&& f, double eta2, double a, double T, const KernelParams& params) {
  const double half_turn = kPi / std::fabs(a);
  const double t_log = std::min({T, 0.5 * half_turn, 1.0});
  const double t_lo = 1e-12 * std::min(eta2, 1.0);

  std::vector<double> breaks;
  const double u_lo = std::log(t_lo / t_log);
  const int n_log = std::max(1, static_cast<int>(std::ceil(-u_lo / 2.0)));
  for (int i = 0; i < n_log; ++i) breaks.push_back(u_lo * (1.0 - static_cast<double>(i) / n_log));
  breaks.push_back(0.0);
  for (long k = 1;; ++k) {
    const double tk = k * half_turn;
    if (tk >= T) break;
    if (tk > t_log) breaks.push_back(tk - t_log);
  }
  if (T > t_log) breaks.push_back(T - t_log);

  auto h = [&](double u) {
    if (u <= 0.0) {
      const double t = t_log * std::exp(u);
      return t * f(t);
    }
    return f(t_log + u);
  };
  QuadResult<V> r = adaptive_gauss_kronrod<V>(h, breaks, 0.5 * params.tol_abs, 0.5 * params.tol_rel);
  r.value += t_lo * f(t_lo);
  r.evaluations += 1;
  if (!r.converged) {
    detail::throw_tolerance("gamma: time quadrature did not converge", r.value, r.abs_error_estimate);
  }
  return r;
}

void check_separation(const Vec2& x, const Vec2& y, const char* who) {
  const double eta = norm(x - y);
  if (!(eta >= kEtaMin)) {
    throw TooClose(std::string(who) + ": |x - y| below eta_min", eta, kEtaMin);
  }
}

double rho_max_of(const Vec2& x, const Vec2& y) {
  const double r = norm(x) + norm(y);
  return r * r;
}

template <int N>
QuadResult<MatPack<N>> kernel_pack(const Vec2& x, const Vec2& y, double a, double eps,
                                   const std::array<unsigned, N>& masks, const KernelParams& params) {
  auto f = [&](double t) {
    const Frame fr = frame_at(a * t, x, y);
    const double damp = eps > 0.0 ? std::exp(-eps * t) : 1.0;
    MatPack<N> out;
    for (int i = 0; i < N; ++i) {
      const Coeff c = time_coeffs(masks[i], fr.rho, t);
      out.m[i] = damp * assemble(fr, c.A, c.B);
    }
    return out;
  };
  const TailPlan& plan = tail_plan(a, eps, rho_max_of(x, y), 1);
  QuadResult<MatPack<N>> r = integrate_finite<MatPack<N>>(f, norm2(x - y), a, plan.T, params);
  r.value += value_tail<N>(plan, x, y, masks);
  return r;
}

struct CenterKey {
  double a, tol_abs, tol_rel, t_split;
  int max_periods;
  auto tie() const { return std::tie(a, tol_abs, tol_rel, t_split, max_periods); }
  bool operator<(const CenterKey& o) const { return tie() < o.tie(); }
};

}  // namespace

CenterConstant center_constant(double a, const KernelParams& params) {
  KernelParams p = params;
  p.a = a;
  p.validate_rotating();
  const CenterKey key{a, p.tol_abs, p.tol_rel, p.t_split, p.max_periods};

  static std::mutex mutex;
  static std::map<CenterKey, Mat22> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return {it->second, a};
  }

  KernelParams qp = p;
  qp.tol_abs = 0.1 * p.tol_abs;
  qp.tol_rel = 0.1 * p.tol_rel;
  auto g = [a](double t) {
    const double e = std::exp(-0.25 / t) / t;
    return Vec2{std::cos(a * t) * e, std::sin(a * t) * e};
  };
  const Vec2 cs = integrate_0_inf<Vec2>(g, qp, TailStrategy::oscillatory(a)).value;
  const double k = 1.0 / (8.0 * kPi);
  const Mat22 value{k * cs.x1, k * cs.x2, -k * cs.x2, k * cs.x1};

  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(key, value);
  return {value, a};
}

GammaEval gamma(const Vec2& x, const Vec2& y, const KernelParams& params, bool decompose) {
  params.validate_rotating();
  check_separation(x, y, "gamma");
  const CenterConstant center = center_constant(params.a, params);
  GammaEval out;
  if (!decompose) {
    auto r = kernel_pack<1>(x, y, params.a, 0.0, {kCentered}, params);
    out.value = r.value.m[0] + center.value;
    out.abs_error_estimate = r.abs_error_estimate;
    out.evaluations = r.evaluations;
    return out;
  }
  auto r = kernel_pack<4>(x, y, params.a, 0.0, {kCentered, kHeat, kAniso, kIso}, params);
  out.value = r.value.m[0] + center.value;
  out.abs_error_estimate = r.abs_error_estimate;
  out.evaluations = r.evaluations;
  out.decomposition = GammaDecomposition{r.value.m[1], r.value.m[2], r.value.m[3]};
  return out;
}

Mat22 gamma_leading(const Vec2& x, const Vec2& y) {
  const double r2 = norm2(x);
  if (!(r2 > 0.0)) throw SingularityError("gamma_leading: singular at x = 0");
  return outer(perp(x), perp(y)) / (4.0 * kPi * r2);
}

KernelGradient grad_gamma(const Vec2& x, const Vec2& y, const KernelParams& params) {
  params.validate_rotating();
  check_separation(x, y, "grad_gamma");
  const double a = params.a;
  auto f = [&](double t) {
    const Frame fr = frame_at(a * t, x, y);
    const Coeff c = time_coeffs(kAniso, fr.rho, t);
    const Coeff d = time_dcoeffs(fr.rho, t);
    return assemble_grad(fr, d.A, c.B, d.B);
  };
  const TailPlan& plan = tail_plan(a, 0.0, rho_max_of(x, y), 2);
  QuadResult<KernelGradient> r = integrate_finite<KernelGradient>(f, norm2(x - y), a, plan.T, params);
  return r.value + grad_tail(plan, x, y);
}

GammaEval gamma_eps(const Vec2& x, const Vec2& y, const KernelParams& params) {
  params.validate_rotating();
  if (!(params.eps > 0.0)) throw DomainError("gamma_eps: eps must be positive");
  check_separation(x, y, "gamma_eps");
  auto r = kernel_pack<1>(x, y, params.a, params.eps, {kUncentered}, params);
  GammaEval out;
  out.value = r.value.m[0];
  out.abs_error_estimate = r.abs_error_estimate;
  out.evaluations = r.evaluations;
  return out;
}

}  // namespace rotstokes
