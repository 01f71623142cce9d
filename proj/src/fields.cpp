#include "rotstokes/fields.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "rotstokes/errors.hpp"
#include "rotstokes/fundsol.hpp"
#include "rotstokes/quad.hpp"

namespace rotstokes {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPanelOrder = 8;
// Radius of the disk around x that is handled by a local correction.
constexpr double kInnerRadius = 2e-4;
constexpr int kRingNodes = 32;
// Nodes where |f| is below this fraction of max |f| are skipped.
constexpr double kPruneFraction = 1e-17;

const GaussRule& panel_rule() {
  static const GaussRule rule = gauss_legendre(kPanelOrder);
  return rule;
}

struct RadialNode {
  double r;
  double w;  // includes the Jacobian r
};

void add_panel(double lo, double hi, std::vector<RadialNode>& out) {
  const GaussRule& g = panel_rule();
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  for (int i = 0; i < kPanelOrder; ++i) {
    const double r = c + h * g.nodes[i];
    out.push_back({r, h * g.weights[i] * r});
  }
}

void add_uniform_panels(double lo, double hi, double max_len, std::vector<RadialNode>& out) {
  if (!(hi > lo)) return;
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_len)));
  for (int i = 0; i < n; ++i) add_panel(lo + (hi - lo) * i / n, lo + (hi - lo) * (i + 1) / n, out);
}

int angular_count(double r, double feature) {
  const double want = std::max(32.0, 6.0 * r / feature);
  return 16 * static_cast<int>(std::ceil(want / 16.0));
}

struct Node {
  Vec2 y;
  double w;
};

// Polar rule about the origin covering r in [0, r_max] with uniform panels of
// length <= feature.
std::vector<Node> polar_nodes(double r_max, double feature) {
  std::vector<RadialNode> radial;
  add_uniform_panels(0.0, r_max, feature, radial);

  std::vector<Node> nodes;
  for (const RadialNode& rn : radial) {
    const int n = angular_count(rn.r, feature);
    const double wphi = 2.0 * kPi / n;
    for (int k = 0; k < n; ++k) {
      const double phi = wphi * k;
      nodes.push_back({rn.r * Vec2{std::cos(phi), std::sin(phi)}, rn.w * wphi});
    }
  }
  return nodes;
}

void add_graded_panels(double lo, double hi, double graded_end, double max_len, std::vector<RadialNode>& out) {
  const double stop = std::min(graded_end, hi);
  while (lo < stop) {
    const double next = std::min(3.0 * lo, stop);
    add_panel(lo, next, out);
    lo = next;
  }
  add_uniform_panels(lo, hi, max_len, out);
}

// Rays from x through the support disk |y| < R, cut at the disk boundary so
// that a field which is only finitely smooth there is integrated panel-wise.
// Rays start at r0 (the excluded disk around x). When x lies outside the
// disk the ray directions are parametrized by s with sin(θ - θc) = (R/|x|) sin s,
// which makes the chord length R cos s smooth in s.
std::vector<Node> ray_nodes(const Vec2& x, double r0, double R, double feature) {
  const double d = norm(x);
  const double graded_end = std::min(0.5, feature);
  std::vector<Node> nodes;
  std::vector<RadialNode> radial;
  auto emit_ray = [&](const Vec2& e, double lo, double hi, double wtheta) {
    lo = std::max(lo, r0);
    if (!(hi > lo)) return;
    radial.clear();
    add_graded_panels(lo, hi, lo + graded_end, feature, radial);
    for (const RadialNode& rn : radial) nodes.push_back({x + rn.r * e, rn.w * wtheta});
  };

  if (d <= R) {
    const int n = angular_count(d + R, feature);
    const double wtheta = 2.0 * kPi / n;
    for (int k = 0; k < n; ++k) {
      const Vec2 e{std::cos(wtheta * k), std::sin(wtheta * k)};
      const double b = -dot(x, e);
      const double exit = b + std::sqrt(std::max(0.0, R * R - d * d + b * b));
      emit_ray(e, 0.0, exit, wtheta);
    }
    return nodes;
  }

  const double theta_c = std::atan2(-x.x2, -x.x1);
  const double q = R / d;
  const double alpha = std::asin(q);
  const int panels = std::max(4, angular_count(2.0 * alpha * (d + R), feature) / kPanelOrder);
  const GaussRule& g = panel_rule();
  for (int p = 0; p < panels; ++p) {
    const double lo = -0.5 * kPi + kPi * p / panels;
    const double h = 0.5 * kPi / panels;
    for (int i = 0; i < kPanelOrder; ++i) {
      const double s = lo + h * (1.0 + g.nodes[i]);
      const double phi = std::asin(q * std::sin(s));
      // dθ/ds = q cos s / cos φ
      const double wtheta = h * g.weights[i] * q * std::cos(s) / std::cos(phi);
      const Vec2 e{std::cos(theta_c + phi), std::sin(theta_c + phi)};
      const double b = d * std::cos(phi);
      const double c = R * std::cos(s);
      emit_ray(e, b - c, b + c, wtheta);
    }
  }
  return nodes;
}

// Rings about x from r0 to r_max: geometric panels up to min(0.5, feature),
// uniform panels of length <= feature after that. Used for fast-decaying
// fields, which have no edge at the truncation radius.
std::vector<Node> ring_nodes(const Vec2& x, double r0, double r_max, double feature) {
  std::vector<RadialNode> radial;
  add_graded_panels(r0, r_max, std::min(0.5, feature), feature, radial);
  std::vector<Node> nodes;
  for (const RadialNode& rn : radial) {
    const int n = angular_count(rn.r, feature);
    const double wphi = 2.0 * kPi / n;
    for (int k = 0; k < n; ++k) {
      const double phi = wphi * k;
      nodes.push_back({x + rn.r * Vec2{std::cos(phi), std::sin(phi)}, rn.w * wphi});
    }
  }
  return nodes;
}

std::vector<Node> near_nodes(const SourceField& f, const Vec2& x) {
  if (f.decay_class() == DecayClass::compact) {
    return ray_nodes(x, kInnerRadius, f.support_radius(), f.feature_length());
  }
  return ring_nodes(x, kInnerRadius, norm(x) + f.support_radius(), f.feature_length());
}

Moments polar_moments(const SourceField::Eval& f, double radius, double feature) {
  Moments m;
  for (const Node& n : polar_nodes(radius, feature)) {
    const Vec2 v = f(n.y);
    m.torque += n.w * dot(perp(n.y), v);
    m.force += n.w * v;
  }
  return m;
}

// The volume integrand is taken about x when x is close to the support
// (the kernel singularity is then removed by the polar Jacobian) and about
// the origin when x is well outside it.
bool use_far_rule(const SourceField& f, const Vec2& x) {
  return norm(x) >= 2.0 * f.support_radius() && norm(x) >= f.support_radius() + 1.0;
}

}  // namespace

SourceField::SourceField(std::string name, Eval eval, double support_radius, DecayClass decay_class,
                         double feature_length)
    : name_(std::move(name)),
      eval_(std::move(eval)),
      support_radius_(support_radius),
      decay_class_(decay_class),
      feature_length_(feature_length) {
  if (!eval_) throw DomainError("SourceField: empty evaluation function");
  if (!(support_radius_ > 0.0) || !std::isfinite(support_radius_)) {
    throw DomainError("SourceField: support radius must be positive and finite");
  }
  if (!(feature_length_ > 0.0)) throw DomainError("SourceField: feature length must be positive");
  const Moments m = polar_moments(eval_, support_radius_, feature_length_);
  torque_ = m.torque;
  force_ = m.force;
}

SourceField SourceField::shifted(const Vec2& c) const {
  auto fe = eval_;
  SourceField s(name_, [fe, c](const Vec2& y) { return fe(y - c); }, support_radius_ + norm(c), decay_class_,
                feature_length_);
  s.zero_ = zero_;
  return s;
}

SourceField operator+(const SourceField& f, const SourceField& g) {
  auto fe = f.eval_;
  auto ge = g.eval_;
  const DecayClass cls = (f.decay_class() == DecayClass::compact && g.decay_class() == DecayClass::compact)
                             ? DecayClass::compact
                             : DecayClass::fast_decay;
  SourceField s(f.name() + "+" + g.name(), [fe, ge](const Vec2& y) { return fe(y) + ge(y); },
                std::max(f.support_radius(), g.support_radius()), cls,
                std::min(f.feature_length(), g.feature_length()));
  s.zero_ = f.zero_ && g.zero_;
  return s;
}

SourceField operator*(double c, const SourceField& f) {
  auto fe = f.eval_;
  SourceField s(f.name(), [fe, c](const Vec2& y) { return c * fe(y); }, f.support_radius(), f.decay_class(),
                f.feature_length());
  s.zero_ = f.zero_ || c == 0.0;
  return s;
}

SourceField SourceField::rotational_gaussian(double amplitude, double width) {
  if (!(width > 0.0)) throw DomainError("rotational_gaussian: width must be positive");
  const double inv = 1.0 / (width * width);
  return SourceField(
      "rotational_gaussian",
      [amplitude, inv](const Vec2& y) { return (amplitude * std::exp(-norm2(y) * inv)) * perp(y); },
      6.5 * width, DecayClass::fast_decay, 0.5 * width);
}

SourceField SourceField::force_gaussian(double amplitude, double width, double angle) {
  if (!(width > 0.0)) throw DomainError("force_gaussian: width must be positive");
  const double inv = 1.0 / (width * width);
  const Vec2 dir{std::cos(angle), std::sin(angle)};
  return SourceField(
      "force_gaussian", [amplitude, inv, dir](const Vec2& y) { return (amplitude * std::exp(-norm2(y) * inv)) * dir; },
      6.5 * width, DecayClass::fast_decay, 0.5 * width);
}

SourceField SourceField::rotational_bump(double amplitude, double radius) {
  if (!(radius > 0.0)) throw DomainError("rotational_bump: radius must be positive");
  const double inv = 1.0 / (radius * radius);
  return SourceField(
      "rotational_bump",
      [amplitude, inv](const Vec2& y) {
        const double s = 1.0 - norm2(y) * inv;
        return s > 0.0 ? (amplitude * s * s * s) * perp(y) : Vec2{};
      },
      radius, DecayClass::compact, 0.25 * radius);
}

SourceField SourceField::zero() {
  SourceField s("zero", [](const Vec2&) { return Vec2{}; }, 1.0, DecayClass::compact, 1.0);
  s.zero_ = true;
  return s;
}

SourceField SourceField::grid(double xmin, double xmax, double ymin, double ymax, int nx, int ny,
                              std::vector<Vec2> values) {
  if (nx < 2 || ny < 2) throw DomainError("SourceField::grid: need at least 2 x 2 samples");
  if (!(xmax > xmin) || !(ymax > ymin)) throw DomainError("SourceField::grid: empty extent");
  if (values.size() != static_cast<std::size_t>(nx) * ny) {
    throw DomainError("SourceField::grid: expected nx * ny samples");
  }
  const double dx = (xmax - xmin) / (nx - 1);
  const double dy = (ymax - ymin) / (ny - 1);
  auto data = std::make_shared<const std::vector<Vec2>>(std::move(values));
  auto eval = [=](const Vec2& y) -> Vec2 {
    const double u = (y.x1 - xmin) / dx;
    const double v = (y.x2 - ymin) / dy;
    if (!(u >= 0.0 && v >= 0.0 && u <= nx - 1 && v <= ny - 1)) return {};
    const int i = std::min(static_cast<int>(u), nx - 2);
    const int j = std::min(static_cast<int>(v), ny - 2);
    const double s = u - i;
    const double t = v - j;
    const auto& d = *data;
    const auto at = [&](int ii, int jj) { return d[static_cast<std::size_t>(jj) * nx + ii]; };
    return (1 - s) * (1 - t) * at(i, j) + s * (1 - t) * at(i + 1, j) + (1 - s) * t * at(i, j + 1) +
           s * t * at(i + 1, j + 1);
  };
  const double radius = std::max({std::hypot(xmin, ymin), std::hypot(xmin, ymax), std::hypot(xmax, ymin),
                                  std::hypot(xmax, ymax)});
  return SourceField("grid", eval, radius, DecayClass::compact, std::min(dx, dy));
}

SourceField SourceField::preset(const std::string& name,
                                const std::vector<std::pair<std::string, double>>& parameters) {
  double amplitude = 1.0;
  double width = 1.0;
  double angle = 0.0;
  double radius = 1.0;
  Vec2 shift;
  for (const auto& [key, value] : parameters) {
    if (key == "amplitude") {
      amplitude = value;
    } else if (key == "width") {
      width = value;
    } else if (key == "angle") {
      angle = value;
    } else if (key == "radius") {
      radius = value;
    } else if (key == "cx") {
      shift.x1 = value;
    } else if (key == "cy") {
      shift.x2 = value;
    } else {
      throw DomainError("SourceField::preset: unknown parameter '" + key + "'");
    }
  }
  auto place = [&shift](SourceField f) { return shift == Vec2{} ? f : f.shifted(shift); };
  if (name == "rotational_gaussian") return place(rotational_gaussian(amplitude, width));
  if (name == "force_gaussian") return place(force_gaussian(amplitude, width, angle));
  if (name == "rotational_bump") return place(rotational_bump(amplitude, radius));
  if (name == "zero") return zero();
  throw DomainError("SourceField::preset: unknown preset '" + name + "'");
}

Moments moments(const SourceField& f, const KernelParams& params) {
  auto eval = [&f](const Vec2& y) { return f(y); };
  const Moments coarse = polar_moments(eval, f.support_radius(), f.feature_length());
  const Moments fine = polar_moments(eval, f.support_radius(), 0.5 * f.feature_length());
  const double diff = std::fmax(std::fabs(fine.torque - coarse.torque),
                                std::fmax(std::fabs(fine.force.x1 - coarse.force.x1),
                                          std::fabs(fine.force.x2 - coarse.force.x2)));
  const double scale = std::fmax(std::fabs(fine.torque), norm(fine.force));
  if (diff > std::fmax(params.tol_abs, 1e-9 * scale)) {
    throw ToleranceNotMet("moments: quadrature resolutions disagree",
                          {fine.torque, fine.force.x1, fine.force.x2}, diff);
  }
  return fine;
}

double weighted_l1(const SourceField& f) {
  double s = 0.0;
  for (const Node& n : polar_nodes(f.support_radius(), f.feature_length())) {
    s += n.w * (1.0 + norm(n.y)) * norm(f(n.y));
  }
  return s;
}

double weighted_tail_sup(const SourceField& f, double r0) {
  constexpr int kRays = 64;
  constexpr int kSteps = 400;
  const double r_lo = std::max(r0, 1.0);
  const double r_hi = std::max(r_lo, f.support_radius()) * 2.0;
  double sup = 0.0;
  for (int k = 0; k < kRays; ++k) {
    const double phi = 2.0 * kPi * k / kRays;
    const Vec2 e{std::cos(phi), std::sin(phi)};
    for (int i = 0; i <= kSteps; ++i) {
      const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / kSteps);
      sup = std::fmax(sup, r * r * r * std::log(r) * norm(f(r * e)));
    }
  }
  return sup;
}

FieldSample sample_field(const SourceField& f, const Vec2& x, const KernelParams& params, bool with_gradient) {
  params.validate_rotating();
  FieldSample out;
  if (f.is_zero()) return out;

  const bool far = use_far_rule(f, x);
  const double feature = f.feature_length();
  std::vector<Node> nodes = far ? polar_nodes(f.support_radius(), feature)
                                : near_nodes(f, x);

  std::vector<Vec2> fv(nodes.size());
  double fmax = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    fv[i] = f(nodes[i].y);
    fmax = std::fmax(fmax, norm(fv[i]));
  }
  const double cutoff = kPruneFraction * fmax;

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!(norm(fv[i]) > cutoff)) continue;
    const Vec2& y = nodes[i].y;
    const double w = nodes[i].w;
    const GammaEval g = gamma(x, y, params);
    out.u += w * (g.value * fv[i]);
    out.err_estimate += std::fabs(w) * norm(fv[i]) * g.abs_error_estimate;
    out.p += w * dot(pressure_Q(x - y), fv[i]);
    if (with_gradient) {
      const KernelGradient dg = grad_gamma(x, y, params);
      for (int l = 0; l < 2; ++l) {
        const Vec2 col = dg.d[l] * fv[i];
        out.grad_u(0, l) += w * col.x1;
        out.grad_u(1, l) += w * col.x2;
      }
    }
  }

  if (!far) {
    // Disk |y - x| < r_in: f is frozen at its ring average; Γ contributes its
    // ring average plus the log-profile offset r_in²/8 I (the ring average of
    // log(1/r) exceeds its disk average by 1/2).
    const double area = kPi * kInnerRadius * kInnerRadius;
    const Vec2 fx = f(x);
    Mat22 ring_gamma;
    double ring_p = 0.0;
    Mat22 ring_grad;
    for (int k = 0; k < kRingNodes; ++k) {
      const double phi = 2.0 * kPi * k / kRingNodes;
      const Vec2 y = x + kInnerRadius * Vec2{std::cos(phi), std::sin(phi)};
      const Vec2 fy = f(y);
      ring_gamma += gamma(x, y, params).value;
      ring_p += dot(pressure_Q(x - y), fy);
      if (with_gradient) {
        const KernelGradient dg = grad_gamma(x, y, params);
        for (int l = 0; l < 2; ++l) {
          const Vec2 col = dg.d[l] * fy;
          ring_grad(0, l) += col.x1;
          ring_grad(1, l) += col.x2;
        }
      }
    }
    out.u += (area / kRingNodes) * (ring_gamma * fx) + (kInnerRadius * kInnerRadius / 8.0) * fx;
    out.p += (area / kRingNodes) * ring_p;
    if (with_gradient) out.grad_u += (area / kRingNodes) * ring_grad;
  }
  return out;
}

Vec2 velocity_potential(const SourceField& f, const Vec2& x, const KernelParams& params) {
  return sample_field(f, x, params, false).u;
}

double pressure_potential(const SourceField& f, const Vec2& x, const KernelParams& params) {
  if (f.is_zero()) return 0.0;
  const bool far = use_far_rule(f, x);
  const std::vector<Node> nodes = far ? polar_nodes(f.support_radius(), f.feature_length())
                                      : near_nodes(f, x);
  (void)params;
  double p = 0.0;
  for (const Node& n : nodes) p += n.w * dot(pressure_Q(x - n.y), f(n.y));
  return p;
}

ResidualReport pde_residual(const SourceField& f, const Vec2& x, const KernelParams& params, double fd_step) {
  if (!(fd_step > 0.0)) throw DomainError("pde_residual: fd_step must be positive");
  const double h = fd_step * std::max(1.0, norm(x));
  const FieldSample c = sample_field(f, x, params, false);
  const FieldSample xp = sample_field(f, x + Vec2{h, 0.0}, params, false);
  const FieldSample xm = sample_field(f, x - Vec2{h, 0.0}, params, false);
  const FieldSample yp = sample_field(f, x + Vec2{0.0, h}, params, false);
  const FieldSample ym = sample_field(f, x - Vec2{0.0, h}, params, false);

  const Vec2 du1 = (xp.u - xm.u) / (2.0 * h);
  const Vec2 du2 = (yp.u - ym.u) / (2.0 * h);
  const Vec2 lap = (xp.u + xm.u + yp.u + ym.u - 4.0 * c.u) / (h * h);
  const Vec2 grad_p{(xp.p - xm.p) / (2.0 * h), (yp.p - ym.p) / (2.0 * h)};
  const Vec2 xperp = perp(x);
  const Vec2 advect = xperp.x1 * du1 + xperp.x2 * du2;

  ResidualReport r;
  r.momentum_residual = -lap - params.a * (advect - perp(c.u)) + grad_p - f(x);
  r.divergence = du1.x1 + du2.x2;
  r.fd_step = h;
  return r;
}

std::pair<Vec2, Mat22> flux_carrier(const Vec2& x, const Vec2& x0, double beta) {
  const Vec2 d = x - x0;
  const double r2 = norm2(d);
  if (!(r2 > 0.0)) throw SingularityError("flux_carrier: singular at x = x0");
  const double c = -beta / (2.0 * kPi);
  const Vec2 w = (c / r2) * d;
  const Mat22 grad = (c / r2) * Mat22::identity() - (2.0 * c / (r2 * r2)) * outer(d, d);
  return {w, grad};
}

Vec2 rotational_lift(const Vec2& x, double a, double R) {
  if (!(R >= 1.0)) throw DomainError("rotational_lift: R must be >= 1");
  const double r = norm(x);
  double zeta = 1.0;
  double dzeta = 0.0;
  if (r >= 2.0 * R) {
    return {};
  } else if (r > R) {
    const double s = (r - R) / R;
    zeta = 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
    dzeta = -30.0 * s * s * (1.0 - s) * (1.0 - s) / R;
  }
  // ∇^⊥(ζ r²) = (ζ' r + 2ζ) x^⊥.
  return (0.5 * a * (dzeta * r + 2.0 * zeta)) * perp(x);
}

SkewIdentity skew_identity_check(const AnalyticField& u, const AnalyticField& v, double R1, double R2,
                                 const KernelParams& params, const Vec2& center) {
  if (!(R2 > R1) || !(R1 > 0.0)) throw DomainError("skew_identity_check: need 0 < R1 < R2");
  if (!u.value || !u.gradient || !v.value || !v.gradient) {
    throw DomainError("skew_identity_check: fields need value and gradient");
  }
  (void)params;
  constexpr int kOrder = 16;
  constexpr int kPanels = 8;
  constexpr int kAngles = 256;
  const GaussRule g = gauss_legendre(kOrder);

  auto bracket = [](const AnalyticField& f, const Vec2& x) {
    return f.gradient(x) * perp(x) - perp(f.value(x));
  };

  SkewIdentity out;
  const double dphi = 2.0 * kPi / kAngles;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = R1 + (R2 - R1) * p / kPanels;
    const double hi = R1 + (R2 - R1) * (p + 1) / kPanels;
    for (int i = 0; i < kOrder; ++i) {
      const double r = 0.5 * (lo + hi) + 0.5 * (hi - lo) * g.nodes[i];
      const double wr = 0.5 * (hi - lo) * g.weights[i] * r * dphi;
      for (int k = 0; k < kAngles; ++k) {
        const Vec2 x = center + r * Vec2{std::cos(k * dphi), std::sin(k * dphi)};
        out.lhs += wr * (dot(bracket(u, x), v.value(x)) + dot(u.value(x), bracket(v, x)));
      }
    }
  }
  for (int k = 0; k < kAngles; ++k) {
    const Vec2 e{std::cos(k * dphi), std::sin(k * dphi)};
    const Vec2 xo = center + R2 * e;
    const Vec2 xi = center + R1 * e;
    out.rhs += R2 * dphi * dot(e, perp(xo)) * dot(u.value(xo), v.value(xo));
    out.rhs -= R1 * dphi * dot(e, perp(xi)) * dot(u.value(xi), v.value(xi));
  }
  return out;
}

}  // namespace rotstokes
