#include "rotstokes/asymscan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <thread>

#include <json.hpp>

#include "rotstokes/errors.hpp"

namespace rotstokes {

DecayReport decay_fit(const std::vector<double>& radii, const std::vector<double>& values,
                      double expected_exponent, double tolerance) {
  if (radii.size() != values.size()) throw DomainError("decay_fit: radii and values differ in length");
  if (radii.size() < 4) throw DomainError("decay_fit: need at least 4 radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw DomainError("decay_fit: radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw DomainError("decay_fit: radii must be strictly increasing");
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw DomainError("decay_fit: values must be positive and finite");
    }
  }

  const double n = static_cast<double>(radii.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    mx += std::log(radii[i]);
    my += std::log(values[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double dx = std::log(radii[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(values[i]) - my);
  }

  DecayReport r;
  r.radii = radii;
  r.values = values;
  r.fitted_exponent = sxy / sxx;
  const double intercept = my - r.fitted_exponent * mx;
  r.fitted_coefficient = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double fit = intercept + r.fitted_exponent * std::log(radii[i]);
    const double res = std::log(values[i]) - fit;
    ss += res * res;
    r.bounds.push_back(std::exp(fit));
  }
  r.regression_residual = std::sqrt(ss / n);
  r.expected_exponent = expected_exponent;
  r.tolerance = tolerance;
  r.passed = std::fabs(r.fitted_exponent - expected_exponent) <= tolerance;
  return r;
}

DecayReport decay_scan(const std::function<double(double)>& quantity, const std::vector<double>& radii,
                       double expected_exponent, double tolerance) {
  std::vector<double> values;
  values.reserve(radii.size());
  for (double r : radii) values.push_back(quantity(r));
  return decay_fit(radii, values, expected_exponent, tolerance);
}

DecayReport fitted_bound_check(const std::function<double(const ScanPoint&)>& quantity,
                               const std::function<double(const ScanPoint&)>& bound_shape,
                               const std::vector<ScanPoint>& calib, const std::vector<ScanPoint>& test,
                               double headroom) {
  if (calib.empty() || test.empty()) throw DomainError("fitted_bound_check: empty calibration or test set");
  for (const ScanPoint& c : calib) {
    if (std::find(test.begin(), test.end(), c) != test.end()) {
      throw DomainError("fitted_bound_check: calibration and test sets overlap");
    }
  }
  auto shape_at = [&](const ScanPoint& p) {
    const double s = bound_shape(p);
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("fitted_bound_check: bound shape must be positive");
    return s;
  };

  double c = 0.0;
  for (const ScanPoint& p : calib) c = std::fmax(c, quantity(p) / shape_at(p));

  DecayReport r;
  r.fitted_coefficient = c;
  r.tolerance = headroom;
  for (const ScanPoint& p : test) {
    const double q = quantity(p);
    const double b = headroom * c * shape_at(p);
    r.radii.push_back(p.radius);
    r.values.push_back(q);
    r.bounds.push_back(b);
    if (!(q <= b)) ++r.bound_violations;
  }
  r.passed = r.bound_violations == 0;
  return r;
}

std::vector<double> max_over_directions(const std::function<double(const Vec2&)>& quantity,
                                        const std::vector<double>& radii, int n_dirs, int threads) {
  if (n_dirs < 1) throw DomainError("max_over_directions: need at least one direction");
  const std::size_t total = radii.size() * static_cast<std::size_t>(n_dirs);
  std::vector<double> samples(total, 0.0);
  auto work = [&](std::size_t idx) {
    const double r = radii[idx / n_dirs];
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(idx % n_dirs) / n_dirs;
    samples[idx] = quantity(r * Vec2{std::cos(phi), std::sin(phi)});
  };
  const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(total)));
  if (n_workers == 1) {
    for (std::size_t i = 0; i < total; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < n_workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < total; i = next++) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  std::vector<double> out(radii.size(), 0.0);
  for (std::size_t i = 0; i < total; ++i) out[i / n_dirs] = std::fmax(out[i / n_dirs], samples[i]);
  return out;
}

std::string decay_report_json(const DecayReport& r) {
  nlohmann::ordered_json j;
  j["radii"] = r.radii;
  j["values"] = r.values;
  j["bounds"] = r.bounds;
  j["fitted_exponent"] = r.fitted_exponent;
  j["fitted_coefficient"] = r.fitted_coefficient;
  j["regression_residual"] = r.regression_residual;
  j["bound_violations"] = r.bound_violations;
  j["expected_exponent"] = r.expected_exponent;
  j["tolerance"] = r.tolerance;
  j["passed"] = r.passed;
  return j.dump(2) + "\n";
}

std::string decay_report_csv(const DecayReport& r) {
  std::string out = "radius,value,bound\n";
  char buf[96];
  for (std::size_t i = 0; i < r.radii.size(); ++i) {
    const double bound = i < r.bounds.size() ? r.bounds[i] : 0.0;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.radii[i], r.values[i], bound);
    out += buf;
  }
  return out;
}

}  // namespace rotstokes
