#pragma once

// Decay-rate harness: log-log regression over radius sweeps and
// "bounded by C times a shape" checks with a constant fitted on a
// calibration set.

#include <functional>
#include <string>
#include <vector>

#include "rotstokes/core.hpp"

namespace rotstokes {

struct DecayReport {
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<double> bounds;  // fitted power law (decay_scan) or 2C·shape (fitted_bound_check)
  double fitted_exponent = 0.0;
  double fitted_coefficient = 0.0;
  double regression_residual = 0.0;  // RMS of log-space residuals
  int bound_violations = 0;
  double expected_exponent = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Least-squares slope of log(value) against log(radius). Passes when
/// |slope - expected_exponent| <= tolerance. Requires >= 4 strictly
/// increasing radii and positive values (DomainError otherwise).
DecayReport decay_scan(const std::function<double(double)>& quantity, const std::vector<double>& radii,
                       double expected_exponent, double tolerance);

/// Same regression on precomputed values.
DecayReport decay_fit(const std::vector<double>& radii, const std::vector<double>& values,
                      double expected_exponent, double tolerance);

/// A point of a bound check: a kernel argument pair with its parameters.
struct ScanPoint {
  double radius = 0.0;
  Vec2 x;
  Vec2 y;
  double a = 1.0;
  double eps = 0.0;

  friend bool operator==(const ScanPoint&, const ScanPoint&) = default;
};

/// C = max over calib of quantity/shape; passes when quantity <= headroom·C·shape
/// on every test point. Throws DomainError when a shape value is not positive
/// or the two sets share a point.
DecayReport fitted_bound_check(const std::function<double(const ScanPoint&)>& quantity,
                               const std::function<double(const ScanPoint&)>& bound_shape,
                               const std::vector<ScanPoint>& calib, const std::vector<ScanPoint>& test,
                               double headroom = 2.0);

/// max over n_dirs equispaced directions of quantity(r (cos φ_k, sin φ_k)),
/// for each radius. Work is spread over `threads` workers; the result does
/// not depend on the thread count.
std::vector<double> max_over_directions(const std::function<double(const Vec2&)>& quantity,
                                        const std::vector<double>& radii, int n_dirs = 16, int threads = 1);

std::string decay_report_json(const DecayReport& report);
/// Columns radius,value,bound.
std::string decay_report_csv(const DecayReport& report);

}  // namespace rotstokes
