#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rotstokes {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (t <= 0, a == 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested at a kernel singularity (x = 0, x = y, ...).
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// |x - y| is below the separation at which Γ_a is still evaluated reliably.
class TooClose : public SingularityError {
 public:
  TooClose(const std::string& what, double separation, double eta_min)
      : SingularityError(what), separation_(separation), eta_min_(eta_min) {}

  double separation() const noexcept { return separation_; }
  double eta_min() const noexcept { return eta_min_; }

 private:
  double separation_;
  double eta_min_;
};

/// A tail or series failed to settle (increments not decreasing).
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Quadrature finished without meeting its tolerance. Carries the best
/// estimate (flattened, row-major for matrices) and its error bound.
class ToleranceNotMet : public Error {
 public:
  ToleranceNotMet(const std::string& what, std::vector<double> estimate, double error_bound)
      : Error(what), estimate_(std::move(estimate)), error_bound_(error_bound) {}

  const std::vector<double>& estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  std::vector<double> estimate_;
  double error_bound_;
};

}  // namespace rotstokes
