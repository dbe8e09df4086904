#pragma once

#include <stdexcept>
#include <string>

namespace cevsc {

/// Input violates a documented domain constraint (e.g. alpha outside [0,2)).
class DomainError : public std::invalid_argument {
 public:
  DomainError(std::string field, std::string constraint)
      : std::invalid_argument(field + ": " + constraint),
        field_(std::move(field)),
        constraint_(std::move(constraint)) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string field_;
  std::string constraint_;
};

/// Adaptive quadrature exhausted its subdivision budget.
class NonConvergence : public std::runtime_error {
 public:
  explicit NonConvergence(double error_estimate)
      : std::runtime_error("quadrature did not converge, error estimate " +
                           std::to_string(error_estimate)),
        error_estimate_(error_estimate) {}

  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

/// Integrand returned NaN or infinity.
class NonFiniteEvaluation : public std::runtime_error {
 public:
  explicit NonFiniteEvaluation(double x)
      : std::runtime_error("integrand not finite at x = " + std::to_string(x)), x_(x) {}

  double x() const noexcept { return x_; }

 private:
  double x_;
};

/// Poisson-mixture series hit max_terms with the tail bound still above tolerance.
class SeriesNonConvergence : public std::runtime_error {
 public:
  explicit SeriesNonConvergence(double tail_bound)
      : std::runtime_error("series did not converge, tail bound " + std::to_string(tail_bound)),
        tail_bound_(tail_bound) {}

  double tail_bound() const noexcept { return tail_bound_; }

 private:
  double tail_bound_;
};

/// The log in the closed-form action has a non-positive argument for this
/// path/branch combination.
class BranchError : public std::runtime_error {
 public:
  BranchError() : std::runtime_error("invalid branch: non-positive log argument in action") {}
};

/// e^{r tau beta} - 1 below numerical resolution; closed-form constants singular.
class SingularBoundary : public std::runtime_error {
 public:
  SingularBoundary() : std::runtime_error("r*tau*beta too small for closed-form constants") {}
};

/// Classical path with C2 = 0 cannot be evaluated.
class DegeneratePath : public std::runtime_error {
 public:
  DegeneratePath() : std::runtime_error("degenerate classical path: C2 = 0") {}
};

/// Required column absent from an input CSV.
class MissingColumn : public std::runtime_error {
 public:
  explicit MissingColumn(const std::string& name)
      : std::runtime_error("missing column: " + name) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cevsc
