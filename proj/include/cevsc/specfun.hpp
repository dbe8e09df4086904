#pragma once

#include "cevsc/errors.hpp"

namespace cevsc {

/// Termination control for the Poisson-mixture series behind the non-central
/// chi-square CDF.
struct SeriesControl {
  double term_tol = 1e-14;
  int max_terms = 10000;
};

/// Standard normal CDF.
double std_normal_cdf(double x);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Series expansion for x < a + 1, continued fraction otherwise.
double regularized_lower_gamma(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed directly.
double regularized_upper_gamma(double a, double x);

/// Work report of one Poisson-mixture evaluation.
struct SeriesStats {
  long terms = 0;
  double tail_bound = 0.0;
};

/// Non-central chi-square CDF with k > 0 degrees of freedom and noncentrality
/// lambda >= 0:
///   F(x; k, lambda) = sum_j Poisson(j; lambda/2) * P(k/2 + j, x/2).
/// Summation starts at the modal index ~ floor(lambda/2) and expands in both
/// directions until the Poisson tail mass drops below ctl.term_tol.
double noncentral_chi2_cdf(double x, double k, double lambda, const SeriesControl& ctl = {},
                           SeriesStats* stats = nullptr);

/// Survival function 1 - F(x; k, lambda) as a direct tail sum over
/// Q(k/2 + j, x/2); keeps relative accuracy for values near zero.
double noncentral_chi2_sf(double x, double k, double lambda, const SeriesControl& ctl = {},
                          SeriesStats* stats = nullptr);

}  // namespace cevsc
