#pragma once

#include "cevsc/market.hpp"
#include "cevsc/specfun.hpp"

namespace cevsc {

/// Schroder parameterization of the exact CEV call price, with beta = 2 - alpha:
///   kappa = 2r / (sigma^2 beta (e^{r beta tau} - 1))
///   x_arg = kappa S0^beta e^{r beta tau}
///   y_arg = kappa E^beta
struct Ncx2Params {
  double kappa = 0.0;
  double x_arg = 0.0;
  double y_arg = 0.0;

  static Ncx2Params from(const PricingRequest& req);
};

/// Exact CEV call via the non-central chi-square distribution:
///   C = S0 [1 - F(2y; 2 + 2/beta, 2x)] - E e^{-r tau} F(2x; 2/beta, 2y).
/// The first term's complement is computed as a direct tail sum.
PriceQuote price_call_ncx2(const PricingRequest& req, const SeriesControl& ctl = {});

}  // namespace cevsc
