#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "cevsc/errors.hpp"

namespace cevsc {

enum class PayoffKind { EuropeanCall };

enum class Engine { bs, semiclassical, ncx2, mc };

std::string_view engine_name(Engine engine);
std::optional<Engine> engine_from_name(std::string_view name);

struct OptionContract {
  double strike = 0.0;    ///< > 0
  double maturity = 0.0;  ///< T in years, > 0
  PayoffKind kind = PayoffKind::EuropeanCall;
};

struct MarketScenario {
  double spot = 0.0;   ///< S0 > 0
  double rate = 0.0;   ///< continuously compounded, per year
  double sigma = 0.0;  ///< volatility scale, >= 0
  double alpha = 2.0;  ///< elasticity exponent; [0,2) for the CEV engines
};

struct PricingRequest {
  MarketScenario scenario;
  OptionContract contract;
  double tau = 0.0;  ///< time to maturity T - t in years
};

/// Per-quote metadata: quadrature/series effort, branch bookkeeping for the
/// semiclassical engine, Monte Carlo uncertainty.
struct Diagnostics {
  long evaluations = 0;
  double error_estimate = 0.0;
  bool converged = true;
  long branch_invalid = 0;
  double branch_invalid_fraction = 0.0;
  bool trustworthy = true;
  int adopted_sign = 0;  ///< van Vleck sign convention actually used; 0 = n/a
  long series_terms = 0;
  double series_tail = 0.0;
  double mc_std_error = 0.0;
  double mc_absorbed_fraction = 0.0;
  std::string note;

  /// Key=value pairs joined with ';' so the blob fits in one CSV field.
  std::string to_csv_field() const;
};

struct PriceQuote {
  double price = 0.0;
  Engine engine = Engine::bs;
  std::int64_t wall_time_ns = 0;
  Diagnostics diagnostics;
};

/// Checks the type invariants that apply to `engine` and returns the request
/// unchanged; throws DomainError naming the violated field otherwise.
const PricingRequest& validate_request(const PricingRequest& req, Engine engine);

/// max(S0 - E, 0); the tau -> 0 limit for every engine.
double intrinsic_value(const PricingRequest& req);

/// Closed-form Black-Scholes call: S0 N(d1) - E e^{-r tau} N(d2).
/// sigma = 0 is priced as the deterministic forward, tau = 0 as intrinsic.
PriceQuote bs_price(const PricingRequest& req);

}  // namespace cevsc
