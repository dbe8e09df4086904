#pragma once

#include <cstdint>

#include "cevsc/market.hpp"

namespace cevsc {

enum class McScheme { euler_full_truncation };

struct McConfig {
  long paths = 2'000'000;
  int steps_per_year = 512;
  std::uint64_t seed = 0;
  McScheme scheme = McScheme::euler_full_truncation;
  int jobs = 0;  ///< worker threads; 0 = hardware concurrency
};

struct McQuote {
  double price = 0.0;
  double std_error = 0.0;
  double absorbed_fraction = 0.0;
};

/// Full-truncation Euler simulation of dS = r S dt + sigma max(S,0)^{alpha/2} dW
/// with permanent absorption at zero. Deterministic for a given (request,
/// config) regardless of the number of worker threads: every fixed-size path
/// batch owns an RNG stream derived from (seed, batch index) and the reduction
/// runs in batch order.
McQuote price_call_mc(const PricingRequest& req, const McConfig& cfg = {});

/// Same result wrapped as a PriceQuote (std error and absorbed fraction land
/// in the diagnostics).
PriceQuote price_call_mc_quote(const PricingRequest& req, const McConfig& cfg = {});

}  // namespace cevsc
