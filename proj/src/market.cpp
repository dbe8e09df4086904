#include "cevsc/market.hpp"

#include <cmath>
#include <sstream>

#include "cevsc/semiclassical.hpp"
#include "cevsc/specfun.hpp"

namespace cevsc {

std::string_view engine_name(Engine engine) {
  switch (engine) {
    case Engine::bs: return "bs";
    case Engine::semiclassical: return "semiclassical";
    case Engine::ncx2: return "ncx2";
    case Engine::mc: return "mc";
  }
  return "unknown";
}

std::optional<Engine> engine_from_name(std::string_view name) {
  if (name == "bs") return Engine::bs;
  if (name == "semiclassical") return Engine::semiclassical;
  if (name == "ncx2") return Engine::ncx2;
  if (name == "mc") return Engine::mc;
  return std::nullopt;
}

std::string Diagnostics::to_csv_field() const {
  std::ostringstream out;
  out.precision(6);
  out << "evals=" << evaluations;
  if (error_estimate > 0.0) out << ";err_est=" << error_estimate;
  out << ";converged=" << (converged ? 1 : 0);
  if (branch_invalid > 0) out << ";branch_invalid=" << branch_invalid;
  if (adopted_sign != 0) out << ";adopted_sign=" << adopted_sign;
  if (series_terms > 0) out << ";series_terms=" << series_terms;
  if (mc_std_error > 0.0) out << ";mc_se=" << mc_std_error;
  if (mc_absorbed_fraction > 0.0) out << ";mc_absorbed=" << mc_absorbed_fraction;
  if (!trustworthy) out << ";trustworthy=0";
  if (!note.empty()) out << ";note=" << note;
  return out.str();
}

namespace {

void require(bool ok, const char* field, const char* constraint) {
  if (!ok) throw DomainError(field, constraint);
}

}  // namespace

const PricingRequest& validate_request(const PricingRequest& req, Engine engine) {
  const auto& s = req.scenario;
  const auto& c = req.contract;
  require(std::isfinite(s.spot) && s.spot > 0.0, "spot", "must be > 0");
  require(std::isfinite(c.strike) && c.strike > 0.0, "strike", "must be > 0");
  require(std::isfinite(c.maturity) && c.maturity > 0.0, "maturity", "must be > 0");
  require(std::isfinite(req.tau) && req.tau >= 0.0, "tau", "must be >= 0");
  require(std::isfinite(s.sigma) && s.sigma >= 0.0, "sigma", "must be >= 0");
  require(std::isfinite(s.rate), "rate", "must be finite");
  require(std::isfinite(s.alpha), "alpha", "must be finite");

  switch (engine) {
    case Engine::bs:
      break;
    case Engine::semiclassical:
      require(s.alpha >= 0.0 && s.alpha <= 2.0 - kBetaMin, "alpha",
              "semiclassical engine requires 0 <= alpha <= 2 - 1e-3");
      require(s.rate > 0.0, "rate", "semiclassical engine requires rate > 0");
      require(s.sigma > 0.0, "sigma", "semiclassical engine requires sigma > 0");
      break;
    case Engine::ncx2:
      require(s.alpha >= 0.0 && s.alpha < 2.0, "alpha", "ncx2 engine requires 0 <= alpha < 2");
      require(s.rate > 0.0, "rate", "ncx2 engine requires rate > 0");
      require(s.sigma > 0.0, "sigma", "ncx2 engine requires sigma > 0");
      break;
    case Engine::mc:
      require(s.alpha >= 0.0 && s.alpha <= 2.0, "alpha", "mc engine requires 0 <= alpha <= 2");
      break;
  }
  return req;
}

double intrinsic_value(const PricingRequest& req) {
  return std::max(req.scenario.spot - req.contract.strike, 0.0);
}

PriceQuote bs_price(const PricingRequest& req) {
  validate_request(req, Engine::bs);
  const double s0 = req.scenario.spot;
  const double strike = req.contract.strike;
  const double r = req.scenario.rate;
  const double sigma = req.scenario.sigma;
  const double tau = req.tau;

  PriceQuote quote;
  quote.engine = Engine::bs;

  if (tau == 0.0) {
    quote.price = intrinsic_value(req);
    quote.diagnostics.note = "intrinsic-at-expiry";
    return quote;
  }
  if (sigma == 0.0) {
    // deterministic forward
    quote.price = std::exp(-r * tau) * std::max(s0 * std::exp(r * tau) - strike, 0.0);
    quote.diagnostics.note = "deterministic";
    return quote;
  }

  const double vol = sigma * std::sqrt(tau);
  const double d1 = (std::log(s0 / strike) + tau * (r + 0.5 * sigma * sigma)) / vol;
  const double d2 = d1 - vol;
  quote.price = s0 * std_normal_cdf(d1) - strike * std::exp(-r * tau) * std_normal_cdf(d2);
  quote.price = std::max(quote.price, 0.0);
  return quote;
}

}  // namespace cevsc
