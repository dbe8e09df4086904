#include "cevsc/semiclassical.hpp"

#include <cmath>

#include "cevsc/specfun.hpp"

namespace cevsc {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
// e^{r tau beta} - 1 below this leaves the closed-form constants meaningless.
constexpr double kGrowthFloor = 1e-12;

// Per-request constants of the closed forms. Everything downstream is a pure
// function of (y0, yT) given this.
struct Workspace {
  double beta, gamma, sigma, rate, tau;
  double R;        // e^{r tau beta}
  double D;        // (R - 1)^2
  double k1;       // 2 gamma r / (beta sigma^2)
  double k2;       // r (1 - R) / (2 beta sigma^2 R)
  double A_const;  // beta r tau - 2 gamma r^2 tau / sigma^2

  static Workspace from(const TransformedModel& m) {
    Workspace w;
    w.beta = m.beta;
    w.gamma = m.gamma;
    w.sigma = m.sigma;
    w.rate = m.rate;
    w.tau = m.tau;
    w.R = m.growth();
    w.D = (w.R - 1.0) * (w.R - 1.0);
    const double bs2 = m.beta * m.sigma * m.sigma;
    w.k1 = 2.0 * m.gamma * m.rate / bs2;
    w.k2 = m.rate * (1.0 - w.R) / (2.0 * bs2 * w.R);
    w.A_const = m.beta * m.rate * m.tau -
                2.0 * m.gamma * m.rate * m.rate * m.tau / (m.sigma * m.sigma);
    return w;
  }
};

struct Constants {
  double q;   // sqrt(gamma^2 (R-1)^2 + 4 y0 yT R)
  double c1;
  double c2;
};

Constants constants_at(const Workspace& w, double y0, double yT) {
  Constants c;
  c.q = std::sqrt(w.gamma * w.gamma * w.D + 4.0 * y0 * yT * w.R);
  c.c1 = ((w.R + 1.0) * c.q - 2.0 * w.R * (y0 + yT)) / w.D;
  // conjugate form; the printed (yT R + y0 - q) cancels catastrophically
  // near the degenerate lines |yT R - y0| = gamma (R - 1)
  const double word = yT * w.R - y0;
  const double gap = w.gamma * (w.R - 1.0);
  c.c2 = (word - gap) * (word + gap) / (w.D * (yT * w.R + y0 + c.q));
  return c;
}

// Closed-form action. The log of u/v = [gamma-(C1+2C2R)]/[gamma-(C1+2C2)] is
// evaluated through whichever of the two algebraically equal representations
//   u/v  or  R yT (gamma+C1+2C2) / (y0 (gamma+C1+2C2 R))
// has the better-conditioned denominators at this point (each pair degenerates
// on one of the C2 -> 0 branches). The final term uses the exact identity
// gamma^2 - C1^2 = 4 C2 (C1 + C2 - y0), which removes the 0/0 division.
bool action_at(const Workspace& w, double y0, double yT, const Constants& c, double& out) {
  const double u = w.gamma - (c.c1 + 2.0 * c.c2 * w.R);
  const double v = w.gamma - (c.c1 + 2.0 * c.c2);
  const double p = w.gamma + c.c1 + 2.0 * c.c2;
  const double n = w.gamma + c.c1 + 2.0 * c.c2 * w.R;

  double arg;
  if (std::min(std::abs(p), std::abs(n)) >= std::min(std::abs(u), std::abs(v))) {
    arg = (w.R * yT * p) / (y0 * n);
  } else {
    arg = u / v;
  }
  if (!(arg > 0.0) || !std::isfinite(arg)) return false;

  out = w.A_const + w.k1 * std::log(arg) + 4.0 * w.k2 * (c.c1 + c.c2 - y0);
  return std::isfinite(out);
}

// Mixed second partial of the action with respect to (y0, yT), negated so the
// value is positive where the Gaussian prefactor is real.
bool van_vleck_at(const Workspace& w, double y0, double yT, const Constants& c, double& out) {
  const double q3 = c.q * c.q * c.q;
  const double q0 = 2.0 * yT * w.R / c.q;
  const double qT = 2.0 * y0 * w.R / c.q;
  const double q0T = 2.0 * w.R * (w.gamma * w.gamma * w.D + 2.0 * y0 * yT * w.R) / q3;

  const double c1_0 = ((w.R + 1.0) * q0 - 2.0 * w.R) / w.D;
  const double c1_T = ((w.R + 1.0) * qT - 2.0 * w.R) / w.D;
  const double c1_0T = (w.R + 1.0) * q0T / w.D;
  const double c2_0 = (1.0 - q0) / w.D;
  const double c2_T = (w.R - qT) / w.D;
  const double c2_0T = -q0T / w.D;

  const double p = w.gamma + c.c1 + 2.0 * c.c2;
  const double n = w.gamma + c.c1 + 2.0 * c.c2 * w.R;
  const double u = w.gamma - (c.c1 + 2.0 * c.c2 * w.R);
  const double v = w.gamma - (c.c1 + 2.0 * c.c2);

  const double p_0 = c1_0 + 2.0 * c2_0;
  const double p_T = c1_T + 2.0 * c2_T;
  const double p_0T = c1_0T + 2.0 * c2_0T;
  const double n_0 = c1_0 + 2.0 * w.R * c2_0;
  const double n_T = c1_T + 2.0 * w.R * c2_T;
  const double n_0T = c1_0T + 2.0 * w.R * c2_0T;

  double mixed_log;
  if (std::min(std::abs(p), std::abs(n)) >= std::min(std::abs(u), std::abs(v))) {
    // d2/dy0 dyT of ln(R yT p / (y0 n)); the explicit y0, yT factors drop out
    mixed_log = (p_0T * p - p_0 * p_T) / (p * p) - (n_0T * n - n_0 * n_T) / (n * n);
  } else {
    // d2 ln u - d2 ln v with u' = -n', v' = -p'
    mixed_log = (-n_0T / u - n_0 * n_T / (u * u)) + (p_0T / v + p_0 * p_T / (v * v));
  }

  const double mixed = w.k1 * mixed_log + 4.0 * w.k2 * (c1_0T + c2_0T);
  out = -mixed;
  return std::isfinite(out);
}

bool van_vleck_fd_at(const Workspace& w, double y0, double yT, double rel_step, double& out) {
  const double h0 = rel_step * y0;
  const double hT = rel_step * (yT > 0.0 ? yT : y0);
  double app, apm, amp, amm;
  const auto corner = [&w](double a, double b, double& dst) {
    if (!(a > 0.0) || !(b > 0.0)) return false;
    return action_at(w, a, b, constants_at(w, a, b), dst);
  };
  if (!corner(y0 + h0, yT + hT, app) || !corner(y0 + h0, yT - hT, apm) ||
      !corner(y0 - h0, yT + hT, amp) || !corner(y0 - h0, yT - hT, amm)) {
    return false;
  }
  out = -((app - apm - amp + amm) / (4.0 * h0 * hT));
  return std::isfinite(out);
}

}  // namespace

TransformedModel TransformedModel::from(const MarketScenario& scenario, double tau) {
  if (!(scenario.alpha >= 0.0) || !(scenario.alpha <= 2.0 - kBetaMin)) {
    throw DomainError("alpha", "transformed model requires 0 <= alpha <= 2 - 1e-3");
  }
  if (!(scenario.rate > 0.0)) throw DomainError("rate", "transformed model requires rate > 0");
  if (!(scenario.sigma > 0.0)) throw DomainError("sigma", "transformed model requires sigma > 0");
  if (!(tau > 0.0)) throw DomainError("tau", "transformed model requires tau > 0");

  TransformedModel m;
  m.beta = 2.0 - scenario.alpha;
  m.gamma = (3.0 - scenario.alpha) * scenario.sigma * scenario.sigma / (2.0 * scenario.rate);
  m.sigma = scenario.sigma;
  m.rate = scenario.rate;
  m.tau = tau;
  return m;
}

double TransformedModel::growth() const { return std::exp(rate * tau * beta); }

double transform_spot(double spot, double beta) {
  if (!(spot > 0.0)) throw DomainError("spot", "transform requires spot > 0");
  return std::pow(spot, beta);
}

double inverse_transform(double y, double beta) {
  if (!(y > 0.0)) throw DomainError("y", "inverse transform requires y > 0");
  return std::pow(y, 1.0 / beta);
}

BoundaryConstants boundary_constants(const TransformedModel& model, double y0, double yT) {
  if (!(y0 > 0.0)) throw DomainError("y0", "requires y0 > 0");
  if (!(yT >= 0.0)) throw DomainError("yT", "requires yT >= 0");
  const Workspace w = Workspace::from(model);
  if (std::abs(w.R - 1.0) < kGrowthFloor) throw SingularBoundary();
  const Constants c = constants_at(w, y0, yT);
  return BoundaryConstants{c.c1, c.c2};
}

ClassicalPath::ClassicalPath(const TransformedModel& model, double y0, double yT)
    : model_(model), y0_(y0), yT_(yT), constants_(boundary_constants(model, y0, yT)) {
  // one-time consistency check: keep whichever exponent-sign convention
  // reconstructs the fixed endpoints y(0) = yT, y(tau) = y0
  if (std::abs(constants_.c2) < 1e-300) return;
  const auto close = [](double got, double want) {
    return std::abs(got - want) <= 1e-7 * std::max({1.0, std::abs(got), std::abs(want)});
  };
  reversed_ = true;
  if (!(close(value(0.0), yT_) && close(value(model_.tau), y0_))) {
    reversed_ = false;
    if (!(close(value(0.0), yT_) && close(value(model_.tau), y0_))) {
      reversed_ = true;  // neither branch reconstructs; invariant tests will flag it
    }
  }
}

double ClassicalPath::phi(double t) const {
  if (std::abs(constants_.c2) < 1e-300) throw DegeneratePath();
  const double e = model_.rate * model_.beta * t;
  return reversed_ ? constants_.c2 * model_.growth() * std::exp(-e)
                   : constants_.c2 * std::exp(e);
}

double ClassicalPath::value(double t) const {
  const double f = phi(t);
  const double s = constants_.c1 + 2.0 * f;
  return (s * s - model_.gamma * model_.gamma) / (4.0 * f);
}

double ClassicalPath::derivative(double t) const {
  const double f = phi(t);
  const double m = model_.gamma * model_.gamma - constants_.c1 * constants_.c1;
  const double sign = reversed_ ? -1.0 : 1.0;
  return sign * model_.rate * model_.beta * (m + 4.0 * f * f) / (4.0 * f);
}

double ClassicalPath::second_derivative(double t) const {
  const double f = phi(t);
  const double m = model_.gamma * model_.gamma - constants_.c1 * constants_.c1;
  const double rb = model_.rate * model_.beta;
  return rb * rb * (4.0 * f * f - m) / (4.0 * f);
}

bool try_classical_action(const ClassicalPath& path, double& action_out) {
  const Workspace w = Workspace::from(path.model());
  const Constants c{std::sqrt(w.gamma * w.gamma * w.D + 4.0 * path.y0() * path.yT() * w.R),
                    path.c1(), path.c2()};
  return action_at(w, path.y0(), path.yT(), c, action_out);
}

double classical_action(const ClassicalPath& path) {
  double a;
  if (!try_classical_action(path, a)) throw BranchError();
  return a;
}

double lagrangian_on_path(const ClassicalPath& path, double t) {
  const TransformedModel& m = path.model();
  const double g = path.c2() * std::exp(m.rate * m.beta * t);
  const double diff = m.gamma - path.c1();
  const double num = m.rate * m.rate * (path.c1() + 2.0 * g + m.gamma) * diff * diff;
  const double den = 2.0 * m.sigma * m.sigma * g * (path.c1() + 2.0 * g - m.gamma);
  return num / den + m.beta * m.rate;
}

bool try_van_vleck(const ClassicalPath& path, const SemiclassicalConfig& cfg, double& out) {
  const Workspace w = Workspace::from(path.model());
  if (cfg.vanvleck_mode == VanVleckMode::finite_difference) {
    if (!(cfg.fd_step > 0.0) || !(cfg.fd_step < 1e-2)) {
      throw DomainError("fd_step", "requires fd_step in (0, 1e-2)");
    }
    return van_vleck_fd_at(w, path.y0(), path.yT(), cfg.fd_step, out);
  }
  const Constants c{std::sqrt(w.gamma * w.gamma * w.D + 4.0 * path.y0() * path.yT() * w.R),
                    path.c1(), path.c2()};
  return van_vleck_at(w, path.y0(), path.yT(), c, out);
}

double van_vleck(const ClassicalPath& path, const SemiclassicalConfig& cfg) {
  double m;
  if (!try_van_vleck(path, cfg, m)) throw NonFiniteEvaluation(path.yT());
  return m;
}

PropagatorValue propagator(const ClassicalPath& path, const SemiclassicalConfig& cfg) {
  PropagatorValue value;
  if (!try_classical_action(path, value.action) || !try_van_vleck(path, cfg, value.van_vleck) ||
      value.van_vleck <= 0.0) {
    value.kernel = 0.0;
    value.branch_valid = false;
    return value;
  }
  value.kernel = std::exp(-value.action) * std::sqrt(value.van_vleck / kTwoPi);
  if (!std::isfinite(value.kernel)) {
    value.kernel = 0.0;
    value.branch_valid = false;
  }
  return value;
}

PriceQuote price_call_semiclassical(const PricingRequest& req, const SemiclassicalConfig& cfg) {
  validate_request(req, Engine::semiclassical);

  PriceQuote quote;
  quote.engine = Engine::semiclassical;
  quote.diagnostics.adopted_sign = -1;
  quote.diagnostics.note = cfg.exponent_mode == ExponentMode::transform_consistent
                               ? "mode=consistent"
                               : "mode=literal";

  if (req.tau == 0.0) {
    quote.price = intrinsic_value(req);
    quote.diagnostics.note += ";intrinsic-at-expiry";
    return quote;
  }

  const TransformedModel model = TransformedModel::from(req.scenario, req.tau);
  if (model.rate * model.tau * model.beta < kGrowthFloor) {
    quote.price = intrinsic_value(req);
    quote.diagnostics.note += ";singular-short-time";
    return quote;
  }

  const Workspace w = Workspace::from(model);
  const double y0 = transform_spot(req.scenario.spot, model.beta);
  const double strike = req.contract.strike;
  const bool consistent = cfg.exponent_mode == ExponentMode::transform_consistent;
  const double lower = consistent ? std::pow(strike, model.beta)
                                  : std::pow(strike, 1.0 / model.beta);
  const double payoff_exp = consistent ? 1.0 / model.beta : model.beta;

  long branch_invalid = 0;
  long calls = 0;
  auto integrand = [&](double yT) {
    ++calls;
    const Constants c = constants_at(w, y0, yT);
    double action, vleck;
    if (!action_at(w, y0, yT, c, action) || !van_vleck_at(w, y0, yT, c, vleck) || vleck <= 0.0) {
      ++branch_invalid;
      return 0.0;
    }
    // payoff folded into the exponent: yT^p e^{-A} stays finite where the
    // naive product would evaluate inf * 0
    const double prefactor = std::sqrt(vleck / kTwoPi);
    const double in_money = std::exp(payoff_exp * std::log(yT) - action);
    const double at_strike = strike * std::exp(-action);
    const double value = prefactor * (in_money - at_strike);
    if (!std::isfinite(value)) {
      ++branch_invalid;
      return 0.0;
    }
    return value;
  };

  // substitution scale: map the kernel's bulk (mean +- a few std of the
  // transformed terminal value) into the middle of the unit interval
  const double mean =
      y0 * w.R + model.sigma * model.sigma * (model.beta - 1.0) * (w.R - 1.0) / (2.0 * model.rate);
  const double spread = model.beta * model.sigma *
                        std::sqrt(std::max(mean, 0.25 * y0) * model.tau);
  const double scale = std::max({mean + 6.0 * spread - lower, 4.0 * spread, 1e-12});
  const std::vector<double> features{mean - 4.0 * spread, mean, mean + 4.0 * spread,
                                     mean + 12.0 * spread};

  const IntegrationResult ir =
      integrate_upper_semi_infinite(integrand, lower, cfg.quad, scale, features);
  if (!ir.converged) throw NonConvergence(ir.error_estimate);

  quote.price = std::max(std::exp(-req.scenario.rate * req.tau) * ir.value, 0.0);
  quote.diagnostics.evaluations = ir.evaluations;
  quote.diagnostics.error_estimate = ir.error_estimate;
  quote.diagnostics.converged = ir.converged;
  quote.diagnostics.branch_invalid = branch_invalid;
  quote.diagnostics.branch_invalid_fraction =
      calls > 0 ? static_cast<double>(branch_invalid) / static_cast<double>(calls) : 0.0;
  quote.diagnostics.trustworthy = quote.diagnostics.branch_invalid_fraction <= 1e-3;
  return quote;
}

PriceQuote bs_price_semiclassical(const PricingRequest& req, const QuadratureSpec& quad) {
  validate_request(req, Engine::bs);
  if (req.tau == 0.0 || req.scenario.sigma == 0.0) return bs_price(req);

  const double s0 = req.scenario.spot;
  const double strike = req.contract.strike;
  const double r = req.scenario.rate;
  const double sigma = req.scenario.sigma;
  const double tau = req.tau;

  const double var = sigma * sigma * tau;
  const double mean = std::log(s0) + tau * (r - 0.5 * sigma * sigma);
  const double vleck = 1.0 / var;  // mixed partial of the quadratic action, sign-adopted
  const double prefactor = std::sqrt(vleck / kTwoPi);

  auto integrand = [&](double x) {
    const double half_sq = 0.5 * (x - mean) * (x - mean) / var;
    return prefactor * (std::exp(x - half_sq) - strike * std::exp(-half_sq));
  };

  const double lower = std::log(strike);
  const double sd = std::sqrt(var);
  const double scale = std::max({mean + var + 8.0 * sd - lower, 4.0 * sd});
  const std::vector<double> features{mean - 4.0 * sd, mean, mean + 4.0 * sd, mean + 12.0 * sd};
  const IntegrationResult ir = integrate_upper_semi_infinite(integrand, lower, quad, scale, features);
  if (!ir.converged) throw NonConvergence(ir.error_estimate);

  PriceQuote quote;
  quote.engine = Engine::bs;
  quote.price = std::max(std::exp(-r * tau) * ir.value, 0.0);
  quote.diagnostics.evaluations = ir.evaluations;
  quote.diagnostics.error_estimate = ir.error_estimate;
  quote.diagnostics.adopted_sign = -1;
  quote.diagnostics.note = "bs-semiclassical";
  return quote;
}

}  // namespace cevsc
