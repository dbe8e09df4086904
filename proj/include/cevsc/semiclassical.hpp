#pragma once

#include "cevsc/market.hpp"
#include "cevsc/quadrature.hpp"

namespace cevsc {

/// Guard distance from alpha = 2: every closed form below carries
/// (e^{r tau beta} - 1) denominators that collapse as beta -> 0. Requests that
/// close to lognormal belong on the BS engine.
inline constexpr double kBetaMin = 1e-3;

/// Constants of the transformed dynamics y = S^beta:
///   beta = 2 - alpha, gamma = (3 - alpha) sigma^2 / (2 r).
struct TransformedModel {
  double beta = 0.0;
  double gamma = 0.0;
  double sigma = 0.0;
  double rate = 0.0;
  double tau = 0.0;

  /// Builds and validates; throws DomainError for alpha outside
  /// [0, 2 - kBetaMin], r <= 0, sigma <= 0 or tau <= 0.
  static TransformedModel from(const MarketScenario& scenario, double tau);

  /// e^{r tau beta}
  double growth() const;
};

/// Which payoff/lower-limit pair the pricing integral uses. The transformed
/// coordinate is y = S^beta, so the consistent payoff is y^{1/beta} - E with
/// lower limit E^beta; `paper_literal` keeps the reciprocal pair found in the
/// reference derivation for reproduction studies.
enum class ExponentMode { transform_consistent, paper_literal };

enum class VanVleckMode { analytic, finite_difference };

struct SemiclassicalConfig {
  QuadratureSpec quad{};
  ExponentMode exponent_mode = ExponentMode::transform_consistent;
  VanVleckMode vanvleck_mode = VanVleckMode::analytic;
  double fd_step = 1e-5;  ///< relative step of the mixed central difference, (0, 1e-2)
};

/// y = S^beta
double transform_spot(double spot, double beta);

/// S = y^{1/beta}
double inverse_transform(double y, double beta);

struct BoundaryConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Constants of the extremal trajectory through (y0, yT). Throws
/// SingularBoundary when e^{r tau beta} - 1 is below 1e-12.
BoundaryConstants boundary_constants(const TransformedModel& model, double y0, double yT);

/// Extremal trajectory of the transformed dynamics with fixed endpoints
/// y(0) = yT and y(tau) = y0. Construction solves for the boundary constants
/// and runs a one-time consistency check selecting the exponent-sign
/// convention that actually reconstructs the endpoints.
class ClassicalPath {
 public:
  ClassicalPath(const TransformedModel& model, double y0, double yT);

  /// y(t), t in [0, tau]. Throws DegeneratePath when C2 = 0.
  double value(double t) const;
  /// Analytic dy/dt.
  double derivative(double t) const;
  /// Analytic d2y/dt2.
  double second_derivative(double t) const;

  const TransformedModel& model() const { return model_; }
  double y0() const { return y0_; }
  double yT() const { return yT_; }
  double c1() const { return constants_.c1; }
  double c2() const { return constants_.c2; }
  /// True when the time-reversed branch was selected by the construction check.
  bool reversed() const { return reversed_; }

 private:
  double phi(double t) const;  // C2-bearing exponential coefficient at time t

  TransformedModel model_;
  double y0_;
  double yT_;
  BoundaryConstants constants_;
  bool reversed_ = true;
};

/// Closed-form action of the extremal trajectory. Throws BranchError when the
/// log argument is non-positive, DegeneratePath when C2 = 0.
double classical_action(const ClassicalPath& path);

/// Non-throwing core used inside pricing integrands: returns false instead of
/// raising on branch/degeneracy failures.
bool try_classical_action(const ClassicalPath& path, double& action_out);

/// Integrand of the action: the Lagrangian evaluated on the classical path at
/// backward time t (closed form in C1, C2). The time-quadrature of this over
/// [0, tau] must reproduce classical_action.
double lagrangian_on_path(const ClassicalPath& path, double t);

/// Mixed second partial of the action with respect to the endpoints, under the
/// sign convention that makes the Gaussian prefactor real (the raw mixed
/// partial is negative on the pricing domain; the returned value is its
/// negation, positive where the kernel is valid). Analytic mode differentiates
/// the closed form; finite_difference applies the mixed central difference to
/// classical_action.
double van_vleck(const ClassicalPath& path, const SemiclassicalConfig& cfg = {});

bool try_van_vleck(const ClassicalPath& path, const SemiclassicalConfig& cfg, double& out);

struct PropagatorValue {
  double action = 0.0;
  double van_vleck = 0.0;
  double kernel = 0.0;
  bool branch_valid = true;  ///< false => zero contribution, counted by callers
};

/// Pauli kernel K = e^{-A} sqrt(M / 2 pi). Branch or sign failures yield a
/// zero-contribution value with branch_valid = false rather than throwing.
PropagatorValue propagator(const ClassicalPath& path, const SemiclassicalConfig& cfg = {});

/// Semiclassical CEV call price: discounted single quadrature of the kernel
/// against the payoff over the terminal transformed coordinate.
PriceQuote price_call_semiclassical(const PricingRequest& req, const SemiclassicalConfig& cfg = {});

/// Lognormal specialization run through the same quadrature pipeline: Gaussian
/// kernel in x = ln S with the quadratic action. Agrees with the closed-form
/// BS price to quadrature accuracy (the quadratic case is exact).
PriceQuote bs_price_semiclassical(const PricingRequest& req, const QuadratureSpec& quad = {});

}  // namespace cevsc
