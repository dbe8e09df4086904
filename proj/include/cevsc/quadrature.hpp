#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include "cevsc/errors.hpp"

namespace cevsc {

/// Tolerances and budget for the global adaptive integrator.
struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;
};

struct IntegrationResult {
  double value = 0.0;
  double error_estimate = 0.0;  ///< >= 0
  long evaluations = 0;
  bool converged = false;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights (QUADPACK dqk15 constants).
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value;
  double error;

  bool operator<(const Panel& other) const { return error < other.error; }
};

// One Gauss-Kronrod 7-15 evaluation over [a, b]; QUADPACK-style error estimate.
template <class F>
Panel gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  auto eval = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v)) throw NonFiniteEvaluation(x);
    return v;
  };

  const double fc = eval(center);
  double result_gauss = kGaussWeights[3] * fc;
  double result_kronrod = kKronrodWeights[7] * fc;
  double resabs = std::abs(result_kronrod);

  double fv[7][2];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kGk15Nodes[i];
    fv[i][0] = eval(center - dx);
    fv[i][1] = eval(center + dx);
    const double sum = fv[i][0] + fv[i][1];
    result_kronrod += kKronrodWeights[i] * sum;
    resabs += kKronrodWeights[i] * (std::abs(fv[i][0]) + std::abs(fv[i][1]));
    if (i % 2 == 1) result_gauss += kGaussWeights[i / 2] * sum;
  }

  const double mean = 0.5 * result_kronrod;
  double resasc = kKronrodWeights[7] * std::abs(fc - mean);
  for (int i = 0; i < 7; ++i) {
    resasc += kKronrodWeights[i] * (std::abs(fv[i][0] - mean) + std::abs(fv[i][1] - mean));
  }

  double err = std::abs((result_kronrod - result_gauss) * half);
  resasc *= std::abs(half);
  resabs *= std::abs(half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(err, 50.0 * eps * resabs);
  }

  return Panel{a, b, result_kronrod * half, err};
}

}  // namespace detail

/// Global adaptive Gauss-Kronrod 7-15 over [a, b]: repeatedly bisects the panel
/// with the largest error estimate until the summed estimate meets
/// max(abs_tol, rel_tol * |value|) or the subdivision budget runs out.
///
/// `interior_points` seed the initial subdivision; pass the locations of known
/// narrow features (a bump much narrower than the interval can otherwise slip
/// between the nodes of the first panel). Points outside (a, b) are ignored.
///
/// The integrand must be side-effect-free; it may be called concurrently by
/// callers that integrate on several threads.
template <class F>
IntegrationResult integrate_adaptive(F&& f, double a, double b, const QuadratureSpec& spec = {},
                                     std::vector<double> interior_points = {}) {
  if (!(a < b)) throw DomainError("interval", "requires a < b");
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0) || spec.max_subdivisions < 1) {
    throw DomainError("quadrature spec", "abs_tol > 0, rel_tol > 0, max_subdivisions >= 1");
  }

  std::sort(interior_points.begin(), interior_points.end());
  std::vector<double> edges{a};
  for (const double p : interior_points) {
    if (p > edges.back() && p < b) edges.push_back(p);
  }
  edges.push_back(b);

  long evals = 0;
  std::priority_queue<detail::Panel> panels;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 1; i < edges.size(); ++i) {
    const detail::Panel panel = detail::gk15(f, edges[i - 1], edges[i]);
    evals += 15;
    total += panel.value;
    total_err += panel.error;
    panels.push(panel);
  }

  int subdivisions = 0;
  while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total)) &&
         subdivisions < spec.max_subdivisions) {
    const detail::Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // interval no longer splittable in double precision
      panels.push(worst);
      break;
    }
    const detail::Panel left = detail::gk15(f, worst.a, mid);
    const detail::Panel right = detail::gk15(f, mid, worst.b);
    evals += 30;
    ++subdivisions;

    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }

  // re-sum from panels for a roundoff-clean total
  double value = 0.0, error = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }

  IntegrationResult result;
  result.value = value;
  result.error_estimate = error;
  result.evaluations = evals;
  result.converged = error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
  return result;
}

/// Integrates f over [a, inf) through the rational substitution
/// y = a + scale * u / (1 - u), u in [0, 1). `scale` sets the length that maps
/// to the middle of the unit interval; pass the decay length of the integrand
/// when it is far from O(1). `interior_points` are feature locations in the
/// original (y) coordinate.
template <class F>
IntegrationResult integrate_upper_semi_infinite(F&& f, double a, const QuadratureSpec& spec = {},
                                                double scale = 1.0,
                                                const std::vector<double>& interior_points = {}) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DomainError("scale", "requires a positive finite substitution scale");
  }
  auto g = [&f, a, scale](double u) {
    const double om = 1.0 - u;
    const double y = a + scale * u / om;
    if (!std::isfinite(y)) return 0.0;  // u so close to 1 that y overflows; integrand must decay
    return f(y) * scale / (om * om);
  };
  std::vector<double> u_points;
  u_points.reserve(interior_points.size());
  for (const double y : interior_points) {
    if (y > a) u_points.push_back((y - a) / (scale + y - a));
  }
  return integrate_adaptive(g, 0.0, 1.0, spec, std::move(u_points));
}

}  // namespace cevsc
