#include "cevsc/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cevsc {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Series representation of P(a, x), valid (and used) for x < a + 1.
double lower_gamma_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (long n = 0; n < 100000000L; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x), used for x >= a + 1.
double upper_gamma_cf(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (long i = 1; i < 100000000L; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("a", "requires a > 0");
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("x", "requires x >= 0");
}

struct SeriesState {
  double sum = 0.0;
  double tail_bound = std::numeric_limits<double>::infinity();
  long terms = 0;
};

// Poisson mixture sum_j w_j(lambda/2) * G(k/2 + j, x/2) where G is P (cdf) or
// Q (survival). Starts at the modal index and expands both ways; the
// incomplete gamma moves along j by the one-step recurrence
//   P(a+1, x) = P(a, x) - t(a, x),  t(a, x) = x^a e^{-x} / Gamma(a+1),
// so each term costs O(1) after the two seed evaluations.
SeriesState poisson_mixture(double x, double k, double lambda, const SeriesControl& ctl,
                            bool survival) {
  const double a0 = 0.5 * k;
  const double x2 = 0.5 * x;
  const double h = 0.5 * lambda;

  SeriesState st;
  if (h == 0.0) {
    st.sum = survival ? regularized_upper_gamma(a0, x2) : regularized_lower_gamma(a0, x2);
    st.tail_bound = 0.0;
    st.terms = 1;
    return st;
  }

  const long jstar = static_cast<long>(std::floor(h));
  const double astar = a0 + static_cast<double>(jstar);
  const double wstar =
      std::exp(-h + static_cast<double>(jstar) * std::log(h) - std::lgamma(static_cast<double>(jstar) + 1.0));
  const double gstar = survival ? regularized_upper_gamma(astar, x2) : regularized_lower_gamma(astar, x2);
  // gamma increment t(astar, x2); underflows to 0 far from the transition,
  // where the incomplete gamma is flat anyway
  const double tstar = std::exp(astar * std::log(x2) - x2 - std::lgamma(astar + 1.0));

  st.sum = wstar * gstar;
  st.terms = 1;
  double up_rem = std::numeric_limits<double>::infinity();
  double down_rem = (jstar == 0) ? 0.0 : std::numeric_limits<double>::infinity();

  // upward pass
  {
    double w = wstar, g = gstar, t = tstar, a = astar;
    long j = jstar;
    while (st.terms < ctl.max_terms) {
      w *= h / static_cast<double>(j + 1);
      g = survival ? g + t : g - t;
      g = std::clamp(g, 0.0, 1.0);
      t *= x2 / (a + 1.0);
      a += 1.0;
      ++j;
      st.sum += w * g;
      ++st.terms;
      // first omitted weight ratio; later ratios only shrink
      const double r = h / static_cast<double>(j + 1);
      if (r < 1.0) {
        const double bound = survival ? 1.0 : g;  // P decreases along j, Q is <= 1
        up_rem = w * bound * r / (1.0 - r);
        if (up_rem <= 0.5 * ctl.term_tol) break;
      }
      if (w == 0.0) {
        up_rem = 0.0;
        break;
      }
    }
  }

  // downward pass
  if (jstar > 0) {
    double w = wstar, g = gstar, t = tstar, a = astar;
    long j = jstar;
    while (j > 0 && st.terms < ctl.max_terms) {
      w *= static_cast<double>(j) / h;
      t *= a / x2;
      g = survival ? g - t : g + t;
      g = std::clamp(g, 0.0, 1.0);
      a -= 1.0;
      --j;
      st.sum += w * g;
      ++st.terms;
      if (j == 0) {
        down_rem = 0.0;
        break;
      }
      const double r = static_cast<double>(j) / h;
      if (r < 1.0) {
        const double bound = survival ? g : 1.0;  // Q decreases going down, P is <= 1
        down_rem = w * bound * r / (1.0 - r);
        if (down_rem <= 0.5 * ctl.term_tol) break;
      }
      if (w == 0.0) {
        down_rem = 0.0;
        break;
      }
    }
  }

  st.tail_bound = up_rem + down_rem;
  if (!(st.tail_bound < ctl.term_tol) && st.terms >= ctl.max_terms) {
    throw SeriesNonConvergence(st.tail_bound);
  }
  st.sum = std::clamp(st.sum, 0.0, 1.0);
  return st;
}

void check_ncx2_args(double x, double k, double lambda, const SeriesControl& ctl) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("x", "requires x >= 0");
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("k", "requires k > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda", "requires lambda >= 0");
  if (!(ctl.term_tol > 0.0) || ctl.max_terms < 1) {
    throw DomainError("series control", "term_tol > 0, max_terms >= 1");
  }
}

}  // namespace

double std_normal_cdf(double x) {
  if (!std::isfinite(x)) throw DomainError("x", "requires finite x");
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double regularized_lower_gamma(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? lower_gamma_series(a, x) : 1.0 - upper_gamma_cf(a, x);
}

double regularized_upper_gamma(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - lower_gamma_series(a, x) : upper_gamma_cf(a, x);
}

double noncentral_chi2_cdf(double x, double k, double lambda, const SeriesControl& ctl,
                           SeriesStats* stats) {
  check_ncx2_args(x, k, lambda, ctl);
  if (x == 0.0) {
    if (stats) *stats = {};
    return 0.0;
  }
  const SeriesState st = poisson_mixture(x, k, lambda, ctl, /*survival=*/false);
  if (stats) *stats = {st.terms, st.tail_bound};
  return st.sum;
}

double noncentral_chi2_sf(double x, double k, double lambda, const SeriesControl& ctl,
                          SeriesStats* stats) {
  check_ncx2_args(x, k, lambda, ctl);
  if (x == 0.0) {
    if (stats) *stats = {};
    return 1.0;
  }
  const SeriesState st = poisson_mixture(x, k, lambda, ctl, /*survival=*/true);
  if (stats) *stats = {st.terms, st.tail_bound};
  return st.sum;
}

}  // namespace cevsc
