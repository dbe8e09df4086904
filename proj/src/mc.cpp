#include "cevsc/mc.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

namespace cevsc {
namespace {

constexpr long kBatchSize = 16384;

// splitmix64, used only to expand (seed, batch index) into stream state
std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++
struct Rng {
  std::uint64_t s[4];

  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s) word = splitmix64(sm);
  }

  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }

  // uniform in (0, 1]
  double uniform() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }
};

// Box-Muller; deterministic draw count per call pair
struct NormalSource {
  Rng rng;
  double spare = 0.0;
  bool has_spare = false;

  explicit NormalSource(std::uint64_t seed) : rng(seed) {}

  double next() {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare = radius * std::sin(angle);
    has_spare = true;
    return radius * std::cos(angle);
  }
};

struct BatchResult {
  double payoff_sum = 0.0;
  double payoff_sumsq = 0.0;
  long absorbed = 0;
};

BatchResult simulate_batch(const PricingRequest& req, const McConfig& cfg, long batch_index,
                           long paths_in_batch, int steps) {
  // stream seed formed from (seed, batch index); identical for any thread count
  std::uint64_t mix = cfg.seed ^ (0x5851f42d4c957f2dULL * static_cast<std::uint64_t>(batch_index + 1));
  NormalSource normals(splitmix64(mix));

  const double s0 = req.scenario.spot;
  const double r = req.scenario.rate;
  const double sigma = req.scenario.sigma;
  const double alpha = req.scenario.alpha;
  const double strike = req.contract.strike;
  const double dt = req.tau / static_cast<double>(steps);
  const double sqrt_dt = std::sqrt(dt);
  const double half_alpha = 0.5 * alpha;

  BatchResult out;
  for (long p = 0; p < paths_in_batch; ++p) {
    double s = s0;
    bool absorbed = false;
    for (int n = 0; n < steps; ++n) {
      const double z = normals.next();
      double vol_level;
      if (half_alpha == 1.0) {
        vol_level = s;
      } else if (half_alpha == 0.5) {
        vol_level = std::sqrt(s);
      } else {
        vol_level = std::pow(s, half_alpha);
      }
      s += r * s * dt + sigma * vol_level * sqrt_dt * z;
      if (s <= 0.0) {
        s = 0.0;
        absorbed = true;
        break;
      }
    }
    if (absorbed) ++out.absorbed;
    const double payoff = std::max(s - strike, 0.0);
    out.payoff_sum += payoff;
    out.payoff_sumsq += payoff * payoff;
  }
  return out;
}

// order-independent pairwise reduction over the per-batch partials
BatchResult reduce(const std::vector<BatchResult>& parts, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return parts[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  const BatchResult a = reduce(parts, lo, mid);
  const BatchResult b = reduce(parts, mid, hi);
  return BatchResult{a.payoff_sum + b.payoff_sum, a.payoff_sumsq + b.payoff_sumsq,
                     a.absorbed + b.absorbed};
}

}  // namespace

McQuote price_call_mc(const PricingRequest& req, const McConfig& cfg) {
  validate_request(req, Engine::mc);
  if (cfg.paths < 1000) throw DomainError("paths", "requires paths >= 1000");
  if (cfg.steps_per_year < 16) throw DomainError("steps", "requires steps_per_year >= 16");

  const double discount = std::exp(-req.scenario.rate * req.tau);

  if (req.tau == 0.0) {
    return McQuote{intrinsic_value(req), 0.0, 0.0};
  }
  if (req.scenario.sigma == 0.0) {
    // deterministic path
    const double terminal = req.scenario.spot * std::exp(req.scenario.rate * req.tau);
    return McQuote{discount * std::max(terminal - req.contract.strike, 0.0), 0.0, 0.0};
  }

  const int steps =
      std::max(16, static_cast<int>(std::lround(cfg.steps_per_year * req.tau)));
  const long batches = (cfg.paths + kBatchSize - 1) / kBatchSize;
  std::vector<BatchResult> parts(static_cast<std::size_t>(batches));

  unsigned workers = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                                  : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(batches));

  std::atomic<long> next_batch{0};
  auto work = [&] {
    for (;;) {
      const long b = next_batch.fetch_add(1);
      if (b >= batches) break;
      const long first_path = b * kBatchSize;
      const long count = std::min(kBatchSize, cfg.paths - first_path);
      parts[static_cast<std::size_t>(b)] = simulate_batch(req, cfg, b, count, steps);
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  const BatchResult total = reduce(parts, 0, parts.size());
  const double n = static_cast<double>(cfg.paths);
  const double mean = total.payoff_sum / n;
  const double var = std::max(0.0, (total.payoff_sumsq - n * mean * mean) / (n - 1.0));

  McQuote quote;
  quote.price = discount * mean;
  quote.std_error = discount * std::sqrt(var / n);
  quote.absorbed_fraction = static_cast<double>(total.absorbed) / n;
  return quote;
}

PriceQuote price_call_mc_quote(const PricingRequest& req, const McConfig& cfg) {
  const McQuote mc = price_call_mc(req, cfg);
  PriceQuote quote;
  quote.engine = Engine::mc;
  quote.price = mc.price;
  quote.diagnostics.mc_std_error = mc.std_error;
  quote.diagnostics.mc_absorbed_fraction = mc.absorbed_fraction;
  quote.diagnostics.evaluations = cfg.paths;
  return quote;
}

}  // namespace cevsc
