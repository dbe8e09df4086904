#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cevsc/market.hpp"
#include "cevsc/mc.hpp"
#include "cevsc/semiclassical.hpp"
#include "cevsc/specfun.hpp"

namespace cevsc {

/// Everything a single dispatched pricing call may need beyond the request.
struct EngineOptions {
  SemiclassicalConfig semiclassical{};
  SeriesControl series{};
  McConfig mc{};
};

/// Single dispatch point shared by the CLI and the sweep harness.
PriceQuote price_with_engine(const PricingRequest& req, Engine engine,
                             const EngineOptions& opts = {});

/// Prices once through the dispatcher and stamps the wall time of that call.
PriceQuote run_quote(const PricingRequest& req, Engine engine, const EngineOptions& opts = {});

struct SweepConfig {
  std::vector<double> sigmas{0.2, 0.5, 0.9};
  std::vector<double> alphas{1.0, 1.45, 1.9};
  std::vector<double> maturities{0.5};
  double spot = 100.0;
  double strike = 110.0;
  double rate = 0.05;
  std::vector<Engine> engines{Engine::semiclassical, Engine::ncx2};
  int repetitions = 30;  ///< timing repetitions per engine cell
  int warmup = 5;        ///< leading repetitions discarded
  std::uint64_t seed = 20240601;
  long mc_paths = 2'000'000;
  int mc_steps_per_year = 512;
  int jobs = 0;  ///< sweep worker threads; 0 = hardware concurrency
  ExponentMode exponent_mode = ExponentMode::transform_consistent;
  QuadratureSpec quad{};
  SeriesControl series{};

  void validate() const;  // throws DomainError

  /// Flat JSON document with the fields above (any subset; defaults fill in).
  static SweepConfig from_json_file(const std::string& path);
  static SweepConfig from_json_text(const std::string& text);
};

struct EngineCell {
  Engine engine = Engine::bs;
  double price = 0.0;
  std::int64_t median_ns = 0;
  Diagnostics diagnostics;
  std::string error;  ///< error name when the cell failed; empty otherwise
  bool failed = false;
};

/// One sweep cell: prices per engine plus the semiclassical-vs-benchmark error
/// whenever both engines ran. rel_err is left empty when the benchmark price
/// is at or below 1e-12.
struct BenchmarkRecord {
  double sigma = 0.0;
  double alpha = 0.0;
  double maturity = 0.0;
  std::vector<EngineCell> cells;
  std::optional<double> abs_err;
  std::optional<double> rel_err;

  const EngineCell* cell(Engine engine) const;
};

struct SweepResult {
  std::vector<BenchmarkRecord> records;

  /// Header is exactly
  /// `sigma,alpha,maturity,engine,price,abs_err,rel_err,time_ns,diagnostics`,
  /// one row per engine per cell, sigma-major then alpha then maturity.
  std::string to_csv() const;

  /// Per-maturity max relative error and per-cell benchmark/semiclassical
  /// time ratios, as a human-readable block.
  std::string summary() const;
};

/// Runs every (sigma, alpha, maturity) cell over the configured engines with
/// timing (median of the retained repetitions). Per-cell failures are recorded
/// in the cell's error slot; the sweep only fails wholesale when every cell
/// failed.
SweepResult run_sweep(const SweepConfig& config);

struct SurfaceRow {
  double sigma = 0.0;
  double alpha = 0.0;
  double maturity = 0.0;
  std::optional<double> abs_err;
  std::optional<double> rel_err;
};

/// Extracts the long-format error surface from a sweep CSV. Throws
/// MissingColumn when the input lacks one of the required columns.
std::vector<SurfaceRow> error_surface_from_csv(std::istream& in);

/// `sigma,alpha,maturity,abs_err,rel_err` rows; empty fields for undefined errors.
std::string surface_to_csv(const std::vector<SurfaceRow>& rows);

/// Self-contained SVG heatmap of rel_err for one maturity slice.
std::string surface_to_svg(const std::vector<SurfaceRow>& rows, double maturity);

}  // namespace cevsc
