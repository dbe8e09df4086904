// cev_pricer: single quotes, parameter sweeps and plot-ready error surfaces
// for the CEV call engines (bs, semiclassical, ncx2, mc).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cevsc/bench.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct QuoteArgs {
  std::string engine = "bs";
  double spot = 100.0;
  double strike = 110.0;
  double rate = 0.05;
  double sigma = 0.2;
  double alpha = 2.0;
  double maturity = 0.5;
  std::string format = "human";
  std::string exponent_mode = "consistent";
  std::uint64_t seed = 20240601;
  long mc_paths = 2'000'000;
  int mc_steps = 512;
  int jobs = 0;
};

int do_quote(const QuoteArgs& args) {
  const auto engine = cevsc::engine_from_name(args.engine);
  if (!engine) throw cevsc::DomainError("engine", "expected bs|semiclassical|ncx2|mc");

  cevsc::PricingRequest req;
  req.scenario = cevsc::MarketScenario{args.spot, args.rate, args.sigma, args.alpha};
  req.contract = cevsc::OptionContract{args.strike, args.maturity, cevsc::PayoffKind::EuropeanCall};
  req.tau = args.maturity;

  cevsc::EngineOptions opts;
  opts.semiclassical.exponent_mode = args.exponent_mode == "literal"
                                         ? cevsc::ExponentMode::paper_literal
                                         : cevsc::ExponentMode::transform_consistent;
  opts.mc.seed = args.seed;
  opts.mc.paths = args.mc_paths;
  opts.mc.steps_per_year = args.mc_steps;
  opts.mc.jobs = args.jobs;

  const cevsc::PriceQuote quote = cevsc::run_quote(req, *engine, opts);
  if (args.format == "csv") {
    std::ostringstream out;
    out.precision(17);
    out << "engine,price,time_ns,diagnostics\n"
        << cevsc::engine_name(quote.engine) << ',' << quote.price << ',' << quote.wall_time_ns
        << ',' << quote.diagnostics.to_csv_field() << '\n';
    std::cout << out.str();
  } else {
    std::cout.precision(10);
    std::cout << "engine:      " << cevsc::engine_name(quote.engine) << '\n'
              << "price:       " << quote.price << '\n'
              << "wall time:   " << quote.wall_time_ns << " ns\n"
              << "diagnostics: " << quote.diagnostics.to_csv_field() << '\n';
  }
  return kExitOk;
}

struct SweepArgs {
  std::string config_path;
  std::string out_path = "sweep.csv";
  std::optional<int> reps, warmup, jobs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> exponent_mode;
};

int do_sweep(const SweepArgs& args) {
  cevsc::SweepConfig config = cevsc::SweepConfig::from_json_file(args.config_path);
  if (args.reps) config.repetitions = *args.reps;
  if (args.warmup) config.warmup = *args.warmup;
  if (args.jobs) config.jobs = *args.jobs;
  if (args.seed) config.seed = *args.seed;
  if (args.exponent_mode) {
    config.exponent_mode = *args.exponent_mode == "literal"
                               ? cevsc::ExponentMode::paper_literal
                               : cevsc::ExponentMode::transform_consistent;
  }
  config.validate();

  const cevsc::SweepResult result = cevsc::run_sweep(config);

  std::ofstream out(args.out_path);
  if (!out) throw cevsc::IoError("cannot open output file: " + args.out_path);
  out << result.to_csv();
  if (!out) throw cevsc::IoError("write failed: " + args.out_path);

  std::cout << result.summary();

  bool any_ok = false;
  for (const auto& record : result.records) {
    for (const auto& cell : record.cells) any_ok |= !cell.failed;
  }
  if (!any_ok) {
    std::cerr << "every sweep cell failed\n";
    return kExitNumeric;
  }
  return kExitOk;
}

struct SurfaceArgs {
  std::string in_path;
  std::string out_path = "surface.csv";
  std::string svg_prefix;
};

int do_surface(const SurfaceArgs& args) {
  std::ifstream in(args.in_path);
  if (!in) throw cevsc::IoError("cannot open sweep csv: " + args.in_path);
  const auto rows = cevsc::error_surface_from_csv(in);

  std::ofstream out(args.out_path);
  if (!out) throw cevsc::IoError("cannot open output file: " + args.out_path);
  out << cevsc::surface_to_csv(rows);

  if (!args.svg_prefix.empty()) {
    std::set<double> maturities;
    for (const auto& row : rows) maturities.insert(row.maturity);
    for (const double maturity : maturities) {
      std::ostringstream name;
      name << args.svg_prefix << "_T" << maturity << ".svg";
      std::ofstream svg(name.str());
      if (!svg) throw cevsc::IoError("cannot open svg file: " + name.str());
      svg << cevsc::surface_to_svg(rows, maturity);
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CEV European call pricing engines and benchmark harness"};
  app.require_subcommand(1);

  QuoteArgs quote_args;
  CLI::App* quote = app.add_subcommand("quote", "price one contract with one engine");
  quote->add_option("--engine", quote_args.engine, "bs|semiclassical|ncx2|mc");
  quote->add_option("--spot", quote_args.spot, "spot price S0");
  quote->add_option("--strike", quote_args.strike, "strike E");
  quote->add_option("--rate", quote_args.rate, "risk-free rate r");
  quote->add_option("--sigma", quote_args.sigma, "volatility scale");
  quote->add_option("--alpha", quote_args.alpha, "elasticity exponent");
  quote->add_option("--maturity", quote_args.maturity, "time to maturity in years");
  quote->add_option("--format", quote_args.format, "csv|human")
      ->check(CLI::IsMember({"csv", "human"}));
  quote->add_option("--exponent-mode", quote_args.exponent_mode, "consistent|literal")
      ->check(CLI::IsMember({"consistent", "literal"}));
  quote->add_option("--seed", quote_args.seed, "mc seed");
  quote->add_option("--mc-paths", quote_args.mc_paths, "mc path count");
  quote->add_option("--mc-steps", quote_args.mc_steps, "mc steps per year");
  quote->add_option("--jobs", quote_args.jobs, "mc worker threads (0 = auto)");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "run a (sigma, alpha, maturity) sweep to CSV");
  sweep->add_option("--config", sweep_args.config_path, "JSON sweep config")->required();
  sweep->add_option("--out", sweep_args.out_path, "output CSV path");
  sweep->add_option("--reps", sweep_args.reps, "timing repetitions");
  sweep->add_option("--warmup", sweep_args.warmup, "discarded warmup repetitions");
  sweep->add_option("--jobs", sweep_args.jobs, "sweep worker threads (0 = auto)");
  sweep->add_option("--seed", sweep_args.seed, "mc seed");
  sweep->add_option("--exponent-mode", sweep_args.exponent_mode, "consistent|literal")
      ->check(CLI::IsMember({"consistent", "literal"}));

  SurfaceArgs surface_args;
  CLI::App* surface = app.add_subcommand("surface", "extract the error surface from a sweep CSV");
  surface->add_option("--in", surface_args.in_path, "sweep CSV")->required();
  surface->add_option("--out", surface_args.out_path, "surface CSV path");
  surface->add_option("--svg", surface_args.svg_prefix, "write per-maturity SVG heatmaps");

  try {
    app.parse(argc, argv);
    if (quote->parsed()) return do_quote(quote_args);
    if (sweep->parsed()) return do_sweep(sweep_args);
    if (surface->parsed()) return do_surface(surface_args);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const cevsc::DomainError& e) {
    std::cerr << "DomainError: " << e.what() << '\n';
    return kExitDomain;
  } catch (const cevsc::NonConvergence& e) {
    std::cerr << "NonConvergence: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const cevsc::SeriesNonConvergence& e) {
    std::cerr << "SeriesNonConvergence: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const cevsc::NonFiniteEvaluation& e) {
    std::cerr << "NonFiniteEvaluation: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const cevsc::IoError& e) {
    std::cerr << "IoError: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
