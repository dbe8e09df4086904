#include "cevsc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cevsc/ncx2.hpp"

namespace cevsc {
namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::int64_t median_ns(std::vector<std::int64_t> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  if (n == 0) return 0;
  if (n % 2 == 1) return xs[n / 2];
  return (xs[n / 2 - 1] + xs[n / 2]) / 2;
}

std::string classify_error(const std::exception& e) {
  if (dynamic_cast<const DomainError*>(&e)) return std::string("DomainError: ") + e.what();
  if (dynamic_cast<const NonConvergence*>(&e)) return std::string("NonConvergence: ") + e.what();
  if (dynamic_cast<const SeriesNonConvergence*>(&e)) {
    return std::string("SeriesNonConvergence: ") + e.what();
  }
  if (dynamic_cast<const NonFiniteEvaluation*>(&e)) {
    return std::string("NonFiniteEvaluation: ") + e.what();
  }
  return std::string("error: ") + e.what();
}

}  // namespace

PriceQuote price_with_engine(const PricingRequest& req, Engine engine, const EngineOptions& opts) {
  switch (engine) {
    case Engine::bs: return bs_price(req);
    case Engine::semiclassical: return price_call_semiclassical(req, opts.semiclassical);
    case Engine::ncx2: return price_call_ncx2(req, opts.series);
    case Engine::mc: return price_call_mc_quote(req, opts.mc);
  }
  throw DomainError("engine", "unknown engine");
}

PriceQuote run_quote(const PricingRequest& req, Engine engine, const EngineOptions& opts) {
  const std::int64_t start = now_ns();
  PriceQuote quote = price_with_engine(req, engine, opts);
  quote.wall_time_ns = now_ns() - start;
  return quote;
}

void SweepConfig::validate() const {
  if (sigmas.empty() || alphas.empty() || maturities.empty()) {
    throw DomainError("sweep", "sigma/alpha/maturity lists must be non-empty");
  }
  if (engines.empty()) throw DomainError("engines", "must select at least one engine");
  if (!(repetitions > warmup) || warmup < 0) {
    throw DomainError("repetitions", "requires repetitions > warmup >= 0");
  }
}

SweepConfig SweepConfig::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("config parse error: ") + e.what());
  }

  SweepConfig cfg;
  const auto get = [&doc](const char* key, auto& dst) {
    if (doc.contains(key)) dst = doc.at(key).template get<std::decay_t<decltype(dst)>>();
  };
  get("sigmas", cfg.sigmas);
  get("alphas", cfg.alphas);
  get("maturities", cfg.maturities);
  get("spot", cfg.spot);
  get("strike", cfg.strike);
  get("rate", cfg.rate);
  get("repetitions", cfg.repetitions);
  get("warmup", cfg.warmup);
  get("seed", cfg.seed);
  get("mc_paths", cfg.mc_paths);
  get("mc_steps_per_year", cfg.mc_steps_per_year);
  get("jobs", cfg.jobs);
  get("quad_abs_tol", cfg.quad.abs_tol);
  get("quad_rel_tol", cfg.quad.rel_tol);
  get("quad_max_subdivisions", cfg.quad.max_subdivisions);
  get("series_term_tol", cfg.series.term_tol);
  get("series_max_terms", cfg.series.max_terms);

  if (doc.contains("engines")) {
    cfg.engines.clear();
    for (const auto& name : doc.at("engines")) {
      const auto engine = engine_from_name(name.get<std::string>());
      if (!engine) throw DomainError("engines", "unknown engine name: " + name.get<std::string>());
      cfg.engines.push_back(*engine);
    }
  }
  if (doc.contains("exponent_mode")) {
    const std::string mode = doc.at("exponent_mode").get<std::string>();
    if (mode == "consistent") {
      cfg.exponent_mode = ExponentMode::transform_consistent;
    } else if (mode == "literal") {
      cfg.exponent_mode = ExponentMode::paper_literal;
    } else {
      throw DomainError("exponent_mode", "expected 'consistent' or 'literal'");
    }
  }
  cfg.validate();
  return cfg;
}

SweepConfig SweepConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

const EngineCell* BenchmarkRecord::cell(Engine engine) const {
  for (const auto& c : cells) {
    if (c.engine == engine && !c.failed) return &c;
  }
  return nullptr;
}

namespace {

BenchmarkRecord run_cell(const SweepConfig& config, double sigma, double alpha, double maturity) {
  BenchmarkRecord record;
  record.sigma = sigma;
  record.alpha = alpha;
  record.maturity = maturity;

  PricingRequest req;
  req.scenario = MarketScenario{config.spot, config.rate, sigma, alpha};
  req.contract = OptionContract{config.strike, maturity, PayoffKind::EuropeanCall};
  req.tau = maturity;

  EngineOptions opts;
  opts.semiclassical.quad = config.quad;
  opts.semiclassical.exponent_mode = config.exponent_mode;
  opts.series = config.series;
  opts.mc.paths = config.mc_paths;
  opts.mc.steps_per_year = config.mc_steps_per_year;
  opts.mc.seed = config.seed;
  opts.mc.jobs = 1;  // timing runs stay on this worker

  for (const Engine engine : config.engines) {
    EngineCell cell;
    cell.engine = engine;
    try {
      validate_request(req, engine);
      std::vector<std::int64_t> durations;
      durations.reserve(static_cast<std::size_t>(config.repetitions - config.warmup));
      PriceQuote quote;
      for (int rep = 0; rep < config.repetitions; ++rep) {
        const std::int64_t start = now_ns();
        quote = price_with_engine(req, engine, opts);
        const std::int64_t elapsed = now_ns() - start;
        if (rep >= config.warmup) durations.push_back(elapsed);
      }
      cell.price = quote.price;
      cell.diagnostics = quote.diagnostics;
      cell.median_ns = median_ns(std::move(durations));
    } catch (const std::exception& e) {
      cell.failed = true;
      cell.error = classify_error(e);
      cell.price = std::numeric_limits<double>::quiet_NaN();
    }
    record.cells.push_back(std::move(cell));
  }

  const EngineCell* sc = record.cell(Engine::semiclassical);
  const EngineCell* bench = record.cell(Engine::ncx2);
  if (sc && bench) {
    record.abs_err = std::abs(sc->price - bench->price);
    if (bench->price > 1e-12) record.rel_err = *record.abs_err / bench->price;
  }
  return record;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();

  struct Cell {
    double sigma, alpha, maturity;
  };
  std::vector<Cell> cells;
  for (const double sigma : config.sigmas) {
    for (const double alpha : config.alphas) {
      for (const double maturity : config.maturities) {
        cells.push_back({sigma, alpha, maturity});
      }
    }
  }

  SweepResult result;
  result.records.resize(cells.size());

  unsigned workers = config.jobs > 0 ? static_cast<unsigned>(config.jobs)
                                     : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(cells.size()));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) break;
      result.records[i] = run_cell(config, cells[i].sigma, cells[i].alpha, cells[i].maturity);
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
  return result;
}

std::string SweepResult::to_csv() const {
  std::ostringstream out;
  out << "sigma,alpha,maturity,engine,price,abs_err,rel_err,time_ns,diagnostics\n";
  for (const auto& record : records) {
    for (const auto& cell : record.cells) {
      out << format_double(record.sigma) << ',' << format_double(record.alpha) << ','
          << format_double(record.maturity) << ',' << engine_name(cell.engine) << ',';
      if (cell.failed) {
        out << "nan,,,," << "error=" << cell.error << '\n';
        continue;
      }
      out << format_double(cell.price) << ',';
      const bool carries_err = cell.engine == Engine::semiclassical && record.abs_err.has_value();
      if (carries_err) out << format_double(*record.abs_err);
      out << ',';
      if (carries_err && record.rel_err.has_value()) out << format_double(*record.rel_err);
      out << ',' << cell.median_ns << ',' << cell.diagnostics.to_csv_field() << '\n';
    }
  }
  return out.str();
}

std::string SweepResult::summary() const {
  std::map<double, double> max_rel_by_maturity;
  std::ostringstream ratios;
  for (const auto& record : records) {
    if (record.rel_err) {
      auto& slot = max_rel_by_maturity[record.maturity];
      slot = std::max(slot, *record.rel_err);
    }
    const EngineCell* sc = record.cell(Engine::semiclassical);
    const EngineCell* bench = record.cell(Engine::ncx2);
    if (sc && bench && sc->median_ns > 0) {
      ratios << "  sigma=" << record.sigma << " alpha=" << record.alpha
             << " T=" << record.maturity << ": time ncx2/semiclassical = "
             << static_cast<double>(bench->median_ns) / static_cast<double>(sc->median_ns)
             << '\n';
    }
  }

  std::ostringstream out;
  out << "max relative error vs ncx2 benchmark by maturity:\n";
  for (const auto& [maturity, rel] : max_rel_by_maturity) {
    out << "  T=" << maturity << ": " << rel << '\n';
  }
  if (max_rel_by_maturity.empty()) out << "  (no cells with both engines)\n";
  const std::string ratio_text = ratios.str();
  if (!ratio_text.empty()) out << "benchmark/semiclassical time ratios:\n" << ratio_text;
  return out.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::vector<SurfaceRow> error_surface_from_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw MissingColumn("sigma");
  if (!header.empty() && header.back() == '\r') header.pop_back();

  const std::vector<std::string> names = split_csv_line(header);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = i;
  for (const char* required : {"sigma", "alpha", "maturity", "engine", "abs_err", "rel_err"}) {
    if (!index.count(required)) throw MissingColumn(required);
  }

  std::vector<SurfaceRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() < names.size()) continue;
    if (fields[index["engine"]] != "semiclassical") continue;
    const std::string& abs_field = fields[index["abs_err"]];
    if (abs_field.empty()) continue;

    SurfaceRow row;
    row.sigma = std::stod(fields[index["sigma"]]);
    row.alpha = std::stod(fields[index["alpha"]]);
    row.maturity = std::stod(fields[index["maturity"]]);
    row.abs_err = std::stod(abs_field);
    const std::string& rel_field = fields[index["rel_err"]];
    if (!rel_field.empty()) row.rel_err = std::stod(rel_field);
    rows.push_back(row);
  }
  return rows;
}

std::string surface_to_csv(const std::vector<SurfaceRow>& rows) {
  std::ostringstream out;
  out << "sigma,alpha,maturity,abs_err,rel_err\n";
  for (const auto& row : rows) {
    out << format_double(row.sigma) << ',' << format_double(row.alpha) << ','
        << format_double(row.maturity) << ',';
    if (row.abs_err) out << format_double(*row.abs_err);
    out << ',';
    if (row.rel_err) out << format_double(*row.rel_err);
    out << '\n';
  }
  return out.str();
}

std::string surface_to_svg(const std::vector<SurfaceRow>& rows, double maturity) {
  std::vector<SurfaceRow> slice;
  std::set<double> sigma_set, alpha_set;
  double max_rel = 0.0;
  for (const auto& row : rows) {
    if (row.maturity != maturity || !row.rel_err) continue;
    slice.push_back(row);
    sigma_set.insert(row.sigma);
    alpha_set.insert(row.alpha);
    max_rel = std::max(max_rel, *row.rel_err);
  }

  const std::vector<double> sigmas(sigma_set.begin(), sigma_set.end());
  const std::vector<double> alphas(alpha_set.begin(), alpha_set.end());
  constexpr int cell = 36, margin = 70;
  const int width = margin + cell * static_cast<int>(alphas.size()) + 130;
  const int height = margin + cell * static_cast<int>(sigmas.size()) + 40;

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "' font-family='monospace' font-size='11'>\n";
  svg << "<text x='" << margin << "' y='20'>relative error vs benchmark, T=" << maturity
      << " (max " << max_rel << ")</text>\n";

  const auto find = [&](double sigma, double alpha) -> const SurfaceRow* {
    for (const auto& row : slice) {
      if (row.sigma == sigma && row.alpha == alpha) return &row;
    }
    return nullptr;
  };

  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    svg << "<text x='8' y='" << margin + cell * static_cast<int>(i) + 22
        << "'>s=" << sigmas[i] << "</text>\n";
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      const SurfaceRow* row = find(sigmas[i], alphas[j]);
      const double t = (row && max_rel > 0.0) ? *row->rel_err / max_rel : 0.0;
      const int red = static_cast<int>(255 * t);
      const int blue = static_cast<int>(255 * (1.0 - t));
      svg << "<rect x='" << margin + cell * static_cast<int>(j) << "' y='"
          << margin + cell * static_cast<int>(i) << "' width='" << cell - 2 << "' height='"
          << cell - 2 << "' fill='rgb(" << red << ",60," << blue << ")'>";
      if (row) svg << "<title>" << *row->rel_err << "</title>";
      svg << "</rect>\n";
    }
  }
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    svg << "<text x='" << margin + cell * static_cast<int>(j) << "' y='"
        << margin + cell * static_cast<int>(sigmas.size()) + 16 << "'>a=" << alphas[j]
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace cevsc
