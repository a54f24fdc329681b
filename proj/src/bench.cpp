#include "rome/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include <unistd.h>

#include "CLI11.hpp"
#include "rome/dense_oracle.hpp"
#include "rome/fused.hpp"
#include "rome/rope_reference.hpp"

#ifndef ROME_BUILD_FLAGS
#define ROME_BUILD_FLAGS "unknown"
#endif

namespace rome::bench {

std::string_view to_string(Impl impl) {
  switch (impl) {
    case Impl::reference: return "reference";
    case Impl::reference_nd: return "reference-nd";
    case Impl::rome_gather: return "rome-gather";
    case Impl::rome_matmul: return "rome-matmul";
    case Impl::rome_fused: return "rome-fused";
    case Impl::rome_pipelined: return "rome-pipelined";
    case Impl::dense_oracle: return "dense-oracle";
  }
  return "unknown";
}

std::string_view to_string(Precision p) { return p == Precision::fp32 ? "fp32" : "fp64"; }

std::string_view to_string(ReportFormat f) {
  switch (f) {
    case ReportFormat::csv: return "csv";
    case ReportFormat::md: return "md";
    case ReportFormat::json: return "json";
  }
  return "unknown";
}

Impl parse_impl(std::string_view text) {
  for (Impl i : {Impl::reference, Impl::reference_nd, Impl::rome_gather, Impl::rome_matmul, Impl::rome_fused,
                 Impl::rome_pipelined, Impl::dense_oracle}) {
    if (to_string(i) == text) return i;
  }
  throw ConfigError("unknown implementation '" + std::string(text) +
                    "' (expected reference, reference-nd, rome-gather, rome-matmul, rome-fused, rome-pipelined, "
                    "dense-oracle)");
}

Precision parse_precision(std::string_view text) {
  if (text == "32" || text == "fp32" || text == "float") return Precision::fp32;
  if (text == "64" || text == "fp64" || text == "double") return Precision::fp64;
  throw ConfigError("unknown precision '" + std::string(text) + "' (expected 32 or 64)");
}

ReportFormat parse_format(std::string_view text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "md" || text == "markdown") return ReportFormat::md;
  if (text == "json") return ReportFormat::json;
  throw ConfigError("unknown report format '" + std::string(text) + "' (expected csv, md or json)");
}

EquivalenceError::EquivalenceError(Impl i, double diff, std::size_t index, double tol)
    : std::runtime_error("equivalence check failed for " + std::string(to_string(i)) + ": max |delta| = " +
                         [&] {
                           std::ostringstream os;
                           os.precision(3);
                           os << std::scientific << diff << " exceeds " << tol;
                           return os.str();
                         }() +
                         ", first failing element at flat index " + std::to_string(index)),
      impl(i),
      max_abs_diff(diff),
      first_index(index),
      tolerance(tol) {}

namespace {

std::string join_dims(std::span<const std::size_t> dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? "," : "") + std::to_string(dims[i]);
  return s;
}

}  // namespace

void BenchConfig::validate() const {
  for (std::size_t e : shape) {
    if (e == 0) throw ConfigError("--shape entries must be positive");
  }
  if (iters < 1) throw ConfigError("--iters must be at least 1");
  if (tile_rows < 1) throw ConfigError("--tile-rows must be at least 1");
  if (queue_depth < 1) throw ConfigError("--queue-depth must be at least 1");
  if (!(base > 0.0)) throw ConfigError("--base must be positive");
  try {
    validate_dims(mode, dims, shape[3]);
  } catch (const DimensionError& e) {
    throw ConfigError("--dims " + join_dims(dims) + " with --mode " + std::string(rome::to_string(mode)) +
                      " and D=" + std::to_string(shape[3]) + ": " + e.what());
  }
  for (Impl i : impls) {
    if (i == Impl::reference && dims.size() != 1) {
      throw ConfigError("reference applies one block; use reference-nd with --dims " + join_dims(dims));
    }
  }
}

Impl BenchConfig::baseline() const { return dims.size() > 1 ? Impl::reference_nd : Impl::reference; }

std::vector<Impl> BenchConfig::resolved_impls() const {
  std::vector<Impl> wanted = impls;
  if (wanted.empty()) {
    wanted = {Impl::rome_gather, Impl::rome_matmul, Impl::rome_fused, Impl::rome_pipelined, Impl::dense_oracle};
  }
  std::vector<Impl> out{baseline()};
  for (Impl i : wanted) {
    if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
  }
  return out;
}

BenchConfig paper_preset() {
  BenchConfig cfg;
  cfg.shape = {1, 24, 28800, 128};
  cfg.dims = {44, 44, 40};
  return cfg;
}

double speedup_times(double baseline_ms, double impl_ms) { return baseline_ms / impl_ms; }
double speedup_pct(double baseline_ms, double impl_ms) { return (baseline_ms - impl_ms) / baseline_ms; }

void apply_speedups(BenchReport& report, Impl baseline) {
  const auto it = std::find_if(report.rows.begin(), report.rows.end(), [&](const BenchRow& r) { return r.impl == baseline; });
  if (it == report.rows.end()) throw std::logic_error("report has no baseline row");
  const double t0 = it->mean_ms;
  for (auto& row : report.rows) {
    row.speedup_times = speedup_times(t0, row.mean_ms);
    row.speedup_pct = speedup_pct(t0, row.mean_ms);
  }
}

Summary summarize(std::vector<double> samples) {
  Summary s;
  if (samples.empty()) return s;
  const double n = static_cast<double>(samples.size());
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : samples) ss += (v - s.mean) * (v - s.mean);
  s.stddev = samples.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  std::sort(samples.begin(), samples.end());
  const std::size_t m = samples.size() / 2;
  s.median = samples.size() % 2 ? samples[m] : 0.5 * (samples[m - 1] + samples[m]);
  return s;
}

std::vector<std::size_t> grid_extents(std::size_t seq_len, std::size_t axes) {
  if (axes == 0) throw std::invalid_argument("grid needs at least one axis");
  std::vector<std::size_t> out;
  std::size_t remaining = seq_len;
  for (std::size_t left = axes; left > 1; --left) {
    const double target = std::pow(static_cast<double>(remaining), 1.0 / static_cast<double>(left));
    std::size_t best = 1;
    for (std::size_t f = 1; f <= remaining; ++f) {
      if (remaining % f != 0) continue;
      if (std::abs(static_cast<double>(f) - target) < std::abs(static_cast<double>(best) - target)) best = f;
      if (static_cast<double>(f) > 2 * target) break;
    }
    out.push_back(best);
    remaining /= best;
  }
  out.push_back(remaining);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<std::vector<double>> position_grid(std::size_t seq_len, std::size_t axes) {
  const auto ext = grid_extents(seq_len, axes);
  std::vector<std::vector<double>> grid(axes, std::vector<double>(seq_len));
  for (std::size_t s = 0; s < seq_len; ++s) {
    std::size_t rest = s;
    for (std::size_t a = axes; a-- > 0;) {
      grid[a][s] = static_cast<double>(rest % ext[a]);
      rest /= ext[a];
    }
  }
  return grid;
}

namespace {

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string host_name() {
  char buf[256] = {};
  if (gethostname(buf, sizeof buf - 1) != 0) return "unknown";
  return buf;
}

// Everything an arm needs, built once outside the timed region.
template <typename T>
struct Workload {
  const BenchConfig& cfg;
  Tensor<T> x;
  std::vector<std::vector<double>> grid;
  FreqSpec spec;
  AngleTable<T> table;
  std::vector<AngleTable<T>> axis_tables;
  StructuredMap map;
  ExtensionMaps ext;
  DenseMatrix<T> dense_m;
  DenseMatrix<T> dense_m1;
  DenseMatrix<T> dense_m2;
  Tensor<T> out;
  Tensor<T> result;  // value-returning arms
  Tensor<double> oracle_out;

  explicit Workload(const BenchConfig& c) : cfg(c) {
    const auto [b, n, s, d] = cfg.shape;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<T> data(b * n * s * d);
    for (auto& v : data) v = static_cast<T>(dist(rng));
    x = Tensor<T>({b, n, s, d}, std::move(data));
    grid = position_grid(s, cfg.dims.size());
    spec = FreqSpec{cfg.base, cfg.dims};
    build_tables();
    build_maps();
  }

  bool extension() const { return cfg.mode == PairingMode::interleave_half; }

  void build_tables() {
    table = make_angle_table_nd<T>(grid, spec, cfg.mode);
    axis_tables.clear();
    for (std::size_t a = 0; a < cfg.dims.size(); ++a) {
      axis_tables.push_back(make_angle_table<T>(grid[a], cfg.dims[a], cfg.mode, cfg.base));
    }
  }

  void build_maps() {
    if (extension()) {
      ext = build_extension_maps(cfg.dims);
      dense_m1 = densify<T>(ext.m1);
      dense_m2 = densify<T>(ext.m2);
    } else {
      map = build_m(cfg.mode, cfg.dims);
      dense_m = densify<T>(map);
    }
  }

  PipelineConfig pipeline() const {
    PipelineConfig p;
    p.tile_rows = cfg.tile_rows;
    p.queue_depth = cfg.queue_depth;
    return p;
  }

  // Runs one arm; the result is left in `out`, `result` or `oracle_out`.
  void run(Impl impl) {
    switch (impl) {
      case Impl::reference: result = rope_reference(x, axis_tables.front(), cfg.mode); break;
      case Impl::reference_nd:
        result = rope_reference_nd<T>(x, axis_tables, cfg.dims, cfg.mode);
        break;
      case Impl::rome_gather:
        if (extension()) {
          rome_ext_forward(x, table, ext, ExtForm::unified, ApplyPath::gather, out);
        } else {
          rome_forward(x, table, map, ApplyPath::gather, out);
        }
        break;
      case Impl::rome_matmul:
        if (extension()) {
          rome_ext_forward_matmul(x, table, ext, dense_m1, dense_m2, out);
        } else {
          rome_forward_matmul(x, table, map, dense_m, out);
        }
        break;
      case Impl::rome_fused:
        if (extension()) {
          rome_ext_forward_fused(x, table, ext, out);
        } else {
          rome_forward_fused(x, table, map, out);
        }
        break;
      case Impl::rome_pipelined:
        if (extension()) {
          pipelined_rome_ext(x, table, ext, pipeline(), out);
        } else {
          pipelined_rome(x, table, map, pipeline(), out);
        }
        break;
      case Impl::dense_oracle: oracle_out = oracle_forward(x, table.theta, cfg.mode, cfg.dims); break;
    }
  }

  void run_with_setup(Impl impl) {
    switch (impl) {
      case Impl::reference:
      case Impl::reference_nd:
        axis_tables.clear();
        for (std::size_t a = 0; a < cfg.dims.size(); ++a) {
          axis_tables.push_back(make_angle_table<T>(grid[a], cfg.dims[a], cfg.mode, cfg.base));
        }
        break;
      case Impl::dense_oracle: table = make_angle_table_nd<T>(grid, spec, cfg.mode); break;
      default:
        table = make_angle_table_nd<T>(grid, spec, cfg.mode);
        build_maps();
        break;
    }
    run(impl);
  }

  // Flattened output of the last run of `impl`, widened to double.
  std::vector<double> output(Impl impl) const {
    std::vector<double> v;
    if (impl == Impl::dense_oracle) {
      v.assign(oracle_out.data().begin(), oracle_out.data().end());
    } else {
      const auto& t = (impl == Impl::reference || impl == Impl::reference_nd) ? result : out;
      v.reserve(t.size());
      for (T e : t.data()) v.push_back(static_cast<double>(e));
    }
    return v;
  }

  double sink(Impl impl) const {
    if (impl == Impl::dense_oracle) return oracle_out[0];
    const auto& t = (impl == Impl::reference || impl == Impl::reference_nd) ? result : out;
    return static_cast<double>(t[0]);
  }
};

template <typename T>
void check_equivalence(Workload<T>& w, const std::vector<Impl>& impls) {
  const double tol = std::is_same_v<T, float> ? 1e-5 : 1e-12;
  const auto truth = oracle_forward(w.x, w.table.theta, w.cfg.mode, w.cfg.dims);
  for (Impl impl : impls) {
    w.run(impl);
    auto got = w.output(impl);
    if (w.cfg.inject_fault && *w.cfg.inject_fault == impl) got[got.size() / 2] += 1.0;
    double worst = 0.0;
    std::optional<std::size_t> first;
    for (std::size_t i = 0; i < got.size(); ++i) {
      const double diff = std::abs(got[i] - truth[i]);
      if (!(diff <= tol) && !first) first = i;
      if (!(diff <= worst)) worst = diff;
    }
    if (first) throw EquivalenceError(impl, worst, *first, tol);
  }
}

template <typename T>
BenchReport run_typed(const BenchConfig& cfg) {
  using clock = std::chrono::steady_clock;
  Workload<T> w(cfg);
  const auto impls = cfg.resolved_impls();
  if (cfg.check) check_equivalence(w, impls);

  BenchReport report;
  report.env.host = host_name();
  report.env.precision = cfg.precision;
  report.env.build_flags = ROME_BUILD_FLAGS;
  report.env.timestamp = iso_timestamp();
  report.env.hardware_fma = has_hardware_fma();

  volatile double sink = 0.0;
  for (Impl impl : impls) {
    auto once = [&] {
      if (cfg.include_setup) {
        w.run_with_setup(impl);
      } else {
        w.run(impl);
      }
      sink = sink + w.sink(impl);
    };
    for (std::size_t i = 0; i < cfg.warmup; ++i) once();

    // repeat fast arms inside one sample so each sample spans >= 1 ms
    const auto probe_start = clock::now();
    once();
    const double probe_ms = std::chrono::duration<double, std::milli>(clock::now() - probe_start).count();
    std::size_t repeats = 1;
    if (probe_ms < 1.0) repeats = static_cast<std::size_t>(std::ceil(1.0 / std::max(probe_ms, 1e-4)));
    report.env.inner_repeats = std::max(report.env.inner_repeats, repeats);

    std::vector<double> samples;
    samples.reserve(cfg.iters);
    for (std::size_t i = 0; i < cfg.iters; ++i) {
      const auto start = clock::now();
      for (std::size_t k = 0; k < repeats; ++k) once();
      samples.push_back(std::chrono::duration<double, std::milli>(clock::now() - start).count() /
                        static_cast<double>(repeats));
    }
    const auto stats = summarize(std::move(samples));
    BenchRow row;
    row.impl = impl;
    row.mode = cfg.mode;
    row.dims = cfg.dims;
    row.shape = cfg.shape;
    row.precision = cfg.precision;
    row.iters = cfg.iters;
    row.mean_ms = stats.mean;
    row.median_ms = stats.median;
    row.stddev_ms = stats.stddev;
    report.rows.push_back(std::move(row));
  }
  apply_speedups(report, cfg.baseline());
  return report;
}

}  // namespace

BenchReport run_bench(const BenchConfig& cfg) {
  cfg.validate();
  return cfg.precision == Precision::fp32 ? run_typed<float>(cfg) : run_typed<double>(cfg);
}

// ---------------------------------------------------------------------------
// command line

namespace {

std::vector<std::size_t> parse_size_list(const std::string& flag, const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != item.size() || v == 0 || item.front() == '-') {
      throw ConfigError(flag + ": '" + item + "' is not a positive integer");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ConfigError(flag + " needs a comma-separated list of positive integers");
  return out;
}

}  // namespace

CliOptions parse_config(const std::vector<std::string>& args) {
  CLI::App app{"RoPE / RoME kernel benchmark", "rome_bench"};
  app.set_config("--config", "", "Read flags from a TOML/INI file");

  std::string shape, mode, dims, impls, precision, preset, report = "csv", inject;
  std::size_t iters = 0, warmup = 0, tile_rows = 0, queue_depth = 0;
  std::uint64_t seed = 0;
  double base = 0.0;
  bool check = true, include_setup = false;
  CliOptions opts;

  auto* o_shape = app.add_option("--shape", shape, "B,N,S,D (default 1,8,4096,128)");
  auto* o_mode = app.add_option("--mode", mode, "half | interleave | interleave-half | quarter");
  auto* o_dims = app.add_option("--dims", dims, "Per-axis sub-dimensions, e.g. 44,44,40 (default D)");
  auto* o_impls = app.add_option("--impls", impls, "Comma list of arms to time");
  auto* o_iters = app.add_option("--iters", iters, "Measured iterations (default 50)");
  auto* o_warmup = app.add_option("--warmup", warmup, "Discarded iterations (default 5)");
  auto* o_seed = app.add_option("--seed", seed, "Input RNG seed (default 42)");
  auto* o_precision = app.add_option("--precision", precision, "32 or 64 (default 32)");
  auto* o_base = app.add_option("--base", base, "Frequency base (default 10000)");
  app.add_flag("--check,!--no-check", check, "Verify every arm against the dense oracle before timing");
  app.add_flag("--include-setup", include_setup, "Time angle-table and map construction too");
  app.add_option("--preset", preset, "Named configuration: paper")->check(CLI::IsMember({"paper"}));
  app.add_option("--report", report, "csv | md | json")->check(CLI::IsMember({"csv", "md", "markdown", "json"}));
  app.add_option("--out", opts.out, "Report path (default stdout)");
  auto* o_tile = app.add_option("--tile-rows", tile_rows, "Pipeline tile height in rows (default 128)");
  auto* o_depth = app.add_option("--queue-depth", queue_depth, "Pipeline queue depth (default 4)");
  app.add_option("--inject-fault", inject, "Testing aid: corrupt one arm's output before the check")
      ->group("");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    opts.help = true;
    opts.help_text = app.help();
    return opts;
  } catch (const CLI::ParseError& e) {
    std::string what = e.what();
    if (what.empty()) what = e.get_name();
    throw ConfigError(what);
  }

  BenchConfig cfg = preset == "paper" ? paper_preset() : BenchConfig{};
  if (o_shape->count() > 0) {
    const auto s = parse_size_list("--shape", shape);
    if (s.size() != 4) throw ConfigError("--shape needs exactly four values B,N,S,D, got '" + shape + "'");
    cfg.shape = {s[0], s[1], s[2], s[3]};
    if (o_dims->count() == 0) cfg.dims = {s[3]};
  }
  if (o_dims->count() > 0) cfg.dims = parse_size_list("--dims", dims);
  try {
    if (o_mode->count() > 0) cfg.mode = parse_pairing_mode(mode);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--mode: ") + e.what());
  }
  if (o_impls->count() > 0) {
    cfg.impls.clear();
    std::stringstream ss(impls);
    std::string item;
    while (std::getline(ss, item, ',')) cfg.impls.push_back(parse_impl(item));
  }
  if (o_iters->count() > 0) cfg.iters = iters;
  if (o_warmup->count() > 0) cfg.warmup = warmup;
  if (o_seed->count() > 0) cfg.seed = seed;
  if (o_precision->count() > 0) cfg.precision = parse_precision(precision);
  if (o_base->count() > 0) cfg.base = base;
  if (o_tile->count() > 0) cfg.tile_rows = tile_rows;
  if (o_depth->count() > 0) cfg.queue_depth = queue_depth;
  if (!inject.empty()) cfg.inject_fault = parse_impl(inject);
  cfg.check = check;
  cfg.include_setup = include_setup;
  cfg.validate();

  opts.bench = std::move(cfg);
  opts.format = parse_format(report);
  return opts;
}

}  // namespace rome::bench
