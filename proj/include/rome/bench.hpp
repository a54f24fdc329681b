#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rome/pipeline.hpp"
#include "rome/tensor.hpp"

namespace rome::bench {

enum class Impl { reference, reference_nd, rome_gather, rome_matmul, rome_fused, rome_pipelined, dense_oracle };
enum class Precision { fp32, fp64 };
enum class ReportFormat { csv, md, json };

std::string_view to_string(Impl impl);
std::string_view to_string(Precision p);
std::string_view to_string(ReportFormat f);
Impl parse_impl(std::string_view text);
Precision parse_precision(std::string_view text);
ReportFormat parse_format(std::string_view text);

/// Bad flags or inconsistent shape/mode/dims. CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An implementation disagreed with the dense oracle. CLI exit code 2.
class EquivalenceError : public std::runtime_error {
 public:
  EquivalenceError(Impl impl, double max_abs_diff, std::size_t first_index, double tolerance);
  Impl impl;
  double max_abs_diff;
  std::size_t first_index;
  double tolerance;
};

/// Report could not be written or read back. CLI exit code 3.
class ReportIOError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BenchConfig {
  std::array<std::size_t, 4> shape{1, 8, 4096, 128};  // B, N, S, D
  PairingMode mode = PairingMode::interleave;
  std::vector<std::size_t> dims{128};
  std::vector<Impl> impls;  // empty -> every arm that applies to dims
  std::size_t iters = 50;
  std::size_t warmup = 5;
  std::uint64_t seed = 42;
  bool check = true;
  Precision precision = Precision::fp32;
  bool include_setup = false;
  double base = 10000.0;
  std::size_t tile_rows = 128;
  std::size_t queue_depth = 4;
  /// Perturbs one output element of this arm before the equivalence check.
  /// Exists so the fail-closed path can be exercised end to end.
  std::optional<Impl> inject_fault;

  /// Throws ConfigError with a one-line actionable message.
  void validate() const;
  /// reference-nd for multi-axis dims, reference otherwise.
  Impl baseline() const;
  /// Baseline first, then the requested (or default) arms without duplicates.
  std::vector<Impl> resolved_impls() const;
};

/// Desk-scale config with the paper-scale operator shape [1,24,28800,128]
/// and 3D dims 44,44,40.
BenchConfig paper_preset();

struct BenchRow {
  Impl impl = Impl::reference;
  PairingMode mode = PairingMode::interleave;
  std::vector<std::size_t> dims;
  std::array<std::size_t, 4> shape{};
  Precision precision = Precision::fp32;
  std::size_t iters = 0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double stddev_ms = 0.0;
  double speedup_times = 0.0;
  double speedup_pct = 0.0;

  bool operator==(const BenchRow&) const = default;
};

struct BenchEnv {
  std::string host;
  Precision precision = Precision::fp32;
  std::string build_flags;
  std::string timestamp;
  bool hardware_fma = false;
  std::size_t inner_repeats = 1;

  bool operator==(const BenchEnv&) const = default;
};

struct BenchReport {
  BenchEnv env;
  std::vector<BenchRow> rows;

  bool operator==(const BenchReport&) const = default;
};

/// t0 / t
double speedup_times(double baseline_ms, double impl_ms);
/// (t0 - t) / t0
double speedup_pct(double baseline_ms, double impl_ms);
/// Fills speedup columns of every row from the baseline row's mean.
void apply_speedups(BenchReport& report, Impl baseline);

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;
};
Summary summarize(std::vector<double> samples);

/// Equivalence check (when cfg.check), then warmup + timed iterations per arm.
BenchReport run_bench(const BenchConfig& cfg);

/// Factors S into `axes` near-equal extents whose product is S, largest first.
std::vector<std::size_t> grid_extents(std::size_t seq_len, std::size_t axes);
/// Position grid for S rows over `axes` axes (flattened first-axis-major).
std::vector<std::vector<double>> position_grid(std::size_t seq_len, std::size_t axes);

inline constexpr std::string_view kCsvHeader =
    "impl,mode,dims,B,N,S,D,precision,iters,mean_ms,median_ms,stddev_ms,speedup_times,speedup_pct";

std::string format_report(const BenchReport& report, ReportFormat format);
/// Writes format_report() to `path`; throws ReportIOError.
void write_report(const BenchReport& report, ReportFormat format, const std::string& path);
/// Parses the json produced by format_report(…, json).
BenchReport parse_report_json(std::string_view text);

struct CliOptions {
  BenchConfig bench;
  ReportFormat format = ReportFormat::csv;
  std::string out;  // empty -> stdout
  bool help = false;
  std::string help_text;
};

/// Parses command-line flags (and an optional --config file). Throws
/// ConfigError for unknown flags, bad values, or inconsistent settings.
CliOptions parse_config(const std::vector<std::string>& args);

}  // namespace rome::bench
