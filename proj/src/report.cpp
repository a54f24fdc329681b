#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rome/bench.hpp"

namespace rome::bench {

namespace {

using nlohmann::json;

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string join(std::span<const std::size_t> v, std::string_view sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

// RFC 4180: quote fields holding a comma, quote or line break; double inner quotes.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string to_csv(const BenchReport& r) {
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const auto& row : r.rows) {
    os << csv_field(std::string(to_string(row.impl))) << ',' << csv_field(std::string(rome::to_string(row.mode)))
       << ',' << csv_field(join(row.dims, ",")) << ',' << row.shape[0] << ',' << row.shape[1] << ','
       << row.shape[2] << ',' << row.shape[3] << ',' << to_string(row.precision) << ',' << row.iters << ','
       << fmt(row.mean_ms) << ',' << fmt(row.median_ms) << ',' << fmt(row.stddev_ms) << ','
       << fmt(row.speedup_times, 4) << ',' << fmt(row.speedup_pct, 4) << "\n";
  }
  return os.str();
}

std::string to_markdown(const BenchReport& r) {
  std::ostringstream os;
  os << "| Impl | Mode | Dimension | [B,N,S,D] | Mean (ms) | Median (ms) | Stddev (ms) | Speedup (x) | Speedup (%) |\n"
     << "|---|---|---|---|---:|---:|---:|---:|---:|\n";
  for (const auto& row : r.rows) {
    os << "| " << to_string(row.impl) << " | " << rome::to_string(row.mode) << " | "
       << row.dims.size() << "D (dim=" << join(row.dims, "+") << ") | [" << join(row.shape, ",") << "] | "
       << fmt(row.mean_ms, 3) << " | " << fmt(row.median_ms, 3) << " | " << fmt(row.stddev_ms, 3) << " | "
       << fmt(row.speedup_times, 2) << "x | " << fmt(100.0 * row.speedup_pct, 1) << "% |\n";
  }
  os << "\nhost " << r.env.host << ", " << to_string(r.env.precision) << ", fma " << (r.env.hardware_fma ? "on" : "off")
     << ", " << r.env.timestamp << "\n";
  return os.str();
}

json to_json(const BenchReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"impl", to_string(row.impl)},
                    {"mode", rome::to_string(row.mode)},
                    {"dims", row.dims},
                    {"shape", row.shape},
                    {"precision", to_string(row.precision)},
                    {"iters", row.iters},
                    {"mean_ms", row.mean_ms},
                    {"median_ms", row.median_ms},
                    {"stddev_ms", row.stddev_ms},
                    {"speedup_times", row.speedup_times},
                    {"speedup_pct", row.speedup_pct}});
  }
  return {{"env",
           {{"host", r.env.host},
            {"precision", to_string(r.env.precision)},
            {"build_flags", r.env.build_flags},
            {"timestamp", r.env.timestamp},
            {"hardware_fma", r.env.hardware_fma},
            {"inner_repeats", r.env.inner_repeats}}},
          {"rows", std::move(rows)}};
}

}  // namespace

std::string format_report(const BenchReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::csv: return to_csv(report);
    case ReportFormat::md: return to_markdown(report);
    case ReportFormat::json: return to_json(report).dump(2) + "\n";
  }
  return {};
}

void write_report(const BenchReport& report, ReportFormat format, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ReportIOError("cannot open '" + path + "' for writing");
  f << format_report(report, format);
  f.flush();
  if (!f) throw ReportIOError("failed writing report to '" + path + "'");
}

BenchReport parse_report_json(std::string_view text) {
  BenchReport r;
  try {
    const json j = json::parse(text);
    const auto& env = j.at("env");
    r.env.host = env.at("host").get<std::string>();
    r.env.precision = parse_precision(env.at("precision").get<std::string>());
    r.env.build_flags = env.at("build_flags").get<std::string>();
    r.env.timestamp = env.at("timestamp").get<std::string>();
    r.env.hardware_fma = env.at("hardware_fma").get<bool>();
    r.env.inner_repeats = env.at("inner_repeats").get<std::size_t>();
    for (const auto& jr : j.at("rows")) {
      BenchRow row;
      row.impl = parse_impl(jr.at("impl").get<std::string>());
      row.mode = parse_pairing_mode(jr.at("mode").get<std::string>());
      row.dims = jr.at("dims").get<std::vector<std::size_t>>();
      row.shape = jr.at("shape").get<std::array<std::size_t, 4>>();
      row.precision = parse_precision(jr.at("precision").get<std::string>());
      row.iters = jr.at("iters").get<std::size_t>();
      row.mean_ms = jr.at("mean_ms").get<double>();
      row.median_ms = jr.at("median_ms").get<double>();
      row.stddev_ms = jr.at("stddev_ms").get<double>();
      row.speedup_times = jr.at("speedup_times").get<double>();
      row.speedup_pct = jr.at("speedup_pct").get<double>();
      r.rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw ReportIOError(std::string("malformed report json: ") + e.what());
  } catch (const std::exception& e) {
    throw ReportIOError(std::string("malformed report json: ") + e.what());
  }
  return r;
}

}  // namespace rome::bench
