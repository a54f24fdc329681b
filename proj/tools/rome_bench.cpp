// Command-line front end for the RoPE/RoME benchmark harness.
//
// Exit codes: 0 success, 1 config error, 2 equivalence failure, 3 I/O error.

#include <iostream>
#include <string>
#include <vector>

#include "rome/bench.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kEquivalenceError = 2;
constexpr int kIOError = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace rome::bench;
  std::vector<std::string> args(argv + 1, argv + argc);

  CliOptions opts;
  try {
    opts = parse_config(args);
  } catch (const ConfigError& e) {
    std::cerr << "rome_bench: " << e.what() << "\n";
    return kConfigError;
  }
  if (opts.help) {
    std::cout << opts.help_text;
    return 0;
  }

  BenchReport report;
  try {
    report = run_bench(opts.bench);
  } catch (const EquivalenceError& e) {
    std::cerr << "rome_bench: " << e.what() << "\n";
    return kEquivalenceError;
  } catch (const ConfigError& e) {
    std::cerr << "rome_bench: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (opts.out.empty()) {
      std::cout << format_report(report, opts.format);
      std::cout.flush();
      if (!std::cout) throw ReportIOError("failed writing report to stdout");
    } else {
      write_report(report, opts.format, opts.out);
      std::cerr << "rome_bench: wrote " << to_string(opts.format) << " report to " << opts.out << "\n";
    }
  } catch (const ReportIOError& e) {
    std::cerr << "rome_bench: " << e.what() << "\n";
    return kIOError;
  }
  return 0;
}
