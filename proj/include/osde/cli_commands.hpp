#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "osde/harness.hpp"

namespace osde {

// Implementation of the CLI subcommands, shared by the binary and the tests.
// Each returns a process exit code (0 on success) and reports errors on `err`.

struct EstimateOptions {
  std::string input_csv;
  std::string pop_size = "sum-weights";  // integer or "sum-weights"
  std::string delta = "auto";            // real or "auto" (= -1/n)
  std::string method = "truncated";      // truncated | smoothed | iid-baseline
  double margin = 0.01;                  // scaling margin, fitted on the sample
  int grid = 1024;
  std::string out_coeffs;                // required
  std::string out_density;               // optional grid CSV (u,density,se_design)
};
int cmd_estimate(const EstimateOptions& opts, std::ostream& err);

struct EvalOptions {
  std::string coeffs_path;
  std::vector<double> at;   // points to evaluate; printed as CSV rows on `out`
  int grid = 1024;          // projection grid (also the --out grid)
  std::string out_density;  // optional grid CSV, same format as cmd_estimate
};
int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err);

struct BenchmarkOptions {
  std::string config_path;
  std::string out_csv;
  std::string out_json;
  int threads = -1;                   // -1 -> use the config's value
  std::optional<std::uint64_t> seed;  // overrides the config's seed
  bool quiet = false;                 // suppress progress on stderr
};
int cmd_benchmark(const BenchmarkOptions& opts, std::ostream& err);

struct TheoryOptions {
  int k = 1;
  double Q = 1.0;
  double b = 2.0;
  double c = 1.0;
  long long N = 1000;
};
int cmd_theory(const TheoryOptions& opts, std::ostream& out, std::ostream& err);

// Study config JSON -> StudyConfig (schema documented in the README).
StudyConfig parse_study_config(const std::string& json_text);
StudyConfig load_study_config(const std::string& path);

// Shared grid CSV writer: header u,density,se_design and one row per grid
// point, doubles in shortest round-trip form.
std::string density_grid_csv(const ValidDensity& density);

}  // namespace osde
