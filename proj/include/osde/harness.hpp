#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "osde/design.hpp"
#include "osde/estimator.hpp"
#include "osde/superpop.hpp"

namespace osde {

// Monte Carlo study: m1 populations x m2 replicate samples per sample size,
// MISE of each method against the scaled true density on a shared grid.
struct StudyConfig {
  Superpopulation superpop = Superpopulation::standard_normal();
  std::string superpop_label = "superpop";
  DesignSpec design;  // n is overridden by each entry of sample_sizes
  std::string design_label = "design";
  long long N = 1000;
  std::vector<int> sample_sizes = {20, 40, 60, 80, 100};
  int m1 = 1;
  int m2 = 1;
  int grid_size = 1024;
  std::uint64_t master_seed = 1;
  std::vector<Method> methods = {Method::kTruncated, Method::kSmoothed,
                                 Method::kIidBaseline};
  int threads = 0;                 // 0 -> hardware concurrency
  bool validate_replicates = true; // count invariant violations per replicate
  bool capture_ise = false;        // keep per-replicate ISE values per cell
  std::function<void(int done, int total)> progress;  // called per finished task

  void validate() const;
};

struct CellResult {
  Method method = Method::kTruncated;
  int n = 0;
  double mise = 0.0;
  double se = 0.0;         // MC standard error of the MISE estimate
  double seconds = 0.0;    // aggregate wall time of this n's tasks
  long long replicates = 0;
};

struct StudyReport {
  std::vector<CellResult> cells;  // ordered by (n ascending, method order)
  long long total_replicates = 0;
  long long failed_replicates = 0;
  long long redraws = 0;
  long long violations_negative = 0;  // f_tilde < 0 on its grid
  long long violations_mass = 0;      // |integral - 1| > 1e-6
  long long violations_jcap = 0;      // J above floor(4 + 0.5 ln n)
  long long violations_weight = 0;    // weight outside [0, 1]
  std::uint64_t master_seed = 0;
  std::string config_hash;
  std::string config_echo;  // config_signature() of the study that ran
  std::string design_label;
  std::string superpop_label;
  std::vector<std::vector<double>> captured_ise;  // per cell, when requested

  // CSV with header design,superpop,method,n,mise,se,seconds. The seconds
  // column is wall-clock and is the only non-deterministic field; pass
  // include_seconds = false to get the byte-deterministic view.
  std::string to_csv(bool include_seconds = true) const;
  // Provenance sidecar (config echo, seed, hash, counters, cells).
  std::string to_json_string(bool include_seconds = true) const;
};

// Runs the study. Deterministic for a fixed seed: population i is drawn with
// seed (master, 1, i), replicate (i, j) with seed (master, 2, i, j), and
// accumulation folds tasks in a fixed order, so results are bit-identical for
// any thread count. Throws std::runtime_error if more than 0.1% of replicates
// fail.
StudyReport run_study(const StudyConfig& config);

// Budget rule used by run_study: failed replicates are tolerated only while
// they stay strictly below 0.1% of the attempted total.
bool failure_budget_exceeded(long long failed, long long attempted);

// Monte Carlo MISE of a batch of projected estimates against the true density
// sampled on the same grid. All estimates must share the grid size and
// scaling; throws std::invalid_argument otherwise.
double mise_mc(std::span<const ValidDensity> estimates,
               std::span<const double> truth_on_grid);

// Canonical config signature and its FNV-1a 64 hash (hex).
std::string config_signature(const StudyConfig& config);
std::string config_hash(const StudyConfig& config);

}  // namespace osde
