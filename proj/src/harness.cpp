#include "osde/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "osde/grid.hpp"
#include "osde/seeds.hpp"

namespace osde {

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string pi_rule_name(PiRule rule) {
  return rule == PiRule::kUniform ? "uniform" : "log-size";
}

}  // namespace

void StudyConfig::validate() const {
  if (N < 1) throw std::invalid_argument("study: N must be >= 1");
  if (sample_sizes.empty())
    throw std::invalid_argument("study: no sample sizes");
  for (int n : sample_sizes)
    if (n < 1 || n > N)
      throw std::invalid_argument("study: sample size outside [1, N]");
  if (m1 < 1 || m2 < 1)
    throw std::invalid_argument("study: m1 and m2 must be >= 1");
  if (grid_size < 256)
    throw std::invalid_argument("study: grid must have >= 256 points");
  if (methods.empty()) throw std::invalid_argument("study: no methods");
  for (Method m : methods)
    if (m == Method::kOracle)
      throw std::invalid_argument(
          "study: the oracle needs caller-chosen weights and cannot be run "
          "from a config");
  if (threads < 0) throw std::invalid_argument("study: negative thread count");
}

bool failure_budget_exceeded(long long failed, long long attempted) {
  return failed > 0 && failed * 1000 >= attempted;
}

double mise_mc(std::span<const ValidDensity> estimates,
               std::span<const double> truth_on_grid) {
  if (estimates.empty())
    throw std::invalid_argument("mise_mc: no estimates");
  const int G = estimates.front().grid_size;
  const ScalingTransform ref = estimates.front().base.scaling;
  if (static_cast<size_t>(G) != truth_on_grid.size())
    throw std::invalid_argument("mise_mc: truth grid size mismatch");
  for (const auto& vd : estimates) {
    if (vd.grid_size != G)
      throw std::invalid_argument("mise_mc: estimates on different grids");
    if (vd.base.scaling.a != ref.a || vd.base.scaling.b != ref.b)
      throw std::invalid_argument("mise_mc: estimates on different scalings");
  }

  std::vector<double> sq(static_cast<size_t>(G));
  long double acc = 0.0L;
  for (const auto& vd : estimates) {
    for (size_t g = 0; g < sq.size(); ++g) {
      const double d = vd.values[g] - truth_on_grid[g];
      sq[g] = d * d;
    }
    acc += trapezoid_unit(sq);
  }
  return static_cast<double>(acc / static_cast<long double>(estimates.size()));
}

std::string config_signature(const StudyConfig& config) {
  nlohmann::json j;
  j["N"] = config.N;
  j["design"]["kind"] = design_kind_name(config.design.kind);
  switch (config.design.kind) {
    case DesignKind::kPoisson:
      j["design"]["rule"] = pi_rule_name(config.design.rule);
      break;
    case DesignKind::kSystematicPps:
      j["design"]["rule"] = pi_rule_name(config.design.rule);
      if (config.design.delta_override)
        j["design"]["delta_override"] = *config.design.delta_override;
      break;
    case DesignKind::kStratifiedProportional:
      j["design"]["stratum_bounds"] = config.design.stratum_bounds;
      break;
    case DesignKind::kStratifiedOversample:
      j["design"]["stratum_sizes"] = config.design.stratum_sizes;
      j["design"]["stratum_take"] = config.design.stratum_take;
      break;
    case DesignKind::kSrswor:
      break;
  }
  j["design_label"] = config.design_label;
  j["superpop_label"] = config.superpop_label;
  auto comps = nlohmann::json::array();
  for (const auto& c : config.superpop.components())
    comps.push_back(
        {{"mean", c.mean}, {"variance", c.variance}, {"weight", c.weight}});
  j["superpop"] = std::move(comps);
  j["sample_sizes"] = config.sample_sizes;
  j["m1"] = config.m1;
  j["m2"] = config.m2;
  j["grid_size"] = config.grid_size;
  j["master_seed"] = config.master_seed;
  auto names = nlohmann::json::array();
  for (Method m : config.methods) names.push_back(method_name(m));
  j["methods"] = std::move(names);
  return j.dump();
}

std::string config_hash(const StudyConfig& config) {
  const std::string sig = config_signature(config);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char ch : sig) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

namespace {

struct PopulationContext {
  std::vector<double> values;
  ScalingTransform scaling;
  std::vector<double> truth;  // true scaled density on the shared grid
};

struct MethodAcc {
  long double sum = 0.0L;
  long double sumsq = 0.0L;
  long long count = 0;
  std::vector<double> ises;
};

struct TaskOut {
  std::vector<MethodAcc> acc;
  long long attempted = 0;
  long long failed = 0;
  long long redraws = 0;
  long long v_neg = 0;
  long long v_mass = 0;
  long long v_jcap = 0;
  long long v_weight = 0;
  double seconds = 0.0;
};

DensityEstimate fit_method(Method method, const WeightedSample& sample,
                           const ScalingTransform& scaling) {
  switch (method) {
    case Method::kTruncated:
      return truncated_estimator(sample, scaling);
    case Method::kSmoothed:
      return smoothed_estimator(sample, scaling);
    case Method::kIidBaseline:
      return iid_baseline_estimator(sample, scaling);
    case Method::kOracle:
      break;
  }
  throw std::invalid_argument("study: method needs caller-chosen weights");
}

}  // namespace

StudyReport run_study(const StudyConfig& config) {
  config.validate();

  std::vector<int> sizes = config.sample_sizes;
  std::sort(sizes.begin(), sizes.end());
  const int S = static_cast<int>(sizes.size());
  const int P = config.m1;
  const int M = static_cast<int>(config.methods.size());
  const auto grid = unit_grid(config.grid_size);

  // Populations are shared across sample sizes: population i is always drawn
  // with seed (master, 1, i) no matter how many sizes the study sweeps.
  std::vector<PopulationContext> pops(static_cast<size_t>(P));
  for (int p = 0; p < P; ++p) {
    std::mt19937_64 rng(derive_seed(config.master_seed, 1,
                                    static_cast<std::uint64_t>(p) + 1));
    auto& ctx = pops[static_cast<size_t>(p)];
    ctx.values = config.superpop.sample(config.N, rng);
    ctx.scaling = fit_scaling(ctx.values, 0.0);
    ctx.truth.resize(grid.size());
    for (size_t g = 0; g < grid.size(); ++g)
      ctx.truth[g] = true_density_on_unit(config.superpop, ctx.scaling, grid[g]);
  }

  const int total_tasks = S * P;
  std::vector<TaskOut> outs(static_cast<size_t>(total_tasks));
  std::atomic<int> next_task{0};
  std::atomic<int> done_tasks{0};
  std::mutex progress_mutex;
  std::exception_ptr task_error;
  std::mutex error_mutex;

  const auto run_task = [&](int task) {
    const int size_idx = task / P;
    const int pop_idx = task % P;
    const int n = sizes[static_cast<size_t>(size_idx)];
    const auto& ctx = pops[static_cast<size_t>(pop_idx)];
    auto& out = outs[static_cast<size_t>(task)];
    out.acc.resize(static_cast<size_t>(M));

    const auto t0 = std::chrono::steady_clock::now();
    const DesignSpec spec = config.design.with_n(n);
    std::vector<double> pi;
    double delta_value = 0.0;
    bool design_ok = true;
    try {
      pi = first_order_pi(spec, ctx.values);
      delta_value = delta(spec, ctx.values);
    } catch (const std::exception&) {
      design_ok = false;
    }

    std::vector<double> sq(grid.size());
    std::vector<double> ise(static_cast<size_t>(M));
    for (int rep = 0; rep < config.m2; ++rep) {
      ++out.attempted;
      if (!design_ok) {
        ++out.failed;
        continue;
      }
      // Replicate j of population i is always seeded (master, 2, i, j), with
      // j running over the size sweep so no stream is ever reused.
      const std::uint64_t j =
          static_cast<std::uint64_t>(size_idx) *
              static_cast<std::uint64_t>(config.m2) +
          static_cast<std::uint64_t>(rep) + 1;
      std::mt19937_64 rng(derive_seed(config.master_seed, 2,
                                      static_cast<std::uint64_t>(pop_idx) + 1,
                                      j));
      try {
        const auto sample = draw_sample(spec, ctx.values, pi, delta_value, rng);
        out.redraws += sample.redraws;
        for (int m = 0; m < M; ++m) {
          const auto est = fit_method(config.methods[static_cast<size_t>(m)],
                                      sample, ctx.scaling);
          const auto vd = project_to_density(est, config.grid_size);
          if (config.validate_replicates) {
            double mn = vd.values[0];
            for (double v : vd.values) mn = std::min(mn, v);
            if (mn < 0.0) ++out.v_neg;
            if (std::abs(trapezoid_unit(vd.values) - 1.0) > 1e-6) ++out.v_mass;
            if (est.J > search_cap(est.coeffs.n)) ++out.v_jcap;
            for (double w : est.w)
              if (w < -1e-12 || w > 1.0 + 1e-12) {
                ++out.v_weight;
                break;
              }
          }
          for (size_t g = 0; g < sq.size(); ++g) {
            const double d = vd.values[g] - ctx.truth[g];
            sq[g] = d * d;
          }
          ise[static_cast<size_t>(m)] = trapezoid_unit(sq);
        }
        // Commit only once every method succeeded, so each cell of a task
        // aggregates exactly the same replicate set.
        for (int m = 0; m < M; ++m) {
          auto& acc = out.acc[static_cast<size_t>(m)];
          const double v = ise[static_cast<size_t>(m)];
          acc.sum += v;
          acc.sumsq += static_cast<long double>(v) * v;
          ++acc.count;
          if (config.capture_ise) acc.ises.push_back(v);
        }
      } catch (const std::exception&) {
        ++out.failed;
      }
    }
    out.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();

    if (config.progress) {
      const int done = done_tasks.fetch_add(1) + 1;
      std::lock_guard<std::mutex> lock(progress_mutex);
      config.progress(done, total_tasks);
    }
  };

  int threads = config.threads == 0
                    ? static_cast<int>(std::thread::hardware_concurrency())
                    : config.threads;
  threads = std::max(1, std::min(threads, total_tasks));

  const auto worker = [&] {
    for (;;) {
      const int task = next_task.fetch_add(1);
      if (task >= total_tasks) return;
      try {
        run_task(task);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!task_error) task_error = std::current_exception();
        return;
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (task_error) std::rethrow_exception(task_error);

  // Fixed-order fold so the report is bit-identical for any thread count.
  StudyReport report;
  report.master_seed = config.master_seed;
  report.config_hash = config_hash(config);
  report.config_echo = config_signature(config);
  report.design_label = config.design_label;
  report.superpop_label = config.superpop_label;
  report.cells.reserve(static_cast<size_t>(S * M));
  if (config.capture_ise)
    report.captured_ise.resize(static_cast<size_t>(S * M));

  for (const auto& out : outs) {
    report.total_replicates += out.attempted;
    report.failed_replicates += out.failed;
    report.redraws += out.redraws;
    report.violations_negative += out.v_neg;
    report.violations_mass += out.v_mass;
    report.violations_jcap += out.v_jcap;
    report.violations_weight += out.v_weight;
  }

  for (int s = 0; s < S; ++s) {
    double size_seconds = 0.0;
    for (int p = 0; p < P; ++p)
      size_seconds += outs[static_cast<size_t>(s * P + p)].seconds;
    for (int m = 0; m < M; ++m) {
      CellResult cell;
      cell.method = config.methods[static_cast<size_t>(m)];
      cell.n = sizes[static_cast<size_t>(s)];
      cell.seconds = size_seconds;
      long double sum = 0.0L;
      long double sumsq = 0.0L;
      long long count = 0;
      for (int p = 0; p < P; ++p) {
        const auto& acc =
            outs[static_cast<size_t>(s * P + p)].acc[static_cast<size_t>(m)];
        sum += acc.sum;
        sumsq += acc.sumsq;
        count += acc.count;
        if (config.capture_ise) {
          auto& bucket = report.captured_ise[static_cast<size_t>(s * M + m)];
          bucket.insert(bucket.end(), acc.ises.begin(), acc.ises.end());
        }
      }
      cell.replicates = count;
      if (count > 0) {
        cell.mise = static_cast<double>(sum / count);
        if (count > 1) {
          const long double var = (sumsq - sum * sum / count) / (count - 1);
          cell.se = static_cast<double>(
              std::sqrt(std::max(0.0L, var) / count));
        }
      }
      report.cells.push_back(cell);
    }
  }

  if (failure_budget_exceeded(report.failed_replicates,
                              report.total_replicates))
    throw std::runtime_error(
        "study: more than 0.1% of replicates failed (" +
        std::to_string(report.failed_replicates) + " of " +
        std::to_string(report.total_replicates) + ")");
  return report;
}

std::string StudyReport::to_csv(bool include_seconds) const {
  std::string out = include_seconds ? "design,superpop,method,n,mise,se,seconds\n"
                                    : "design,superpop,method,n,mise,se\n";
  for (const auto& cell : cells) {
    out += design_label;
    out += ',';
    out += superpop_label;
    out += ',';
    out += method_name(cell.method);
    out += ',';
    out += std::to_string(cell.n);
    out += ',';
    out += format_double(cell.mise);
    out += ',';
    out += format_double(cell.se);
    if (include_seconds) {
      out += ',';
      out += format_double(cell.seconds);
    }
    out += '\n';
  }
  return out;
}

std::string StudyReport::to_json_string(bool include_seconds) const {
  nlohmann::json j = config_echo.empty()
                         ? nlohmann::json::object()
                         : nlohmann::json::parse(config_echo);
  j["config_hash"] = config_hash;
  j["replicates"] = {{"total", total_replicates},
                     {"failed", failed_replicates},
                     {"redraws", redraws}};
  j["violations"] = {{"negative", violations_negative},
                     {"mass", violations_mass},
                     {"j_cap", violations_jcap},
                     {"weight", violations_weight}};
  auto arr = nlohmann::json::array();
  for (const auto& cell : cells) {
    nlohmann::json c = {{"method", method_name(cell.method)},
                        {"n", cell.n},
                        {"mise", cell.mise},
                        {"se", cell.se},
                        {"replicates", cell.replicates}};
    if (include_seconds) c["seconds"] = cell.seconds;
    arr.push_back(std::move(c));
  }
  j["cells"] = std::move(arr);
  return j.dump(2) + "\n";
}

}  // namespace osde
