#include "osde/cli_commands.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "osde/coefficient_export.hpp"
#include "osde/grid.hpp"
#include "osde/survey_csv.hpp"
#include "osde/theory.hpp"

namespace osde {

namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

long long parse_positive_ll(const std::string& text, const char* what) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const long long v = std::strtoll(begin, &end, 10);
  if (end != begin + text.size() || text.empty() || v < 1)
    throw std::invalid_argument(std::string(what) + ": '" + text +
                                "' is not a positive integer");
  return v;
}

double parse_real(const std::string& text, const char* what) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + text.size() || text.empty() || !std::isfinite(v))
    throw std::invalid_argument(std::string(what) + ": '" + text +
                                "' is not a finite number");
  return v;
}

DensityEstimate fit_by_method(Method method, const WeightedSample& sample,
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
  throw std::invalid_argument(
      "only the data-driven methods (truncated, smoothed, iid-baseline) can "
      "be fitted from data");
}

void write_text_file(const std::string& path, const std::string& text,
                     const char* what) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(std::string(what) + ": cannot write " + path);
  out << text;
  if (!out)
    throw std::runtime_error(std::string(what) + ": failed writing " + path);
}

}  // namespace

std::string density_grid_csv(const ValidDensity& density) {
  const auto grid = unit_grid(density.grid_size);
  std::string out = "u,density,se_design\n";
  for (size_t g = 0; g < grid.size(); ++g) {
    const double var = design_variance_hat(density.base, grid[g]);
    out += fmt(grid[g]);
    out += ',';
    out += fmt(density.values[g]);
    out += ',';
    out += fmt(std::sqrt(std::max(0.0, var)));
    out += '\n';
  }
  return out;
}

int cmd_estimate(const EstimateOptions& opts, std::ostream& err) {
  try {
    if (opts.out_coeffs.empty())
      throw std::invalid_argument("--out-coeffs is required");
    const auto data = read_survey_csv(opts.input_csv);
    const Method method = method_from_name(opts.method);
    if (method == Method::kOracle)
      throw std::invalid_argument(
          "the oracle method needs caller-chosen weights; use truncated, "
          "smoothed, or iid-baseline");

    WeightedSample sample;
    sample.values = data.x;
    sample.weights = data.weight;
    sample.strata = data.stratum;
    const int n = static_cast<int>(sample.values.size());
    if (opts.pop_size == "sum-weights") {
      const double total = std::accumulate(sample.weights.begin(),
                                           sample.weights.end(), 0.0);
      sample.N = std::llround(total);
    } else {
      sample.N = parse_positive_ll(opts.pop_size, "--pop-size");
    }
    sample.delta = opts.delta == "auto" ? -1.0 / n
                                        : parse_real(opts.delta, "--delta");
    sample.validate();

    const auto scaling = fit_scaling(sample.values, opts.margin);
    const auto est = fit_by_method(method, sample, scaling);
    write_export(make_export(est), opts.out_coeffs);
    if (!opts.out_density.empty())
      write_text_file(opts.out_density,
                      density_grid_csv(project_to_density(est, opts.grid)),
                      "estimate");
    return 0;
  } catch (const std::exception& e) {
    err << "estimate: " << e.what() << "\n";
    return 1;
  }
}

int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const auto exp = read_export(opts.coeffs_path);
    const auto est = to_estimate(exp);
    const auto vd = project_to_density(est, opts.grid);
    if (!opts.at.empty()) {
      out << "u,density,se_design\n";
      for (double u : opts.at) {
        const double var = design_variance_hat(est, u);
        out << fmt(u) << ',' << fmt(vd.value_at(u)) << ','
            << fmt(std::sqrt(std::max(0.0, var))) << '\n';
      }
    }
    if (!opts.out_density.empty())
      write_text_file(opts.out_density, density_grid_csv(vd), "eval");
    if (opts.at.empty() && opts.out_density.empty())
      out << density_grid_csv(vd);
    return 0;
  } catch (const std::exception& e) {
    err << "eval: " << e.what() << "\n";
    return 1;
  }
}

int cmd_benchmark(const BenchmarkOptions& opts, std::ostream& err) {
  try {
    if (opts.out_csv.empty())
      throw std::invalid_argument("--out-csv is required");
    auto cfg = load_study_config(opts.config_path);
    if (opts.threads >= 0) cfg.threads = opts.threads;
    if (opts.seed) cfg.master_seed = *opts.seed;
    if (!opts.quiet)
      cfg.progress = [&err](int done, int total) {
        err << "task " << done << "/" << total << "\n";
      };
    const auto report = run_study(cfg);
    write_text_file(opts.out_csv, report.to_csv(true), "benchmark");
    if (!opts.out_json.empty())
      write_text_file(opts.out_json, report.to_json_string(true), "benchmark");
    return 0;
  } catch (const std::exception& e) {
    err << "benchmark: " << e.what() << "\n";
    return 1;
  }
}

int cmd_theory(const TheoryOptions& opts, std::ostream& out,
               std::ostream& err) {
  try {
    const SobolevParams p{opts.k, opts.Q, opts.b, opts.c};
    p.validate();
    const double h1 = h1_constant(p);
    const double h2 = h2_constant(p);
    out << "k = " << opts.k << "\n"
        << "Q = " << fmt(opts.Q) << "\n"
        << "b = " << fmt(opts.b) << "\n"
        << "c = " << fmt(opts.c) << "\n"
        << "N = " << opts.N << "\n"
        << "P_constant = " << fmt(minimax_constant(p)) << "\n"
        << "mise_lower_bound = " << fmt(minimax_lower_bound(p, opts.N)) << "\n"
        << "H1 = " << fmt(h1) << "\n"
        << "H2 = " << fmt(h2) << "\n"
        << "H2_over_H1 = " << fmt(h2 / h1) << "\n"
        << "J_optimal = " << fmt(optimal_J_theory(p, opts.N)) << "\n"
        << "mise_min = " << fmt(mise_min_theory(p, opts.N)) << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "theory: " << e.what() << "\n";
    return 1;
  }
}

namespace {

[[noreturn]] void config_fail(const std::string& what) {
  throw std::runtime_error("study config: " + what);
}

void check_keys(const nlohmann::json& obj,
                std::initializer_list<const char*> allowed,
                const char* where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known)
      config_fail(std::string("unknown key '") + item.key() + "' in " + where);
  }
}

DesignSpec parse_design(const nlohmann::json& d) {
  if (!d.is_object()) config_fail("'design' must be an object");
  if (!d.contains("kind")) config_fail("design needs a 'kind'");
  const auto kind = d.at("kind").get<std::string>();
  DesignSpec spec;
  if (kind == "srswor") {
    check_keys(d, {"kind"}, "design");
    spec.kind = DesignKind::kSrswor;
  } else if (kind == "poisson" || kind == "systematic-pps") {
    check_keys(d, {"kind", "rule", "delta_override"}, "design");
    spec.kind = kind == "poisson" ? DesignKind::kPoisson
                                  : DesignKind::kSystematicPps;
    spec.rule = PiRule::kLogSize;
    if (d.contains("rule")) {
      const auto rule = d.at("rule").get<std::string>();
      if (rule == "uniform")
        spec.rule = PiRule::kUniform;
      else if (rule == "log-size")
        spec.rule = PiRule::kLogSize;
      else
        config_fail("unknown pi rule '" + rule + "'");
    }
    if (d.contains("delta_override")) {
      if (kind != "systematic-pps")
        config_fail("delta_override applies to systematic-pps only");
      spec.delta_override = d.at("delta_override").get<double>();
    }
  } else if (kind == "stratified-proportional") {
    check_keys(d, {"kind", "stratum_bounds"}, "design");
    if (!d.contains("stratum_bounds"))
      config_fail("stratified-proportional needs 'stratum_bounds'");
    spec.kind = DesignKind::kStratifiedProportional;
    spec.stratum_bounds = d.at("stratum_bounds").get<std::vector<double>>();
  } else if (kind == "stratified-oversample") {
    check_keys(d, {"kind", "stratum_sizes", "stratum_take"}, "design");
    if (!d.contains("stratum_sizes") || !d.contains("stratum_take"))
      config_fail(
          "stratified-oversample needs 'stratum_sizes' and 'stratum_take'");
    spec.kind = DesignKind::kStratifiedOversample;
    spec.stratum_sizes = d.at("stratum_sizes").get<std::vector<long long>>();
    spec.stratum_take = d.at("stratum_take").get<std::vector<int>>();
  } else {
    config_fail("unknown design kind '" + kind + "'");
  }
  return spec;
}

Superpopulation parse_superpop(const nlohmann::json& sp, std::string* label) {
  if (!sp.is_object()) config_fail("'superpopulation' must be an object");
  check_keys(sp, {"label", "components"}, "superpopulation");
  if (sp.contains("label")) *label = sp.at("label").get<std::string>();
  if (!sp.contains("components") || !sp.at("components").is_array() ||
      sp.at("components").empty())
    config_fail("superpopulation needs a nonempty 'components' array");
  std::vector<GaussComponent> comps;
  for (const auto& c : sp.at("components")) {
    check_keys(c, {"weight", "mean", "variance", "sd"}, "a component");
    if (!c.contains("weight") || !c.contains("mean"))
      config_fail("every component needs 'weight' and 'mean'");
    const bool has_var = c.contains("variance");
    const bool has_sd = c.contains("sd");
    if (has_var == has_sd)
      config_fail("every component needs exactly one of 'variance' or 'sd'");
    GaussComponent g;
    g.weight = c.at("weight").get<double>();
    g.mean = c.at("mean").get<double>();
    if (has_var) {
      g.variance = c.at("variance").get<double>();
    } else {
      const double sd = c.at("sd").get<double>();
      g.variance = sd * sd;
    }
    comps.push_back(g);
  }
  return Superpopulation(std::move(comps));
}

}  // namespace

StudyConfig parse_study_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("study config: not valid JSON: ") +
                             e.what());
  }
  try {
    if (!j.is_object()) config_fail("top level must be an object");
    check_keys(j,
               {"design", "superpopulation", "N", "sample_sizes", "m1", "m2",
                "grid_size", "seed", "methods", "design_label"},
               "the config");
    if (!j.contains("design")) config_fail("missing 'design'");
    if (!j.contains("superpopulation")) config_fail("missing 'superpopulation'");

    StudyConfig cfg;
    cfg.m1 = 100;  // config-file defaults describe a full study, not the
    cfg.m2 = 10000;  // struct's single-replicate smoke values
    cfg.design = parse_design(j.at("design"));
    cfg.superpop = parse_superpop(j.at("superpopulation"), &cfg.superpop_label);
    cfg.design_label = j.contains("design_label")
                           ? j.at("design_label").get<std::string>()
                           : design_kind_name(cfg.design.kind);
    if (j.contains("N")) cfg.N = j.at("N").get<long long>();
    if (j.contains("sample_sizes"))
      cfg.sample_sizes = j.at("sample_sizes").get<std::vector<int>>();
    if (j.contains("m1")) cfg.m1 = j.at("m1").get<int>();
    if (j.contains("m2")) cfg.m2 = j.at("m2").get<int>();
    if (j.contains("grid_size")) cfg.grid_size = j.at("grid_size").get<int>();
    if (j.contains("seed"))
      cfg.master_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const auto& m : j.at("methods"))
        cfg.methods.push_back(method_from_name(m.get<std::string>()));
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("study config: bad field type: ") +
                             e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("study config: ") + e.what());
  }
}

StudyConfig load_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("study config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_study_config(ss.str());
}

}  // namespace osde
