#include <CLI11.hpp>

#include <iostream>

#include "osde/cli_commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "osde: orthogonal series density estimation for survey samples"};
  app.require_subcommand(1);

  osde::EstimateOptions est;
  auto* estimate =
      app.add_subcommand("estimate", "Fit a density estimate to a survey CSV");
  estimate
      ->add_option("--input", est.input_csv,
                   "CSV with columns x[,weight][,stratum]")
      ->required();
  estimate->add_option("--pop-size", est.pop_size,
                       "Population size N, or 'sum-weights' (default)");
  estimate->add_option("--delta", est.delta,
                       "Pairwise inclusion constant, or 'auto' (= -1/n)");
  estimate->add_option("--method", est.method,
                       "truncated | smoothed | iid-baseline");
  estimate->add_option("--margin", est.margin,
                       "Scaling margin as a fraction of the sample range");
  estimate->add_option("--grid", est.grid,
                       "Grid points for --out-density (>= 256)");
  estimate
      ->add_option("--out-coeffs", est.out_coeffs,
                   "Output path of the coefficient JSON")
      ->required();
  estimate->add_option("--out-density", est.out_density,
                       "Optional density grid CSV (u,density,se_design)");

  osde::EvalOptions ev;
  auto* eval =
      app.add_subcommand("eval", "Evaluate a stored coefficient export");
  eval->add_option("--coeffs", ev.coeffs_path, "Coefficient JSON to load")
      ->required();
  eval->add_option("--at", ev.at,
                   "Points in [0, 1] to evaluate (CSV rows on stdout)");
  eval->add_option("--grid", ev.grid, "Projection grid size (>= 256)");
  eval->add_option("--out", ev.out_density, "Density grid CSV output path");

  osde::BenchmarkOptions bench;
  std::uint64_t bench_seed = 0;
  auto* benchmark =
      app.add_subcommand("benchmark", "Run a Monte Carlo study from a config");
  benchmark->add_option("--config", bench.config_path, "Study config JSON")
      ->required();
  benchmark->add_option("--out-csv", bench.out_csv, "Result table output path")
      ->required();
  benchmark->add_option("--out-json", bench.out_json,
                        "Provenance sidecar output path");
  benchmark->add_option("--threads", bench.threads,
                        "Worker threads (0 = all cores; default: config)");
  auto* seed_opt = benchmark->add_option("--seed", bench_seed,
                                         "Override the config's master seed");
  benchmark->add_flag("--quiet", bench.quiet, "Suppress progress output");

  osde::TheoryOptions th;
  auto* theory = app.add_subcommand(
      "theory", "Print rate constants for a smoothness class");
  theory->add_option("--k", th.k, "Smoothness order (>= 1)");
  theory->add_option("--Q", th.Q, "Class radius (> 0)");
  theory->add_option("--b", th.b, "Variance scale (> 0)");
  theory->add_option("--c", th.c, "Coefficient decay constant (> 0)");
  theory->add_option("--N", th.N, "Population size");

  CLI11_PARSE(app, argc, argv);

  if (estimate->parsed()) return osde::cmd_estimate(est, std::cerr);
  if (eval->parsed()) return osde::cmd_eval(ev, std::cout, std::cerr);
  if (benchmark->parsed()) {
    if (seed_opt->count() > 0) bench.seed = bench_seed;
    return osde::cmd_benchmark(bench, std::cerr);
  }
  if (theory->parsed()) return osde::cmd_theory(th, std::cout, std::cerr);
  std::cerr << "osde: no subcommand\n";
  return 1;
}
