// Acceptance gate: one line per criterion, exit code = number of failures.
// Optional argv: criterion numbers to run (default all), e.g. ./osde_acceptance 4 7

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "osde/basis.hpp"
#include "osde/cli_commands.hpp"
#include "osde/coefficient_export.hpp"
#include "osde/design.hpp"
#include "osde/estimator.hpp"
#include "osde/grid.hpp"
#include "osde/harness.hpp"
#include "osde/superpop.hpp"
#include "osde/theory.hpp"

using namespace osde;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 6) {
  std::ostringstream ss;
  ss.precision(prec);
  ss << v;
  return ss.str();
}

// ---------------------------------------------------------------- criterion 1

Outcome criterion_delta_oracle() {
  double worst = 0.0;

  const auto brute = [](const std::vector<double>& pi,
                        const std::function<double(int, int)>& pik) {
    const int N = static_cast<int>(pi.size());
    long double s = 0.0L;
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < N; ++k)
        if (i != k)
          s += static_cast<long double>(pik(i, k)) /
               (static_cast<long double>(pi[i]) * pi[k]);
    return static_cast<double>(s / (static_cast<long double>(N) * N) - 1.0L);
  };

  const int N = 200;
  for (int n : {5, 20, 50}) {
    std::vector<double> pi(N, static_cast<double>(n) / N);
    const double joint =
        static_cast<double>(n) * (n - 1) / (static_cast<double>(N) * (N - 1));
    const double oracle = brute(pi, [&](int, int) { return joint; });
    worst = std::max(worst, std::abs(delta(DesignSpec::srswor(n), N) - oracle));
  }

  std::mt19937_64 rng(101);
  const Superpopulation mix({{0.4, -1.0, 0.5}, {0.6, 1.0, 1.0}});
  const auto pop = mix.sample(N, rng);

  {
    const auto spec = DesignSpec::poisson(30, PiRule::kLogSize);
    const auto pi = first_order_pi(spec, pop);
    const double oracle =
        brute(pi, [&](int i, int k) { return pi[i] * pi[k]; });
    worst = std::max(worst, std::abs(delta(spec, pop) - oracle));
  }

  {
    const auto spec = DesignSpec::stratified_proportional(20, {0.0});
    const auto pi = first_order_pi(spec, pop);
    const auto labels = assign_strata(pop, std::vector<double>{0.0});
    long long Nh[2] = {0, 0};
    for (int h : labels) ++Nh[h];
    const auto nh = proportional_allocation(std::vector<long long>{Nh[0], Nh[1]}, 20);
    const auto pik = [&](int i, int k) {
      if (labels[i] != labels[k]) return pi[i] * pi[k];
      const int h = labels[i];
      return nh[h] * (nh[h] - 1.0) /
             (static_cast<double>(Nh[h]) * (Nh[h] - 1.0));
    };
    const double oracle = brute(pi, pik);
    worst = std::max(worst, std::abs(delta(spec, pop) - oracle));
  }

  return {worst <= 1e-10,
          "srswor{5,20,50} + poisson + 2-stratum closed forms vs pair "
          "enumeration, max |diff| = " +
              fmt(worst, 3) + " (tol 1e-10)"};
}

// ---------------------------------------------------------------- criterion 2

Outcome criterion_unbiasedness() {
  std::mt19937_64 pop_rng(202);
  const auto sp = Superpopulation::standard_normal();
  const auto pop = sp.sample(500, pop_rng);
  const auto t = fit_scaling(pop, 0.0);
  const std::vector<double> w{1.0, 1.0, 1.0};

  const auto pop_coeffs = population_coefficients(pop, t, 3);
  const auto f_U = oracle_estimator(pop_coeffs, w, t);
  const std::vector<double> points{0.1, 0.5, 0.9};

  const int R = 20000;
  std::mt19937_64 rng(303);
  std::vector<double> sum(points.size(), 0.0), sumsq(points.size(), 0.0);
  const auto spec = DesignSpec::srswor(50);
  const auto pi = first_order_pi(spec, pop);
  const double dlt = delta(spec, pop);
  for (int r = 0; r < R; ++r) {
    const auto s = draw_sample(spec, pop, pi, dlt, rng);
    const auto c = ht_coefficients(s, t, 3);
    const auto est = oracle_estimator(c, w, t);
    for (size_t p = 0; p < points.size(); ++p) {
      const double v = evaluate(est, points[p]);
      sum[p] += v;
      sumsq[p] += v * v;
    }
  }

  bool pass = true;
  std::ostringstream detail;
  detail.precision(4);
  for (size_t p = 0; p < points.size(); ++p) {
    const double mean = sum[p] / R;
    const double var = (sumsq[p] - sum[p] * sum[p] / R) / (R - 1);
    const double se = std::sqrt(var / R);
    const double target = evaluate(f_U, points[p]);
    const double z = (mean - target) / se;
    pass = pass && std::abs(mean - target) <= 4.0 * se;
    if (p) detail << ", ";
    detail << "u=" << points[p] << ": |bias|/se = " << std::abs(z);
  }
  detail << " (each <= 4)";
  return {pass, detail.str()};
}

// ---------------------------------------------------------------- criterion 3

Outcome criterion_clt_coverage() {
  std::mt19937_64 pop_rng(202);
  const auto sp = Superpopulation::standard_normal();
  const auto pop = sp.sample(500, pop_rng);
  const auto t = fit_scaling(pop, 0.0);
  const std::vector<double> w{1.0, 1.0, 1.0};

  const auto pop_coeffs = population_coefficients(pop, t, 6);
  const double target = evaluate(oracle_estimator(pop_coeffs, w, t), 0.5);

  const int R = 10000;
  std::mt19937_64 rng(404);
  const auto spec = DesignSpec::srswor(200);
  const auto pi = first_order_pi(spec, pop);
  const double dlt = delta(spec, pop);
  int covered = 0;
  for (int r = 0; r < R; ++r) {
    const auto s = draw_sample(spec, pop, pi, dlt, rng);
    const auto c = ht_coefficients(s, t, 6);
    const auto est = oracle_estimator(c, w, t);
    const double fhat = evaluate(est, 0.5);
    const double g = design_variance_hat(est, 0.5);
    if (g > 0.0 && std::abs(fhat - target) <= 1.96 * std::sqrt(g)) ++covered;
  }
  const double coverage = static_cast<double>(covered) / R;
  const bool pass = coverage >= 0.92 && coverage <= 0.975;
  std::string detail = "empirical 95% coverage = " + fmt(coverage, 4) +
                       ", required [0.92, 0.975]";
  if (!pass && coverage > 0.975) {
    detail +=
        "; the N^-1 plug-in variance ignores the census fraction: at n/N = 0.4 "
        "the sampling variance scales like 1/n - 1/N, so intervals over-cover "
        "(rescaling by that factor gives ~0.949)";
  }
  return {pass, detail};
}

// ----------------------------------------------------------- criteria 4 to 8

const StudyReport& shared_study() {
  static const StudyReport report = [] {
    StudyConfig cfg;
    cfg.superpop = Superpopulation({{0.4, -1.0, 0.5}, {0.6, 1.0, 1.0}});
    cfg.superpop_label = "mixture";
    cfg.design = DesignSpec::poisson(0, PiRule::kLogSize);
    cfg.design_label = "poisson-informative";
    cfg.N = 1000;
    cfg.sample_sizes = {20, 100};
    cfg.m1 = 10;
    cfg.m2 = 500;
    cfg.grid_size = 1024;
    cfg.master_seed = 20240817;
    cfg.methods = {Method::kTruncated, Method::kSmoothed, Method::kIidBaseline};
    cfg.validate_replicates = true;
    return run_study(cfg);
  }();
  return report;
}

double study_mise(int n, Method m) {
  for (const auto& cell : shared_study().cells)
    if (cell.n == n && cell.method == m) return cell.mise;
  throw std::logic_error("study cell not found");
}

Outcome criterion_beats_iid() {
  const double trunc = study_mise(100, Method::kTruncated);
  const double smooth = study_mise(100, Method::kSmoothed);
  const double iid = study_mise(100, Method::kIidBaseline);
  const bool pass = trunc < iid && smooth < iid;
  return {pass, "n=100 MISE: truncated " + fmt(trunc, 4) + ", smoothed " +
                    fmt(smooth, 4) + ", iid-baseline " + fmt(iid, 4) +
                    " (both survey-aware < iid)"};
}

Outcome criterion_monotone_in_n() {
  const double at20 = study_mise(20, Method::kTruncated);
  const double at100 = study_mise(100, Method::kTruncated);
  return {at100 < at20, "truncated MISE: n=20 " + fmt(at20, 4) + " -> n=100 " +
                            fmt(at100, 4) + " (must decrease)"};
}

Outcome criterion_smoothed_close() {
  const double trunc = study_mise(100, Method::kTruncated);
  const double smooth = study_mise(100, Method::kSmoothed);
  const double gap = std::abs(smooth - trunc);
  return {gap < 0.5 * trunc, "|smoothed - truncated| = " + fmt(gap, 4) +
                                 " vs 0.5 * truncated = " + fmt(0.5 * trunc, 4)};
}

Outcome criterion_valid_densities() {
  const auto& rep = shared_study();
  const bool pass = rep.failed_replicates == 0 && rep.violations_negative == 0 &&
                    rep.violations_mass == 0;
  return {pass, "replicates " + std::to_string(rep.total_replicates) +
                    ", failed " + std::to_string(rep.failed_replicates) +
                    ", negative-density " +
                    std::to_string(rep.violations_negative) + ", mass>1e-6 " +
                    std::to_string(rep.violations_mass)};
}

Outcome criterion_cap_and_weights() {
  const auto& rep = shared_study();
  const bool pass = rep.violations_jcap == 0 && rep.violations_weight == 0;
  return {pass, "J-above-cap " + std::to_string(rep.violations_jcap) +
                    ", weight-outside-[0,1] " +
                    std::to_string(rep.violations_weight)};
}

// ---------------------------------------------------------------- criterion 9

Outcome criterion_basis_invariants() {
  const int G = 100001;
  const int jmax = 20;
  const auto grid = unit_grid(G);
  std::vector<std::vector<double>> table(jmax + 1, std::vector<double>(G));
  for (int j = 0; j <= jmax; ++j)
    for (int g = 0; g < G; ++g) table[j][g] = phi(j, grid[g]);

  double worst_ortho = 0.0;
  std::vector<double> prod(G);
  for (int i = 0; i <= jmax; ++i) {
    for (int j = i; j <= jmax; ++j) {
      for (int g = 0; g < G; ++g) prod[g] = table[i][g] * table[j][g];
      const double target = (i == j) ? 1.0 : 0.0;
      worst_ortho = std::max(worst_ortho, std::abs(trapezoid_unit(prod) - target));
    }
  }

  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst_id = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const double u = unif(rng);
    for (int j = 1; j <= jmax; ++j) {
      const double lhs = phi(j, u) * phi(j, u);
      const double rhs = 1.0 + phi(2 * j, u) / std::numbers::sqrt2;
      worst_id = std::max(worst_id, std::abs(lhs - rhs));
    }
  }

  const bool pass = worst_ortho < 1e-8 && worst_id < 1e-12;
  return {pass, "orthonormality max |err| = " + fmt(worst_ortho, 3) +
                    " (tol 1e-8), squared-basis identity max |err| = " +
                    fmt(worst_id, 3) + " (tol 1e-12)"};
}

// --------------------------------------------------------------- criterion 10

Outcome criterion_theory_constants() {
  const SobolevParams p{1, 1.0, 2.0, 1.0};
  const double bound = minimax_lower_bound(p, 1000);

  // Independent log-space oracle for k=1, Q=1, b=2, N=1000.
  const double oracle = std::exp(-(2.0 / 3.0) * std::log(4.0 * std::numbers::pi) -
                                 (2.0 / 3.0) * std::log(1000.0));
  const double rel = std::abs(bound / oracle - 1.0);

  double worst_scaling = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const double e = 2.0 * k + 1.0;
    const SobolevParams base{k, 1.0, 2.0, 1.0};
    const SobolevParams dblq{k, 2.0, 2.0, 1.0};
    const SobolevParams bone{k, 1.0, 1.0, 1.0};
    worst_scaling = std::max(
        worst_scaling, std::abs(minimax_constant(dblq) / minimax_constant(base) -
                                std::pow(2.0, 1.0 / e)));
    worst_scaling = std::max(
        worst_scaling, std::abs(minimax_constant(bone) / minimax_constant(base) -
                                std::pow(2.0, 2.0 * k / e)));
    for (double b : {0.5, 1.0, 2.0}) {
      const SobolevParams q{k, 1.0, b, 1.3};
      worst_scaling =
          std::max(worst_scaling, std::abs(h2_constant(q) / h1_constant(q) - b));
    }
  }

  const bool pass = rel <= 1e-6 && worst_scaling <= 1e-12;
  std::ostringstream detail;
  detail << "bound(k=1,Q=1,b=2,N=1000) = " << fmt(bound, 17)
         << ", log-space oracle agreement " << fmt(rel, 3)
         << " (tol 1e-6); scaling identities max |err| = "
         << fmt(worst_scaling, 3)
         << " (tol 1e-12); note: a circulated figure 1.8469e-3 for this bound "
            "does not satisfy the defining formula (arithmetic slip); the "
            "dual-route value is 1.85009e-3";
  return {pass, detail.str()};
}

// --------------------------------------------------------------- criterion 11

Outcome criterion_export_round_trip() {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path();
  const auto input = dir / "osde_accept_survey.csv";
  const auto coeffs = dir / "osde_accept_fit.json";
  const auto dens_a = dir / "osde_accept_density_a.csv";
  const auto dens_b = dir / "osde_accept_density_b.csv";

  {
    std::mt19937_64 rng(505);
    const Superpopulation mix({{0.4, -1.0, 0.5}, {0.6, 1.0, 1.0}});
    const auto draws = mix.sample(200, rng);
    std::ofstream out(input);
    out << "x,weight\n";
    out.precision(17);
    for (double v : draws) out << v << ",1.75\n";
  }

  std::ostringstream err;
  EstimateOptions eopts;
  eopts.input_csv = input.string();
  eopts.method = "smoothed";
  eopts.grid = 512;
  eopts.out_coeffs = coeffs.string();
  eopts.out_density = dens_a.string();
  if (cmd_estimate(eopts, err) != 0)
    return {false, "cmd_estimate failed: " + err.str()};

  EvalOptions vopts;
  vopts.coeffs_path = coeffs.string();
  vopts.grid = 512;
  vopts.out_density = dens_b.string();
  std::ostringstream out;
  if (cmd_eval(vopts, out, err) != 0)
    return {false, "cmd_eval failed: " + err.str()};

  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const auto text_a = slurp(dens_a);
  const auto text_b = slurp(dens_b);
  if (text_a.empty() || text_a != text_b)
    return {false, "eval did not reproduce the estimate's density grid"};

  // Schema: exactly the documented keys, arrays only for theta and w, and
  // both far shorter than the sample — no raw observations can hide here.
  const auto parsed = nlohmann::json::parse(slurp(coeffs));
  const std::set<std::string> want{"format_version", "method", "N", "n",
                                   "delta", "J", "scaling", "theta", "w"};
  std::set<std::string> got;
  for (const auto& item : parsed.items()) got.insert(item.key());
  if (got != want) return {false, "export key set differs from the schema"};
  for (const auto& item : parsed.items()) {
    const bool is_array = item.value().is_array();
    if (is_array && item.key() != "theta" && item.key() != "w")
      return {false, "unexpected array field " + item.key()};
  }
  const auto exp = read_export(coeffs.string());
  const size_t want_len = static_cast<size_t>(2 * search_cap(200) + 1);
  if (exp.theta.size() != want_len)
    return {false, "theta length " + std::to_string(exp.theta.size()) +
                       " != " + std::to_string(want_len)};
  for (double w : exp.w)
    if (!(w >= 0.0 && w <= 1.0)) return {false, "weight outside [0,1]"};

  std::error_code ec;
  for (const auto& p : {input, coeffs, dens_a, dens_b}) fs::remove(p, ec);

  return {true,
          "density grid reproduced byte-for-byte (512 points); export schema "
          "strict, arrays are theta[" +
              std::to_string(exp.theta.size()) + "] and w[" +
              std::to_string(exp.w.size()) + "] only, n = 200"};
}

struct Criterion {
  int id;
  const char* label;
  std::function<Outcome()> fn;
  double budget_seconds;  // 0 -> unconstrained
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> filter;
  for (int i = 1; i < argc; ++i) filter.insert(std::atoi(argv[i]));

  const std::vector<Criterion> criteria{
      {1, "pairwise-constant closed forms", criterion_delta_oracle, 1.0},
      {2, "design-unbiasedness of the weighted series", criterion_unbiasedness,
       30.0},
      {3, "CLT coverage of the plug-in design variance", criterion_clt_coverage,
       60.0},
      {4, "survey-aware estimators beat the iid baseline", criterion_beats_iid,
       300.0},
      {5, "MISE falls with sample size", criterion_monotone_in_n, 0.0},
      {6, "smoothed tracks truncated", criterion_smoothed_close, 0.0},
      {7, "projected estimates are valid densities", criterion_valid_densities,
       0.0},
      {8, "truncation cap and weight range hold", criterion_cap_and_weights,
       0.0},
      {9, "basis orthonormality and squared-basis identity",
       criterion_basis_invariants, 5.0},
      {10, "minimax bound and scaling identities", criterion_theory_constants,
       0.0},
      {11, "coefficient export round trip", criterion_export_round_trip, 0.0},
  };

  int failures = 0;
  int ran = 0;
  for (const auto& c : criteria) {
    if (!filter.empty() && filter.find(c.id) == filter.end()) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    bool pass = outcome.pass;
    std::string detail = outcome.detail;
    if (c.budget_seconds > 0.0 && secs > c.budget_seconds) {
      pass = false;
      detail += " [budget " + fmt(c.budget_seconds, 3) + "s exceeded]";
    }
    std::printf("[%2d] %s  %7.2fs  %s — %s\n", c.id, pass ? "PASS" : "FAIL",
                secs, c.label, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  std::printf("%d/%d criteria passed\n", ran - failures, ran);
  return failures;
}
