#pragma once

#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace osde {

enum class DesignKind {
  kSrswor,                  // simple random sampling without replacement
  kPoisson,                 // independent inclusions, random size
  kSystematicPps,           // cumulative-pi traversal, single random start
  kStratifiedProportional,  // SRSWOR within value-defined strata
  kStratifiedOversample,    // phase-1 SRSWOR plus per-stratum oversample
};

// First-order inclusion rule for the random-size designs.
enum class PiRule {
  kUniform,  // pi_i = n / N
  kLogSize,  // pi_i proportional to log(max(x_i + 5, 1))
};

struct DesignSpec {
  DesignKind kind = DesignKind::kSrswor;
  int n = 0;                          // target / expected sample size
  PiRule rule = PiRule::kUniform;
  std::vector<double> stratum_bounds;  // proportional: ascending cut points on x
  std::vector<long long> stratum_sizes;  // oversample: N_h (contiguous index blocks)
  std::vector<int> stratum_take;         // oversample: n_h per stratum
  std::optional<double> delta_override;  // systematic: overrides the -1/n default

  static DesignSpec srswor(int n);
  static DesignSpec poisson(int n, PiRule rule = PiRule::kLogSize);
  static DesignSpec systematic_pps(int n, PiRule rule = PiRule::kLogSize);
  static DesignSpec stratified_proportional(int n, std::vector<double> bounds);
  static DesignSpec stratified_oversample(std::vector<long long> sizes,
                                          std::vector<int> take, int phase1_n);

  DesignSpec with_n(int new_n) const;
};

std::string design_kind_name(DesignKind kind);

// A drawn sample with its survey weights d_i = 1/pi_i.
struct WeightedSample {
  std::vector<double> values;   // original (unscaled) observations
  std::vector<double> weights;  // d_i = 1/pi_i, each >= 1 - 1e-9
  long long N = 0;              // population size
  double delta = 0.0;           // pairwise inclusion constant of the design
  std::vector<int> strata;      // stratum label per unit (empty if none)
  int redraws = 0;              // Poisson empty-draw retries

  int n() const { return static_cast<int>(values.size()); }
  void validate() const;  // throws std::invalid_argument on a broken invariant
};

// Stratum index per value given ascending cut points (value <= bounds[h] -> h).
std::vector<int> assign_strata(std::span<const double> values,
                               std::span<const double> bounds);

// Largest-remainder apportionment of n across strata, proportional to sizes.
// Every nonempty stratum must receive at least one unit, else throws.
std::vector<int> proportional_allocation(std::span<const long long> sizes, int n);

// First-order inclusion probabilities for every population unit.
std::vector<double> first_order_pi(const DesignSpec& design,
                                   std::span<const double> population);

// Pairwise inclusion constant delta = N^-2 sum_{i != k} pi_ik/(pi_i pi_k) - 1.
// Closed forms: SRSWOR -1/n, Poisson -1/N, stratified -N^-2 sum N_h^2/n_h;
// systematic and oversample use the -1/(expected size) approximation.
double delta(const DesignSpec& design, std::span<const double> population);
// Population-free overload; throws for StratifiedProportional (needs values).
double delta(const DesignSpec& design, long long N);

// Per-stratum inclusion probability n_h/N_h + n/N of a stratified design with
// a phase-1 sample of size n over the whole population. Throws if any value
// exceeds 1 or the inputs are inconsistent.
std::vector<double> oversample_pi(std::span<const long long> stratum_sizes,
                                  std::span<const int> stratum_take,
                                  int phase1_n, long long N);

// Draws one sample. Poisson redraws on an empty result (counted in the
// sample's `redraws`), capped at 1000 attempts.
WeightedSample draw_sample(const DesignSpec& design,
                           std::span<const double> population,
                           std::mt19937_64& rng);

// Same, with precomputed inclusion probabilities and delta (harness fast path;
// pi must equal first_order_pi(design, population)).
WeightedSample draw_sample(const DesignSpec& design,
                           std::span<const double> population,
                           std::span<const double> pi, double delta_value,
                           std::mt19937_64& rng);

}  // namespace osde
