#pragma once

#include <span>
#include <string>
#include <vector>

#include "osde/basis.hpp"
#include "osde/design.hpp"

namespace osde {

// Weighted Fourier coefficient estimates theta_hat_j, j = 0..j_max, together
// with the design quantities needed by the variance formulas. theta[0] is the
// weighted mean of phi_0 = 1 (equals 1 exactly only under a census).
struct FourierCoefficients {
  std::vector<double> theta;
  long long N = 0;    // population size
  int n = 0;          // realized sample size
  double delta = 0.0; // pairwise inclusion constant

  int j_max() const { return static_cast<int>(theta.size()) - 1; }
};

enum class Method { kOracle, kTruncated, kSmoothed, kIidBaseline };

std::string method_name(Method method);
Method method_from_name(const std::string& name);

// Upper bound of the truncation search: floor(4 + 0.5 ln n).
int search_cap(int n);

// theta_hat_j = N^-1 sum_{i in s} d_i phi_j((x_i - a)/(b - a)) for j = 0..j_max.
// The sample is summed in (value, weight) order so the result is exactly
// invariant to the order units arrive in. Throws std::domain_error if any
// scaled value leaves [0, 1].
FourierCoefficients ht_coefficients(const WeightedSample& sample,
                                    const ScalingTransform& scaling, int j_max);

// Census coefficients of a full population (all weights 1, N = #values).
FourierCoefficients population_coefficients(std::span<const double> values,
                                            const ScalingTransform& scaling,
                                            int j_max);

// Unweighted sample means n^-1 sum phi_j (the i.i.d.-style coefficients);
// N and delta are carried over from the sample for record keeping.
FourierCoefficients unweighted_coefficients(const WeightedSample& sample,
                                            const ScalingTransform& scaling,
                                            int j_max);

// Variance proxy b_hat_j = 2 + sqrt(2) theta_2j + (delta - 1) theta_j^2.
// Throws std::out_of_range when 2j exceeds j_max.
double b_hat(const FourierCoefficients& coeffs, int j);

// I.i.d. analogue 1 + 2^-1/2 theta_2j - theta_j^2 (no design quantities).
double iid_b_hat(const FourierCoefficients& coeffs, int j);

// Data-driven truncation: argmin over J in 0..search_cap(n) of
// sum_{j<=J} (2 N^-1 b_hat_j - theta_j^2), empty sum = 0, ties -> smaller J.
// Needs theta up to 2*search_cap(n).
int select_J(const FourierCoefficients& coeffs);

// Same rule with iid_b_hat and n in place of N (the baseline's selector).
int select_J_iid(const FourierCoefficients& coeffs);

// Shrinkage weights w_j = clamp((theta_j^2 - N^-1 b_hat_j)/theta_j^2, 0, 1)
// for j = 1..J (w = 0 where theta_j = 0 exactly).
std::vector<double> smoothed_weights(const FourierCoefficients& coeffs, int J);

// A fitted series estimate f_hat(u) = 1 + sum_{j<=J} w_j theta_j phi_j(u).
struct DensityEstimate {
  FourierCoefficients coeffs;
  std::vector<double> w;  // w[j-1] for j = 1..J, each in [0, 1]
  int J = 0;
  ScalingTransform scaling;
  Method method = Method::kOracle;

  void validate() const;  // throws std::invalid_argument on a broken invariant
};

double evaluate(const DensityEstimate& est, double u);

// Estimated design variance of f_hat(u):
// N^-1 sum_{j<=J} w_j^2 (1 + 2^-1/2 theta_2j + delta theta_j^2)(1 + 2^-1/2 phi_2j(u)).
// Returns the raw sum (may be negative in extreme samples); callers that need
// a standard error take sqrt(max(0, .)).
double design_variance_hat(const DensityEstimate& est, double u);

// Combined (design x model) variance N^-1 sum w_j^2 b_hat_j (1 + 2^-1/2 phi_2j(u)).
double combined_variance(const DensityEstimate& est, double u);

// Fixed-weight estimate (oracle weights supplied by the caller).
DensityEstimate oracle_estimator(FourierCoefficients coeffs, std::vector<double> w,
                                 const ScalingTransform& scaling);

// Data-driven estimators. Each fits coefficients up to 2*search_cap(n).
DensityEstimate truncated_estimator(const WeightedSample& sample,
                                    const ScalingTransform& scaling);
DensityEstimate smoothed_estimator(const WeightedSample& sample,
                                   const ScalingTransform& scaling);
DensityEstimate iid_baseline_estimator(const WeightedSample& sample,
                                       const ScalingTransform& scaling);

// L2 projection onto densities: f_tilde = max(0, f_hat - c) with c chosen by
// bisection so the trapezoid integral on the grid equals 1 (within 1e-9).
struct ValidDensity {
  DensityEstimate base;
  double c = 0.0;
  int grid_size = 0;
  std::vector<double> values;  // f_tilde on unit_grid(grid_size)

  double value_at(double u) const;  // max(0, f_hat(u) - c), works off-grid
};

// Requires grid_size >= 256. Throws std::runtime_error if mass 1 cannot be
// reached from c = min(0, min f_hat) (impossible for validated estimates).
ValidDensity project_to_density(const DensityEstimate& est, int grid_size);

}  // namespace osde
