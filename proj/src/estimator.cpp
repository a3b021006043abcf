#include "osde/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "osde/grid.hpp"

namespace osde {

namespace {

void check_unit_interval(double u, const char* what) {
  if (!(u >= -kDomainTol && u <= 1.0 + kDomainTol))
    throw std::domain_error(std::string(what) + ": u outside [0, 1]");
}

// Shared accumulation: sum d_i phi_j(u_i) over units sorted by (value, weight)
// so the floating-point result does not depend on input order, then divide by
// `denom`.
FourierCoefficients coefficients_core(std::span<const double> values,
                                      std::span<const double> weights,
                                      double denom,
                                      const ScalingTransform& scaling,
                                      int j_max) {
  if (j_max < 0)
    throw std::invalid_argument("coefficients: j_max must be >= 0");
  if (values.size() != weights.size() || values.empty())
    throw std::invalid_argument("coefficients: bad unit arrays");

  std::vector<std::pair<double, double>> units(values.size());
  for (size_t i = 0; i < values.size(); ++i)
    units[i] = {values[i], weights[i]};
  std::sort(units.begin(), units.end());

  FourierCoefficients out;
  out.theta.assign(static_cast<size_t>(j_max) + 1, 0.0);
  for (const auto& [v, d] : units) {
    const double u = scaling.to_unit(v);
    for (int j = 0; j <= j_max; ++j)
      out.theta[static_cast<size_t>(j)] += d * phi(j, u);
  }
  for (double& t : out.theta) t /= denom;
  return out;
}

}  // namespace

std::string method_name(Method method) {
  switch (method) {
    case Method::kOracle:
      return "oracle";
    case Method::kTruncated:
      return "truncated";
    case Method::kSmoothed:
      return "smoothed";
    case Method::kIidBaseline:
      return "iid-baseline";
  }
  throw std::invalid_argument("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
  if (name == "oracle") return Method::kOracle;
  if (name == "truncated") return Method::kTruncated;
  if (name == "smoothed") return Method::kSmoothed;
  if (name == "iid-baseline") return Method::kIidBaseline;
  throw std::invalid_argument("unknown method name: " + name);
}

int search_cap(int n) {
  if (n < 1) throw std::invalid_argument("search_cap: n must be >= 1");
  return static_cast<int>(std::floor(4.0 + 0.5 * std::log(n)));
}

FourierCoefficients ht_coefficients(const WeightedSample& sample,
                                    const ScalingTransform& scaling,
                                    int j_max) {
  auto out = coefficients_core(sample.values, sample.weights,
                               static_cast<double>(sample.N), scaling, j_max);
  out.N = sample.N;
  out.n = static_cast<int>(sample.values.size());
  out.delta = sample.delta;
  return out;
}

FourierCoefficients population_coefficients(std::span<const double> values,
                                            const ScalingTransform& scaling,
                                            int j_max) {
  const std::vector<double> ones(values.size(), 1.0);
  auto out = coefficients_core(values, ones,
                               static_cast<double>(values.size()), scaling,
                               j_max);
  out.N = static_cast<long long>(values.size());
  out.n = static_cast<int>(values.size());
  out.delta = -1.0 / static_cast<double>(values.size());
  return out;
}

FourierCoefficients unweighted_coefficients(const WeightedSample& sample,
                                            const ScalingTransform& scaling,
                                            int j_max) {
  const std::vector<double> ones(sample.values.size(), 1.0);
  auto out = coefficients_core(sample.values, ones,
                               static_cast<double>(sample.values.size()),
                               scaling, j_max);
  out.N = sample.N;
  out.n = static_cast<int>(sample.values.size());
  out.delta = sample.delta;
  return out;
}

double b_hat(const FourierCoefficients& coeffs, int j) {
  if (j < 1) throw std::invalid_argument("b_hat: j must be >= 1");
  if (2 * j > coeffs.j_max())
    throw std::out_of_range("b_hat: needs theta up to 2j");
  const double tj = coeffs.theta[static_cast<size_t>(j)];
  return 2.0 + std::numbers::sqrt2 * coeffs.theta[static_cast<size_t>(2 * j)] +
         (coeffs.delta - 1.0) * tj * tj;
}

double iid_b_hat(const FourierCoefficients& coeffs, int j) {
  if (j < 1) throw std::invalid_argument("iid_b_hat: j must be >= 1");
  if (2 * j > coeffs.j_max())
    throw std::out_of_range("iid_b_hat: needs theta up to 2j");
  const double tj = coeffs.theta[static_cast<size_t>(j)];
  return 1.0 + coeffs.theta[static_cast<size_t>(2 * j)] / std::numbers::sqrt2 -
         tj * tj;
}

namespace {

int select_truncation(const FourierCoefficients& coeffs, bool iid) {
  const int cap = search_cap(coeffs.n);
  if (coeffs.j_max() < 2 * cap)
    throw std::invalid_argument(
        "truncation search: needs coefficients up to twice the cap");
  const double two_over =
      2.0 / static_cast<double>(iid ? coeffs.n : coeffs.N);
  int best_J = 0;
  double best = 0.0;  // empty sum at J = 0
  double running = 0.0;
  for (int J = 1; J <= cap; ++J) {
    const double bj = iid ? iid_b_hat(coeffs, J) : b_hat(coeffs, J);
    const double tj = coeffs.theta[static_cast<size_t>(J)];
    running += two_over * bj - tj * tj;
    if (running < best) {  // strict: ties resolve to the smaller J
      best = running;
      best_J = J;
    }
  }
  return best_J;
}

}  // namespace

int select_J(const FourierCoefficients& coeffs) {
  return select_truncation(coeffs, false);
}

int select_J_iid(const FourierCoefficients& coeffs) {
  return select_truncation(coeffs, true);
}

std::vector<double> smoothed_weights(const FourierCoefficients& coeffs,
                                     int J) {
  if (J < 0) throw std::invalid_argument("smoothed_weights: J must be >= 0");
  std::vector<double> w(static_cast<size_t>(J));
  const double inv_N = 1.0 / static_cast<double>(coeffs.N);
  for (int j = 1; j <= J; ++j) {
    const double tj = coeffs.theta[static_cast<size_t>(j)];
    if (tj == 0.0) {
      w[static_cast<size_t>(j - 1)] = 0.0;
      continue;
    }
    const double ratio = (tj * tj - inv_N * b_hat(coeffs, j)) / (tj * tj);
    w[static_cast<size_t>(j - 1)] = std::clamp(ratio, 0.0, 1.0);
  }
  return w;
}

void DensityEstimate::validate() const {
  if (coeffs.theta.empty())
    throw std::invalid_argument("estimate: no coefficients");
  if (coeffs.N < 1 || coeffs.n < 1 || coeffs.n > coeffs.N)
    throw std::invalid_argument("estimate: bad population/sample sizes");
  if (!std::isfinite(coeffs.delta))
    throw std::invalid_argument("estimate: non-finite delta");
  if (J < 0 || J > coeffs.j_max())
    throw std::invalid_argument("estimate: J outside [0, j_max]");
  if (static_cast<int>(w.size()) != J)
    throw std::invalid_argument("estimate: weight vector length != J");
  for (double v : w)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("estimate: weight outside [0, 1]");
  if (!(scaling.width() > 0.0) || !std::isfinite(scaling.width()))
    throw std::invalid_argument("estimate: degenerate scaling");
}

double evaluate(const DensityEstimate& est, double u) {
  check_unit_interval(u, "evaluate");
  double f = 1.0;
  for (int j = 1; j <= est.J; ++j)
    f += est.w[static_cast<size_t>(j - 1)] *
         est.coeffs.theta[static_cast<size_t>(j)] * phi(j, u);
  return f;
}

namespace {

// Shared variance loop; `factor` maps j to the coefficient multiplying
// (1 + phi_2j(u)/sqrt(2)).
template <typename FactorFn>
double variance_sum(const DensityEstimate& est, double u, FactorFn factor) {
  check_unit_interval(u, "variance");
  if (est.coeffs.j_max() < 2 * est.J)
    throw std::out_of_range("variance: needs theta up to 2J");
  double sum = 0.0;
  for (int j = 1; j <= est.J; ++j) {
    const double wj = est.w[static_cast<size_t>(j - 1)];
    sum += wj * wj * factor(j) * (1.0 + phi(2 * j, u) / std::numbers::sqrt2);
  }
  return sum / static_cast<double>(est.coeffs.N);
}

}  // namespace

double design_variance_hat(const DensityEstimate& est, double u) {
  return variance_sum(est, u, [&](int j) {
    const double tj = est.coeffs.theta[static_cast<size_t>(j)];
    return 1.0 +
           est.coeffs.theta[static_cast<size_t>(2 * j)] / std::numbers::sqrt2 +
           est.coeffs.delta * tj * tj;
  });
}

double combined_variance(const DensityEstimate& est, double u) {
  return variance_sum(est, u, [&](int j) { return b_hat(est.coeffs, j); });
}

DensityEstimate oracle_estimator(FourierCoefficients coeffs,
                                 std::vector<double> w,
                                 const ScalingTransform& scaling) {
  DensityEstimate est;
  est.J = static_cast<int>(w.size());
  est.coeffs = std::move(coeffs);
  est.w = std::move(w);
  est.scaling = scaling;
  est.method = Method::kOracle;
  est.validate();
  return est;
}

namespace {

DensityEstimate fit(const WeightedSample& sample,
                    const ScalingTransform& scaling, Method method) {
  const int n = static_cast<int>(sample.values.size());
  const int cap = search_cap(n);
  DensityEstimate est;
  est.method = method;
  est.scaling = scaling;
  if (method == Method::kIidBaseline) {
    est.coeffs = unweighted_coefficients(sample, scaling, 2 * cap);
    est.J = select_J_iid(est.coeffs);
    est.w.assign(static_cast<size_t>(est.J), 1.0);
  } else {
    est.coeffs = ht_coefficients(sample, scaling, 2 * cap);
    est.J = select_J(est.coeffs);
    est.w = method == Method::kSmoothed
                ? smoothed_weights(est.coeffs, est.J)
                : std::vector<double>(static_cast<size_t>(est.J), 1.0);
  }
  est.validate();
  return est;
}

}  // namespace

DensityEstimate truncated_estimator(const WeightedSample& sample,
                                    const ScalingTransform& scaling) {
  return fit(sample, scaling, Method::kTruncated);
}

DensityEstimate smoothed_estimator(const WeightedSample& sample,
                                   const ScalingTransform& scaling) {
  return fit(sample, scaling, Method::kSmoothed);
}

DensityEstimate iid_baseline_estimator(const WeightedSample& sample,
                                       const ScalingTransform& scaling) {
  return fit(sample, scaling, Method::kIidBaseline);
}

double ValidDensity::value_at(double u) const {
  return std::max(0.0, evaluate(base, u) - c);
}

ValidDensity project_to_density(const DensityEstimate& est, int grid_size) {
  if (grid_size < 256)
    throw std::invalid_argument("projection: grid must have >= 256 points");
  est.validate();

  const auto grid = unit_grid(grid_size);
  std::vector<double> f(grid.size());
  double f_min = std::numeric_limits<double>::infinity();
  double f_max = -std::numeric_limits<double>::infinity();
  for (size_t g = 0; g < grid.size(); ++g) {
    f[g] = evaluate(est, grid[g]);
    f_min = std::min(f_min, f[g]);
    f_max = std::max(f_max, f[g]);
  }

  ValidDensity vd;
  vd.base = est;
  vd.grid_size = grid_size;

  if (f_min >= 0.0 && std::abs(trapezoid_unit(f) - 1.0) <= 1e-9) {
    vd.c = 0.0;
    vd.values = std::move(f);
    return vd;
  }

  std::vector<double> cut(f.size());
  const auto mass_above = [&](double c) {
    for (size_t g = 0; g < f.size(); ++g) cut[g] = std::max(0.0, f[g] - c);
    return trapezoid_unit(cut);
  };

  double lo = std::min(0.0, f_min);
  double hi = f_max;
  if (mass_above(lo) < 1.0 - 1e-9)
    throw std::runtime_error("projection: total mass below 1 at the floor cut");
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass_above(mid) >= 1.0 ? lo : hi) = mid;
  }
  vd.c = std::max(0.0, 0.5 * (lo + hi));
  mass_above(vd.c);
  vd.values = cut;
  if (std::abs(trapezoid_unit(vd.values) - 1.0) > 1e-9)
    throw std::runtime_error("projection: bisection failed to fix the mass");
  return vd;
}

}  // namespace osde
