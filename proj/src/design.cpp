#include "osde/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace osde {

DesignSpec DesignSpec::srswor(int n) {
  DesignSpec d;
  d.kind = DesignKind::kSrswor;
  d.n = n;
  return d;
}

DesignSpec DesignSpec::poisson(int n, PiRule rule) {
  DesignSpec d;
  d.kind = DesignKind::kPoisson;
  d.n = n;
  d.rule = rule;
  return d;
}

DesignSpec DesignSpec::systematic_pps(int n, PiRule rule) {
  DesignSpec d;
  d.kind = DesignKind::kSystematicPps;
  d.n = n;
  d.rule = rule;
  return d;
}

DesignSpec DesignSpec::stratified_proportional(int n,
                                               std::vector<double> bounds) {
  DesignSpec d;
  d.kind = DesignKind::kStratifiedProportional;
  d.n = n;
  d.stratum_bounds = std::move(bounds);
  return d;
}

DesignSpec DesignSpec::stratified_oversample(std::vector<long long> sizes,
                                             std::vector<int> take,
                                             int phase1_n) {
  DesignSpec d;
  d.kind = DesignKind::kStratifiedOversample;
  d.n = phase1_n;
  d.stratum_sizes = std::move(sizes);
  d.stratum_take = std::move(take);
  return d;
}

DesignSpec DesignSpec::with_n(int new_n) const {
  DesignSpec d = *this;
  d.n = new_n;
  return d;
}

std::string design_kind_name(DesignKind kind) {
  switch (kind) {
    case DesignKind::kSrswor:
      return "srswor";
    case DesignKind::kPoisson:
      return "poisson";
    case DesignKind::kSystematicPps:
      return "systematic-pps";
    case DesignKind::kStratifiedProportional:
      return "stratified-proportional";
    case DesignKind::kStratifiedOversample:
      return "stratified-oversample";
  }
  throw std::invalid_argument("design_kind_name: unknown kind");
}

void WeightedSample::validate() const {
  if (values.empty())
    throw std::invalid_argument("sample: no units");
  if (values.size() != weights.size())
    throw std::invalid_argument("sample: values/weights size mismatch");
  if (N < static_cast<long long>(values.size()))
    throw std::invalid_argument("sample: more units than the population has");
  if (!std::isfinite(delta))
    throw std::invalid_argument("sample: non-finite delta");
  for (double v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("sample: non-finite value");
  for (double w : weights)
    if (!std::isfinite(w) || w < 1.0 - 1e-9)
      throw std::invalid_argument(
          "sample: weights are inverse inclusion probabilities and must be >= 1");
  if (!strata.empty()) {
    if (strata.size() != values.size())
      throw std::invalid_argument("sample: strata size mismatch");
    for (int h : strata)
      if (h < 0) throw std::invalid_argument("sample: negative stratum label");
  }
}

std::vector<int> assign_strata(std::span<const double> values,
                               std::span<const double> bounds) {
  for (size_t h = 1; h < bounds.size(); ++h)
    if (!(bounds[h - 1] < bounds[h]))
      throw std::invalid_argument("assign_strata: bounds must strictly ascend");
  std::vector<int> labels(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    const auto it = std::lower_bound(bounds.begin(), bounds.end(), values[i]);
    labels[i] = static_cast<int>(it - bounds.begin());
  }
  return labels;
}

std::vector<int> proportional_allocation(std::span<const long long> sizes,
                                         int n) {
  if (sizes.empty())
    throw std::invalid_argument("allocation: no strata");
  long long total = 0;
  for (long long s : sizes) {
    if (s < 0) throw std::invalid_argument("allocation: negative stratum size");
    total += s;
  }
  if (total < 1) throw std::invalid_argument("allocation: empty population");
  if (n < 1 || n > total)
    throw std::invalid_argument("allocation: n must be in [1, N]");

  const size_t H = sizes.size();
  std::vector<int> out(H, 0);
  std::vector<std::pair<long double, size_t>> remainder;
  long long assigned = 0;
  for (size_t h = 0; h < H; ++h) {
    const long double quota = static_cast<long double>(n) * sizes[h] / total;
    out[h] = static_cast<int>(quota);  // floor: quota >= 0
    assigned += out[h];
    remainder.emplace_back(quota - out[h], h);
  }
  // Largest remainder first; ties broken toward the earlier stratum.
  std::sort(remainder.begin(), remainder.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (long long left = n - assigned; left > 0; --left)
    out[remainder[static_cast<size_t>(n - assigned - left)].second] += 1;

  for (size_t h = 0; h < H; ++h) {
    if (sizes[h] > 0 && out[h] < 1)
      throw std::invalid_argument(
          "allocation: sample too small to cover every nonempty stratum");
    if (out[h] > sizes[h])
      throw std::invalid_argument("allocation: stratum over-allocated");
  }
  return out;
}

namespace {

// pi_i proportional to log(max(x_i + 5, 1)), scaled to sum to n, clipping at 1
// and redistributing over the rest (at most N passes).
std::vector<double> informative_pi(std::span<const double> population, int n) {
  const size_t N = population.size();
  std::vector<double> z(N);
  double raw_total = 0.0;
  for (size_t i = 0; i < N; ++i) {
    z[i] = std::log(std::max(population[i] + 5.0, 1.0));
    raw_total += z[i];
  }
  if (raw_total == 0.0)
    throw std::invalid_argument(
        "informative rule: every size measure is zero");
  for (double& v : z) v = std::max(v, 1e-12);

  std::vector<double> pi(N, 0.0);
  std::vector<char> fixed(N, 0);
  int n_fixed = 0;
  for (size_t pass = 0; pass <= N; ++pass) {
    const double target = n - n_fixed;
    if (target <= 0.0) break;  // remaining units get pi = 0
    double free_total = 0.0;
    size_t free_count = 0;
    for (size_t i = 0; i < N; ++i)
      if (!fixed[i]) {
        free_total += z[i];
        ++free_count;
      }
    if (free_count == 0 || free_total <= 0.0)
      throw std::invalid_argument(
          "informative rule: cannot distribute the target size");
    const double scale = target / free_total;
    bool clipped = false;
    for (size_t i = 0; i < N; ++i) {
      if (fixed[i]) continue;
      const double p = z[i] * scale;
      if (p > 1.0) {
        pi[i] = 1.0;
        fixed[i] = 1;
        ++n_fixed;
        clipped = true;
      } else {
        pi[i] = p;
      }
    }
    if (!clipped) break;
  }
  return pi;
}

void check_fixed_size(int n, long long N, const char* what) {
  if (n < 1 || n > N)
    throw std::invalid_argument(std::string(what) +
                                ": sample size must be in [1, N]");
}

// Counts and allocation of a proportional stratified design over the values.
struct StratifiedLayout {
  std::vector<int> labels;
  std::vector<long long> counts;
  std::vector<int> take;
};

StratifiedLayout stratified_layout(const DesignSpec& design,
                                   std::span<const double> population) {
  StratifiedLayout lay;
  lay.labels = assign_strata(population, design.stratum_bounds);
  lay.counts.assign(design.stratum_bounds.size() + 1, 0);
  for (int h : lay.labels) ++lay.counts[static_cast<size_t>(h)];
  lay.take = proportional_allocation(lay.counts, design.n);
  return lay;
}

void check_oversample_shape(const DesignSpec& design, long long N) {
  if (design.stratum_sizes.empty() ||
      design.stratum_sizes.size() != design.stratum_take.size())
    throw std::invalid_argument(
        "oversample: stratum sizes/take must be nonempty and match");
  const long long total = std::accumulate(design.stratum_sizes.begin(),
                                          design.stratum_sizes.end(), 0LL);
  if (total != N)
    throw std::invalid_argument(
        "oversample: stratum sizes must partition the population");
}

}  // namespace

std::vector<double> oversample_pi(std::span<const long long> stratum_sizes,
                                  std::span<const int> stratum_take,
                                  int phase1_n, long long N) {
  if (N < 1) throw std::invalid_argument("oversample_pi: N must be >= 1");
  if (stratum_sizes.empty() || stratum_sizes.size() != stratum_take.size())
    throw std::invalid_argument("oversample_pi: sizes/take must match");
  if (phase1_n < 0 || phase1_n > N)
    throw std::invalid_argument("oversample_pi: phase-1 size must be in [0, N]");

  std::vector<double> pi(stratum_sizes.size());
  const double phase1 = static_cast<double>(phase1_n) / static_cast<double>(N);
  for (size_t h = 0; h < stratum_sizes.size(); ++h) {
    if (stratum_sizes[h] < 1)
      throw std::invalid_argument("oversample_pi: empty stratum");
    if (stratum_take[h] < 0 || stratum_take[h] > stratum_sizes[h])
      throw std::invalid_argument("oversample_pi: take outside [0, N_h]");
    const double p = static_cast<double>(stratum_take[h]) /
                         static_cast<double>(stratum_sizes[h]) +
                     phase1;
    if (p > 1.0 + 1e-12)
      throw std::domain_error(
          "oversample_pi: inclusion probability exceeds 1");
    pi[h] = std::min(p, 1.0);
  }
  return pi;
}

std::vector<double> first_order_pi(const DesignSpec& design,
                                   std::span<const double> population) {
  const long long N = static_cast<long long>(population.size());
  if (N < 1) throw std::invalid_argument("first_order_pi: empty population");

  switch (design.kind) {
    case DesignKind::kSrswor: {
      check_fixed_size(design.n, N, "srswor");
      return std::vector<double>(population.size(),
                                 static_cast<double>(design.n) / N);
    }
    case DesignKind::kPoisson:
    case DesignKind::kSystematicPps: {
      check_fixed_size(design.n, N, "pi rule");
      if (design.rule == PiRule::kUniform)
        return std::vector<double>(population.size(),
                                   static_cast<double>(design.n) / N);
      return informative_pi(population, design.n);
    }
    case DesignKind::kStratifiedProportional: {
      check_fixed_size(design.n, N, "stratified");
      const auto lay = stratified_layout(design, population);
      std::vector<double> pi(population.size());
      for (size_t i = 0; i < population.size(); ++i) {
        const int h = lay.labels[i];
        pi[i] = static_cast<double>(lay.take[static_cast<size_t>(h)]) /
                static_cast<double>(lay.counts[static_cast<size_t>(h)]);
      }
      return pi;
    }
    case DesignKind::kStratifiedOversample: {
      check_oversample_shape(design, N);
      const auto per_stratum =
          oversample_pi(design.stratum_sizes, design.stratum_take, design.n, N);
      std::vector<double> pi(population.size());
      size_t offset = 0;
      for (size_t h = 0; h < design.stratum_sizes.size(); ++h) {
        const size_t size = static_cast<size_t>(design.stratum_sizes[h]);
        std::fill_n(pi.begin() + offset, size, per_stratum[h]);
        offset += size;
      }
      return pi;
    }
  }
  throw std::invalid_argument("first_order_pi: unknown design kind");
}

double delta(const DesignSpec& design, std::span<const double> population) {
  if (design.kind == DesignKind::kStratifiedProportional) {
    const long long N = static_cast<long long>(population.size());
    check_fixed_size(design.n, N, "stratified");
    const auto lay = stratified_layout(design, population);
    double sum = 0.0;
    for (size_t h = 0; h < lay.counts.size(); ++h) {
      if (lay.counts[h] == 0) continue;
      const double Nh = static_cast<double>(lay.counts[h]);
      sum += Nh * Nh / lay.take[h];
    }
    return -sum / (static_cast<double>(N) * static_cast<double>(N));
  }
  return delta(design, static_cast<long long>(population.size()));
}

double delta(const DesignSpec& design, long long N) {
  if (N < 1) throw std::invalid_argument("delta: N must be >= 1");
  switch (design.kind) {
    case DesignKind::kSrswor:
      check_fixed_size(design.n, N, "srswor");
      return -1.0 / design.n;
    case DesignKind::kPoisson:
      return -1.0 / static_cast<double>(N);
    case DesignKind::kSystematicPps:
      if (design.delta_override) return *design.delta_override;
      check_fixed_size(design.n, N, "systematic");
      return -1.0 / design.n;
    case DesignKind::kStratifiedProportional:
      throw std::invalid_argument(
          "delta: stratified-proportional needs population values");
    case DesignKind::kStratifiedOversample: {
      check_oversample_shape(design, N);
      const long long expected =
          design.n + std::accumulate(design.stratum_take.begin(),
                                     design.stratum_take.end(), 0LL);
      if (expected < 1)
        throw std::invalid_argument("delta: oversample design draws nothing");
      return -1.0 / static_cast<double>(expected);
    }
  }
  throw std::invalid_argument("delta: unknown design kind");
}

namespace {

// Selection sampling (one uniform per population index, chosen in index
// order), so draws are reproducible across standard library versions.
void selection_sample(std::span<const int> members, int take,
                      std::mt19937_64& rng, std::vector<int>& out) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  long long remaining = static_cast<long long>(members.size());
  int need = take;
  for (size_t i = 0; i < members.size() && need > 0; ++i, --remaining) {
    if (unif(rng) * static_cast<double>(remaining) < static_cast<double>(need)) {
      out.push_back(members[i]);
      --need;
    }
  }
}

WeightedSample build_sample(std::span<const double> population,
                            std::span<const double> pi,
                            const std::vector<int>& idx, double delta_value,
                            std::vector<int> strata, int redraws) {
  WeightedSample s;
  s.values.reserve(idx.size());
  s.weights.reserve(idx.size());
  for (int i : idx) {
    s.values.push_back(population[static_cast<size_t>(i)]);
    s.weights.push_back(1.0 / pi[static_cast<size_t>(i)]);
  }
  s.N = static_cast<long long>(population.size());
  s.delta = delta_value;
  s.strata = std::move(strata);
  s.redraws = redraws;
  s.validate();
  return s;
}

}  // namespace

WeightedSample draw_sample(const DesignSpec& design,
                           std::span<const double> population,
                           std::span<const double> pi, double delta_value,
                           std::mt19937_64& rng) {
  const long long N = static_cast<long long>(population.size());
  if (static_cast<long long>(pi.size()) != N)
    throw std::invalid_argument("draw_sample: pi size mismatch");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> idx;

  switch (design.kind) {
    case DesignKind::kSrswor: {
      check_fixed_size(design.n, N, "srswor");
      idx.reserve(static_cast<size_t>(design.n));
      int need = design.n;
      long long remaining = N;
      for (long long i = 0; i < N && need > 0; ++i, --remaining) {
        if (unif(rng) * static_cast<double>(remaining) <
            static_cast<double>(need)) {
          idx.push_back(static_cast<int>(i));
          --need;
        }
      }
      // The constant weight N/n is computed directly: 1/(n/N) would round
      // twice and can be off by an ulp.
      WeightedSample s;
      s.values.reserve(idx.size());
      for (int i : idx) s.values.push_back(population[static_cast<size_t>(i)]);
      s.weights.assign(idx.size(),
                       static_cast<double>(N) / static_cast<double>(design.n));
      s.N = N;
      s.delta = delta_value;
      s.validate();
      return s;
    }

    case DesignKind::kPoisson: {
      int redraws = 0;
      for (int attempt = 0; attempt < 1000; ++attempt) {
        idx.clear();
        for (long long i = 0; i < N; ++i)
          if (unif(rng) < pi[static_cast<size_t>(i)])
            idx.push_back(static_cast<int>(i));
        if (!idx.empty())
          return build_sample(population, pi, idx, delta_value, {}, redraws);
        ++redraws;
      }
      throw std::runtime_error("poisson design: 1000 empty draws in a row");
    }

    case DesignKind::kSystematicPps: {
      double target = unif(rng);
      double cum = 0.0;
      for (long long i = 0; i < N; ++i) {
        cum += pi[static_cast<size_t>(i)];
        while (target < cum) {
          idx.push_back(static_cast<int>(i));
          target += 1.0;
        }
      }
      return build_sample(population, pi, idx, delta_value, {}, 0);
    }

    case DesignKind::kStratifiedProportional: {
      const auto lay = stratified_layout(design, population);
      const size_t H = lay.counts.size();
      std::vector<std::vector<int>> members(H);
      for (size_t i = 0; i < population.size(); ++i)
        members[static_cast<size_t>(lay.labels[i])].push_back(
            static_cast<int>(i));
      for (size_t h = 0; h < H; ++h)
        selection_sample(members[h], lay.take[h], rng, idx);
      std::sort(idx.begin(), idx.end());
      std::vector<int> strata;
      strata.reserve(idx.size());
      for (int i : idx) strata.push_back(lay.labels[static_cast<size_t>(i)]);
      return build_sample(population, pi, idx, delta_value, std::move(strata), 0);
    }

    case DesignKind::kStratifiedOversample: {
      check_oversample_shape(design, N);
      if (design.n < 0 || design.n > N)
        throw std::invalid_argument("oversample: phase-1 size outside [0, N]");
      std::vector<char> in(static_cast<size_t>(N), 0);
      // Phase 1: SRSWOR over the whole population.
      {
        int need = design.n;
        long long remaining = N;
        for (long long i = 0; i < N && need > 0; ++i, --remaining)
          if (unif(rng) * static_cast<double>(remaining) <
              static_cast<double>(need)) {
            in[static_cast<size_t>(i)] = 1;
            --need;
          }
      }
      // Phase 2: SRSWOR of take_h inside each contiguous block.
      std::vector<int> block_of(static_cast<size_t>(N));
      size_t offset = 0;
      for (size_t h = 0; h < design.stratum_sizes.size(); ++h) {
        const size_t size = static_cast<size_t>(design.stratum_sizes[h]);
        std::vector<int> block(size);
        std::iota(block.begin(), block.end(), static_cast<int>(offset));
        std::vector<int> chosen;
        selection_sample(block, design.stratum_take[h], rng, chosen);
        for (int i : chosen) in[static_cast<size_t>(i)] = 1;
        std::fill_n(block_of.begin() + static_cast<long>(offset), size,
                    static_cast<int>(h));
        offset += size;
      }
      std::vector<int> strata;
      for (long long i = 0; i < N; ++i)
        if (in[static_cast<size_t>(i)]) {
          idx.push_back(static_cast<int>(i));
          strata.push_back(block_of[static_cast<size_t>(i)]);
        }
      return build_sample(population, pi, idx, delta_value, std::move(strata), 0);
    }
  }
  throw std::invalid_argument("draw_sample: unknown design kind");
}

WeightedSample draw_sample(const DesignSpec& design,
                           std::span<const double> population,
                           std::mt19937_64& rng) {
  const auto pi = first_order_pi(design, population);
  const double d = delta(design, population);
  return draw_sample(design, population, pi, d, rng);
}

}  // namespace osde
