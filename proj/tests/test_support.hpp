#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "scenred/rng.hpp"
#include "scenred/scenario_set.hpp"

namespace testsup {

/// Random instance with values in [0, 1] and strictly positive probabilities.
inline scenred::ScenarioSet random_set(scenred::Rng& rng, int scenario_count, int horizon) {
  std::vector<std::vector<double>> values(static_cast<std::size_t>(scenario_count),
                                          std::vector<double>(static_cast<std::size_t>(horizon)));
  std::vector<double> probs(static_cast<std::size_t>(scenario_count));
  double sum = 0.0;
  for (int s = 0; s < scenario_count; ++s) {
    for (int t = 0; t < horizon; ++t)
      values[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = rng.uniform();
    probs[static_cast<std::size_t>(s)] = 0.05 + rng.uniform();
    sum += probs[static_cast<std::size_t>(s)];
  }
  for (double& p : probs) p /= sum;
  return {std::move(values), std::move(probs)};
}

/// Runs fn, which must throw a scenred::Error, and returns its kind.
template <typename Fn>
scenred::ErrorKind error_kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const scenred::Error& e) {
    return e.kind();
  }
  throw std::runtime_error("expected the callable to throw scenred::Error");
}

/// Euclidean distance written independently of the library.
inline double naive_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) sum += (a[t] - b[t]) * (a[t] - b[t]);
  return std::sqrt(sum);
}

/// Double-loop transport-cost oracle.
inline double naive_space_distance(const scenred::ScenarioSet& original,
                                   const scenred::ScenarioSet& reduced) {
  double total = 0.0;
  for (int s = 0; s < original.size(); ++s) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < reduced.size(); ++j)
      best = std::min(best, naive_distance(original.scenario(s), reduced.scenario(j)));
    total += original.prob(s) * best;
  }
  return total;
}

/// Per-step weighted mean/variance oracle.
inline void naive_moments(const scenred::ScenarioSet& set, std::vector<double>& mean,
                          std::vector<double>& variance) {
  const int horizon = set.horizon();
  mean.assign(static_cast<std::size_t>(horizon), 0.0);
  variance.assign(static_cast<std::size_t>(horizon), 0.0);
  for (int t = 0; t < horizon; ++t) {
    double m = 0.0;
    for (int s = 0; s < set.size(); ++s) m += set.prob(s) * set.value(s, t);
    double v = 0.0;
    for (int s = 0; s < set.size(); ++s) {
      const double d = set.value(s, t) - m;
      v += set.prob(s) * d * d;
    }
    mean[static_cast<std::size_t>(t)] = m;
    variance[static_cast<std::size_t>(t)] = v;
  }
}

inline double naive_moment_distance(const scenred::ScenarioSet& a, const scenred::ScenarioSet& b) {
  std::vector<double> mean_a, var_a, mean_b, var_b;
  naive_moments(a, mean_a, var_a);
  naive_moments(b, mean_b, var_b);
  double total = 0.0;
  for (std::size_t t = 0; t < mean_a.size(); ++t)
    total += std::abs(mean_a[t] - mean_b[t]) + std::abs(var_a[t] - var_b[t]);
  return total / static_cast<double>(mean_a.size());
}

}  // namespace testsup
