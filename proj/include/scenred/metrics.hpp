#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "scenred/error.hpp"
#include "scenred/scenario_set.hpp"

namespace scenred {

/// Distances between an original set and a reduced candidate, plus their
/// weighted combination: combined = space + lambda_moment * moment.
struct DistanceReport {
  double space = 0.0;
  double moment = 0.0;
  double combined = 0.0;
  double lambda_moment = 0.0;
};

inline double scenario_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    fail(ErrorKind::LengthMismatch, "scenario_distance requires equal-length vectors");
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double d = a[t] - b[t];
    sum += d * d;
  }
  return std::sqrt(sum);
}

/// Probability-weighted nearest-neighbor transport cost
///   D = sum_s p_s * min_j ||zeta_s - zeta_hat_j||_2,
/// the quantity the greedy reduction algorithms drive down.
inline double space_distance(const ScenarioSet& original, const ScenarioSet& reduced) {
  if (original.horizon() != reduced.horizon())
    fail(ErrorKind::HorizonMismatch, "original and reduced sets must share the horizon");
  if (reduced.size() < 1) fail(ErrorKind::EmptyReducedSet, "reduced set is empty");
  double total = 0.0;
  for (int s = 0; s < original.size(); ++s) {
    double nearest = std::numeric_limits<double>::infinity();
    for (int j = 0; j < reduced.size(); ++j)
      nearest = std::min(nearest, scenario_distance(original.scenario(s), reduced.scenario(j)));
    total += original.prob(s) * nearest;
  }
  return total;
}

namespace detail {

inline void weighted_moments(const ScenarioSet& set, std::vector<double>& mean,
                             std::vector<double>& variance) {
  const int horizon = set.horizon();
  mean.assign(static_cast<std::size_t>(horizon), 0.0);
  variance.assign(static_cast<std::size_t>(horizon), 0.0);
  for (int s = 0; s < set.size(); ++s) {
    const double p = set.prob(s);
    for (int t = 0; t < horizon; ++t) mean[static_cast<std::size_t>(t)] += p * set.value(s, t);
  }
  for (int s = 0; s < set.size(); ++s) {
    const double p = set.prob(s);
    for (int t = 0; t < horizon; ++t) {
      const double d = set.value(s, t) - mean[static_cast<std::size_t>(t)];
      variance[static_cast<std::size_t>(t)] += p * d * d;
    }
  }
}

}  // namespace detail

/// Mean absolute gap of the first two probability-weighted per-step moments:
///   M = (1/T) * sum_t ( |mu_t - mu_hat_t| + |var_t - var_hat_t| ).
inline double moment_distance(const ScenarioSet& original, const ScenarioSet& reduced) {
  if (original.horizon() != reduced.horizon())
    fail(ErrorKind::HorizonMismatch, "original and reduced sets must share the horizon");
  const int horizon = original.horizon();
  std::vector<double> mean_a, var_a, mean_b, var_b;
  detail::weighted_moments(original, mean_a, var_a);
  detail::weighted_moments(reduced, mean_b, var_b);
  double total = 0.0;
  for (int t = 0; t < horizon; ++t) {
    total += std::abs(mean_a[static_cast<std::size_t>(t)] - mean_b[static_cast<std::size_t>(t)]);
    total += std::abs(var_a[static_cast<std::size_t>(t)] - var_b[static_cast<std::size_t>(t)]);
  }
  return total / horizon;
}

inline DistanceReport combined_objective(const ScenarioSet& original, const ScenarioSet& reduced,
                                         double lambda_moment) {
  if (lambda_moment < 0.0)
    fail(ErrorKind::InvalidArgument, "lambda_moment must be nonnegative");
  DistanceReport report;
  report.space = space_distance(original, reduced);
  report.moment = moment_distance(original, reduced);
  report.lambda_moment = lambda_moment;
  report.combined = report.space + lambda_moment * report.moment;
  return report;
}

}  // namespace scenred
