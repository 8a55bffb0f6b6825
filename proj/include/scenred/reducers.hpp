#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scenred/error.hpp"
#include "scenred/metrics.hpp"
#include "scenred/rng.hpp"
#include "scenred/scenario_set.hpp"

namespace scenred {

struct ReductionConfig {
  int target_size = 1;          // scenarios to keep
  double lambda_moment = 1.0;   // moment weight in the heuristic-search objective
  int max_hs_passes = 100;
  int kmeans_max_iters = 100;
  std::uint64_t seed = 0;
};

namespace detail {

inline void check_target(const ScenarioSet& set, int target_size) {
  if (target_size < 1) fail(ErrorKind::InvalidArgument, "target size must be at least 1");
  if (target_size > set.size())
    fail(ErrorKind::TargetTooLarge, "target size " + std::to_string(target_size) +
                                        " exceeds set size " + std::to_string(set.size()));
}

/// Dense pairwise distance matrix, row-major S x S.
inline std::vector<double> distance_matrix(const ScenarioSet& set) {
  const int count = set.size();
  std::vector<double> dist(static_cast<std::size_t>(count) * count, 0.0);
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      const double d = scenario_distance(set.scenario(i), set.scenario(j));
      dist[static_cast<std::size_t>(i) * count + j] = d;
      dist[static_cast<std::size_t>(j) * count + i] = d;
    }
  }
  return dist;
}

inline ScenarioSet gather(const ScenarioSet& set, std::span<const int> indices,
                          std::span<const double> probs) {
  std::vector<std::vector<double>> values;
  values.reserve(indices.size());
  for (int idx : indices) values.push_back(set.values()[static_cast<std::size_t>(idx)]);
  return {std::move(values), std::vector<double>(probs.begin(), probs.end())};
}

}  // namespace detail

/// Drops every scenario not listed in kept_indices and moves its probability
/// to the nearest kept scenario (ties to the lowest kept index). The output
/// keeps the order of kept_indices.
inline ScenarioSet redistribute_probabilities(const ScenarioSet& set, std::span<const int> kept_indices) {
  if (kept_indices.empty()) fail(ErrorKind::EmptyKeptSet, "kept index list is empty");
  std::vector<char> kept(static_cast<std::size_t>(set.size()), 0);
  for (int idx : kept_indices) {
    if (idx < 0 || idx >= set.size())
      fail(ErrorKind::IndexOutOfRange, "kept index " + std::to_string(idx) + " out of range");
    if (kept[static_cast<std::size_t>(idx)])
      fail(ErrorKind::InvalidArgument, "kept index " + std::to_string(idx) + " listed twice");
    kept[static_cast<std::size_t>(idx)] = 1;
  }
  std::vector<double> probs(kept_indices.size());
  for (std::size_t k = 0; k < kept_indices.size(); ++k)
    probs[k] = set.prob(kept_indices[k]);
  for (int s = 0; s < set.size(); ++s) {
    if (kept[static_cast<std::size_t>(s)]) continue;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_slot = 0;
    int best_index = std::numeric_limits<int>::max();
    for (std::size_t k = 0; k < kept_indices.size(); ++k) {
      const double d = scenario_distance(set.scenario(s), set.scenario(kept_indices[k]));
      if (d < best || (d == best && kept_indices[k] < best_index)) {
        best = d;
        best_slot = k;
        best_index = kept_indices[k];
      }
    }
    probs[best_slot] += set.prob(s);
  }
  return detail::gather(set, kept_indices, probs);
}

/// Greedy forward selection: repeatedly add the candidate u minimizing
///   sum_{k not selected, k != u} p_k * min(d(k, selected), d(k, u)),
/// the standard fast forward algorithm. Keeps a min-distance-to-selected
/// cache per scenario, so a full run costs O(S^2 * target). Ties break to the
/// lowest scenario index. Returns the selected indices in ascending order.
inline std::vector<int> fast_forward_indices(const ScenarioSet& set, int target_size) {
  detail::check_target(set, target_size);
  const int count = set.size();
  const std::vector<double> dist = detail::distance_matrix(set);
  const std::vector<double>& probs = set.probs();

  std::vector<char> selected(static_cast<std::size_t>(count), 0);
  std::vector<double> min_dist(static_cast<std::size_t>(count),
                               std::numeric_limits<double>::infinity());
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(target_size));

  for (int step = 0; step < target_size; ++step) {
    int best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int u = 0; u < count; ++u) {
      if (selected[static_cast<std::size_t>(u)]) continue;
      const double* row_u = dist.data() + static_cast<std::size_t>(u) * count;
      double cost = 0.0;
      for (int k = 0; k < count; ++k) {
        if (selected[static_cast<std::size_t>(k)] || k == u) continue;
        cost += probs[static_cast<std::size_t>(k)] *
                std::min(min_dist[static_cast<std::size_t>(k)], row_u[k]);
      }
      if (cost < best_cost) {
        best_cost = cost;
        best = u;
      }
    }
    selected[static_cast<std::size_t>(best)] = 1;
    chosen.push_back(best);
    const double* row_b = dist.data() + static_cast<std::size_t>(best) * count;
    for (int k = 0; k < count; ++k)
      min_dist[static_cast<std::size_t>(k)] = std::min(min_dist[static_cast<std::size_t>(k)], row_b[k]);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

inline ScenarioSet fast_forward_selection(const ScenarioSet& set, const ReductionConfig& cfg) {
  const std::vector<int> chosen = fast_forward_indices(set, cfg.target_size);
  return redistribute_probabilities(set, chosen);
}

namespace detail {

struct BackwardResult {
  std::vector<int> survivors;   // ascending original indices
  std::vector<double> probs;    // aligned with survivors
};

/// Greedy deletion: remove the scenario s minimizing p_s * min_{s' != s} d(s, s')
/// among survivors, folding its (possibly already grown) probability into the
/// nearest survivor. Ties break to the lowest index on both choices.
inline BackwardResult backward_reduce(const ScenarioSet& set, int target_size) {
  check_target(set, target_size);
  const int count = set.size();
  const std::vector<double> dist = distance_matrix(set);

  std::vector<int> alive;
  alive.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) alive.push_back(s);
  std::vector<double> probs = set.probs();

  while (static_cast<int>(alive.size()) > target_size) {
    int victim_pos = -1;
    double victim_cost = std::numeric_limits<double>::infinity();
    for (std::size_t pos = 0; pos < alive.size(); ++pos) {
      const int s = alive[pos];
      const double* row = dist.data() + static_cast<std::size_t>(s) * count;
      double nearest = std::numeric_limits<double>::infinity();
      for (int other : alive) {
        if (other == s) continue;
        nearest = std::min(nearest, row[other]);
      }
      const double cost = probs[static_cast<std::size_t>(s)] * nearest;
      if (cost < victim_cost) {
        victim_cost = cost;
        victim_pos = static_cast<int>(pos);
      }
    }
    const int victim = alive[static_cast<std::size_t>(victim_pos)];
    alive.erase(alive.begin() + victim_pos);

    const double* row = dist.data() + static_cast<std::size_t>(victim) * count;
    int heir = alive.front();
    double heir_dist = row[heir];
    for (int other : alive) {
      if (row[other] < heir_dist) {
        heir_dist = row[other];
        heir = other;
      }
    }
    probs[static_cast<std::size_t>(heir)] += probs[static_cast<std::size_t>(victim)];
  }

  BackwardResult result;
  result.survivors = alive;
  result.probs.reserve(alive.size());
  for (int s : alive) result.probs.push_back(probs[static_cast<std::size_t>(s)]);
  return result;
}

}  // namespace detail

inline std::vector<int> backward_survivor_indices(const ScenarioSet& set, int target_size) {
  return detail::backward_reduce(set, target_size).survivors;
}

inline ScenarioSet simultaneous_backward_reduction(const ScenarioSet& set, const ReductionConfig& cfg) {
  const detail::BackwardResult result = detail::backward_reduce(set, cfg.target_size);
  return detail::gather(set, result.survivors, result.probs);
}

/// Probability-weighted k-means over scenarios. Centroids are weighted means
/// of their members, cluster probability is the member probability sum, and
/// initialization is seeded farthest-point: a random first center, then
/// repeatedly the scenario farthest from the chosen set. Empty clusters are
/// reseeded to the scenario farthest from its assigned centroid. Stops at an
/// assignment fixpoint or after kmeans_max_iters sweeps. The optional
/// cost_trace records the weighted within-cluster squared-distance cost after
/// each assignment step.
inline ScenarioSet weighted_kmeans_reduce(const ScenarioSet& set, const ReductionConfig& cfg,
                                          std::vector<double>* cost_trace = nullptr) {
  detail::check_target(set, cfg.target_size);
  const int count = set.size();
  const int horizon = set.horizon();
  const int k_count = cfg.target_size;
  if (cfg.kmeans_max_iters < 1) fail(ErrorKind::InvalidArgument, "kmeans_max_iters must be at least 1");

  Rng rng(cfg.seed);
  std::vector<std::vector<double>> centers;
  centers.reserve(static_cast<std::size_t>(k_count));
  std::vector<char> used(static_cast<std::size_t>(count), 0);

  const int first = static_cast<int>(rng.below(static_cast<std::uint64_t>(count)));
  centers.push_back(set.values()[static_cast<std::size_t>(first)]);
  used[static_cast<std::size_t>(first)] = 1;
  std::vector<double> min_dist(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s)
    min_dist[static_cast<std::size_t>(s)] = scenario_distance(set.scenario(s), centers.front());
  while (static_cast<int>(centers.size()) < k_count) {
    int farthest = -1;
    double best = -1.0;
    for (int s = 0; s < count; ++s) {
      if (used[static_cast<std::size_t>(s)]) continue;
      if (min_dist[static_cast<std::size_t>(s)] > best) {
        best = min_dist[static_cast<std::size_t>(s)];
        farthest = s;
      }
    }
    used[static_cast<std::size_t>(farthest)] = 1;
    centers.push_back(set.values()[static_cast<std::size_t>(farthest)]);
    for (int s = 0; s < count; ++s)
      min_dist[static_cast<std::size_t>(s)] = std::min(
          min_dist[static_cast<std::size_t>(s)], scenario_distance(set.scenario(s), centers.back()));
  }

  std::vector<int> assignment(static_cast<std::size_t>(count), -1);
  std::vector<double> cluster_prob(static_cast<std::size_t>(k_count), 0.0);

  for (int iter = 0; iter < cfg.kmeans_max_iters; ++iter) {
    bool changed = false;
    double cost = 0.0;
    for (int s = 0; s < count; ++s) {
      int best_c = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k_count; ++c) {
        const double d = scenario_distance(set.scenario(s), centers[static_cast<std::size_t>(c)]);
        if (d < best_d) {
          best_d = d;
          best_c = c;
        }
      }
      if (assignment[static_cast<std::size_t>(s)] != best_c) {
        assignment[static_cast<std::size_t>(s)] = best_c;
        changed = true;
      }
      cost += set.prob(s) * best_d * best_d;
    }
    if (cost_trace) cost_trace->push_back(cost);
    if (!changed) break;

    std::vector<std::vector<double>> sums(static_cast<std::size_t>(k_count),
                                          std::vector<double>(static_cast<std::size_t>(horizon), 0.0));
    std::vector<double> weights(static_cast<std::size_t>(k_count), 0.0);
    std::vector<int> members(static_cast<std::size_t>(k_count), 0);
    for (int s = 0; s < count; ++s) {
      const int c = assignment[static_cast<std::size_t>(s)];
      const double p = set.prob(s);
      weights[static_cast<std::size_t>(c)] += p;
      members[static_cast<std::size_t>(c)] += 1;
      for (int t = 0; t < horizon; ++t)
        sums[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)] += p * set.value(s, t);
    }
    for (int c = 0; c < k_count; ++c) {
      if (members[static_cast<std::size_t>(c)] == 0) {
        // Reseed an empty cluster to the scenario farthest from its centroid.
        int farthest = 0;
        double best = -1.0;
        for (int s = 0; s < count; ++s) {
          const double d = scenario_distance(
              set.scenario(s), centers[static_cast<std::size_t>(assignment[static_cast<std::size_t>(s)])]);
          if (d > best) {
            best = d;
            farthest = s;
          }
        }
        centers[static_cast<std::size_t>(c)] = set.values()[static_cast<std::size_t>(farthest)];
        continue;
      }
      if (weights[static_cast<std::size_t>(c)] > 0.0) {
        for (int t = 0; t < horizon; ++t)
          centers[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)] =
              sums[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)] / weights[static_cast<std::size_t>(c)];
      } else {
        // Members exist but carry zero probability: plain mean keeps the
        // centroid defined.
        std::vector<double> mean(static_cast<std::size_t>(horizon), 0.0);
        for (int s = 0; s < count; ++s) {
          if (assignment[static_cast<std::size_t>(s)] != c) continue;
          for (int t = 0; t < horizon; ++t) mean[static_cast<std::size_t>(t)] += set.value(s, t);
        }
        for (int t = 0; t < horizon; ++t)
          centers[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)] =
              mean[static_cast<std::size_t>(t)] / members[static_cast<std::size_t>(c)];
      }
    }
  }

  std::fill(cluster_prob.begin(), cluster_prob.end(), 0.0);
  for (int s = 0; s < count; ++s)
    cluster_prob[static_cast<std::size_t>(assignment[static_cast<std::size_t>(s)])] += set.prob(s);
  return {std::move(centers), std::move(cluster_prob)};
}

/// Heuristic-search reduction: start from the fast-forward selection, then
/// hill-climb with single-scenario swap moves, accepting the first swap that
/// strictly lowers the combined space + lambda * moment objective. Each
/// candidate is evaluated by redistributing probabilities from scratch. A
/// pass sweeps every (selected, unselected) pair; search stops after a pass
/// with no accepted swap or after max_hs_passes. The optional objective_trace
/// records the objective after initialization and after each accepted swap.
inline ScenarioSet heuristic_search_reduce(const ScenarioSet& set, const ReductionConfig& cfg,
                                           std::vector<double>* objective_trace = nullptr,
                                           std::vector<int>* selected_out = nullptr) {
  detail::check_target(set, cfg.target_size);
  if (cfg.max_hs_passes < 1) fail(ErrorKind::InvalidArgument, "max_hs_passes must be at least 1");
  const int count = set.size();

  std::vector<int> selected = fast_forward_indices(set, cfg.target_size);
  std::vector<char> in_selected(static_cast<std::size_t>(count), 0);
  for (int idx : selected) in_selected[static_cast<std::size_t>(idx)] = 1;

  ScenarioSet best_set = redistribute_probabilities(set, selected);
  double best_obj = combined_objective(set, best_set, cfg.lambda_moment).combined;
  if (objective_trace) objective_trace->push_back(best_obj);

  if (cfg.target_size == count) {
    if (selected_out) *selected_out = selected;
    return best_set;
  }

  std::vector<int> candidate = selected;
  for (int pass = 0; pass < cfg.max_hs_passes; ++pass) {
    bool improved = false;
    for (std::size_t pos = 0; pos < selected.size(); ++pos) {
      for (int u = 0; u < count; ++u) {
        if (in_selected[static_cast<std::size_t>(u)]) continue;
        candidate = selected;
        candidate[pos] = u;
        std::sort(candidate.begin(), candidate.end());
        const ScenarioSet reduced = redistribute_probabilities(set, candidate);
        const double obj = combined_objective(set, reduced, cfg.lambda_moment).combined;
        if (obj < best_obj) {
          in_selected[static_cast<std::size_t>(selected[pos])] = 0;
          in_selected[static_cast<std::size_t>(u)] = 1;
          selected[pos] = u;
          best_obj = obj;
          best_set = reduced;
          improved = true;
          if (objective_trace) objective_trace->push_back(best_obj);
          break;  // move on to the next selected slot
        }
      }
    }
    if (!improved) break;
  }
  if (selected_out) {
    *selected_out = selected;
    std::sort(selected_out->begin(), selected_out->end());
  }
  return best_set;
}

inline ScenarioSet reduce_with_method(const ScenarioSet& set, std::string_view method,
                                      const ReductionConfig& cfg) {
  if (method == "ffs") return fast_forward_selection(set, cfg);
  if (method == "sbr") return simultaneous_backward_reduction(set, cfg);
  if (method == "kmeans") return weighted_kmeans_reduce(set, cfg);
  if (method == "hs") return heuristic_search_reduce(set, cfg);
  fail(ErrorKind::UnknownMethod, "unknown reduction method '" + std::string(method) + "'");
}

}  // namespace scenred
