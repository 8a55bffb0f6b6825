#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scenred/error.hpp"
#include "scenred/rng.hpp"

namespace scenred {

/// Probability sums within this tolerance of 1 are silently renormalized at
/// construction; anything further off is rejected.
inline constexpr double kProbSumTolerance = 1e-6;

/// Sums already within this tolerance of 1 are accepted untouched, so
/// operations that merely shuffle probabilities stay bit-exact.
inline constexpr double kProbSumExact = 1e-9;

/// A discrete distribution over generation trajectories: S scenarios of T
/// values each, plus one probability per scenario. Immutable after
/// construction; construction validates and renormalizes.
class ScenarioSet {
 public:
  ScenarioSet(std::vector<std::vector<double>> values, std::vector<double> probs)
      : values_(std::move(values)), probs_(std::move(probs)) {
    if (values_.empty()) fail(ErrorKind::DimensionMismatch, "scenario set must contain at least one scenario");
    if (values_.front().empty()) fail(ErrorKind::DimensionMismatch, "scenarios must contain at least one value");
    const std::size_t horizon = values_.front().size();
    for (const auto& row : values_) {
      if (row.size() != horizon)
        fail(ErrorKind::DimensionMismatch, "all scenarios must share the same horizon");
      for (double v : row) {
        if (!std::isfinite(v)) fail(ErrorKind::NonFiniteValue, "scenario value is not finite");
      }
    }
    if (probs_.size() != values_.size())
      fail(ErrorKind::DimensionMismatch, "probability count must equal scenario count");
    double sum = 0.0;
    for (double p : probs_) {
      if (!std::isfinite(p)) fail(ErrorKind::NonFiniteValue, "probability is not finite");
      if (p < 0.0) fail(ErrorKind::NegativeProbability, "probability " + std::to_string(p) + " is negative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kProbSumTolerance)
      fail(ErrorKind::ProbabilitySumOutOfTolerance,
           "probabilities sum to " + std::to_string(sum) + ", expected 1");
    if (std::abs(sum - 1.0) > kProbSumExact)
      for (double& p : probs_) p /= sum;
  }

  int size() const { return static_cast<int>(values_.size()); }
  int horizon() const { return static_cast<int>(values_.front().size()); }

  std::span<const double> scenario(int s) const { return values_[static_cast<std::size_t>(s)]; }
  double value(int s, int t) const { return values_[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)]; }
  double prob(int s) const { return probs_[static_cast<std::size_t>(s)]; }

  const std::vector<std::vector<double>>& values() const { return values_; }
  const std::vector<double>& probs() const { return probs_; }

  bool operator==(const ScenarioSet&) const = default;

 private:
  std::vector<std::vector<double>> values_;
  std::vector<double> probs_;
};

/// Min-max range used to scale values into [0, 1]. A degenerate range
/// (v_max == v_min) records the constant; normalization then maps everything
/// to zero and denormalization restores the constant.
struct NormalizationParams {
  double v_min = 0.0;
  double v_max = 1.0;

  bool degenerate() const { return !(v_max > v_min); }
  double span() const { return v_max - v_min; }

  bool operator==(const NormalizationParams&) const = default;
};

inline NormalizationParams value_range(const ScenarioSet& set) {
  double lo = set.value(0, 0);
  double hi = lo;
  for (const auto& row : set.values()) {
    for (double v : row) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return {lo, hi};
}

/// Corpus-wide range, so one scale is shared by every instance a model sees.
inline NormalizationParams value_range(std::span<const ScenarioSet> corpus) {
  if (corpus.empty()) fail(ErrorKind::EmptyCorpus, "cannot compute a value range over an empty corpus");
  NormalizationParams range = value_range(corpus.front());
  for (const ScenarioSet& set : corpus.subspan(1)) {
    const NormalizationParams r = value_range(set);
    range.v_min = std::min(range.v_min, r.v_min);
    range.v_max = std::max(range.v_max, r.v_max);
  }
  return range;
}

inline ScenarioSet apply_normalization(const ScenarioSet& set, const NormalizationParams& params) {
  std::vector<std::vector<double>> values = set.values();
  if (params.degenerate()) {
    for (auto& row : values)
      for (double& v : row) v = 0.0;
  } else {
    const double inv = 1.0 / params.span();
    for (auto& row : values)
      for (double& v : row) v = (v - params.v_min) * inv;
  }
  return {std::move(values), set.probs()};
}

inline std::pair<ScenarioSet, NormalizationParams> normalize(const ScenarioSet& set) {
  const NormalizationParams params = value_range(set);
  return {apply_normalization(set, params), params};
}

inline ScenarioSet denormalize(const ScenarioSet& set, const NormalizationParams& params) {
  std::vector<std::vector<double>> values = set.values();
  for (auto& row : values)
    for (double& v : row) v = params.v_min + v * params.span();
  return {std::move(values), set.probs()};
}

/// The canonical 2-D encoding: column s carries scenario s top to bottom with
/// its probability appended as the last row, so a set with horizon T becomes a
/// (T+1) x S grid.
struct ImageGrid {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major

  ImageGrid() = default;
  ImageGrid(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  bool operator==(const ImageGrid&) const = default;
};

inline ImageGrid encode_image(const ScenarioSet& set) {
  const int horizon = set.horizon();
  const int count = set.size();
  ImageGrid grid(horizon + 1, count);
  for (int s = 0; s < count; ++s) {
    for (int t = 0; t < horizon; ++t) grid.at(t, s) = set.value(s, t);
    grid.at(horizon, s) = set.prob(s);
  }
  return grid;
}

/// Inverse of encode_image. Negative entries in the probability row are
/// clamped to zero before renormalization, since arbitrary grids (unlike
/// sigmoid outputs) may dip below zero.
inline ScenarioSet decode_image(const ImageGrid& grid) {
  if (grid.rows < 2 || grid.cols < 1)
    fail(ErrorKind::EmptyGrid, "grid must have at least 2 rows and 1 column");
  const int horizon = grid.rows - 1;
  const int count = grid.cols;
  std::vector<double> probs(static_cast<std::size_t>(count));
  double sum = 0.0;
  for (int s = 0; s < count; ++s) {
    const double p = std::max(0.0, grid.at(horizon, s));
    probs[static_cast<std::size_t>(s)] = p;
    sum += p;
  }
  if (sum <= 0.0)
    fail(ErrorKind::AllZeroProbabilityRow, "probability row has no positive mass");
  if (std::abs(sum - 1.0) > kProbSumExact)
    for (double& p : probs) p /= sum;
  std::vector<std::vector<double>> values(static_cast<std::size_t>(count),
                                          std::vector<double>(static_cast<std::size_t>(horizon)));
  for (int s = 0; s < count; ++s)
    for (int t = 0; t < horizon; ++t) values[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = grid.at(t, s);
  return {std::move(values), std::move(probs)};
}

/// Deterministic scenario ordering: ascending total energy, ties broken by
/// lexicographic value comparison, then by descending probability. Gives any
/// consumer of the image encoding a stable left-to-right layout.
inline ScenarioSet canonical_order(const ScenarioSet& set) {
  const int count = set.size();
  std::vector<double> energy(static_cast<std::size_t>(count), 0.0);
  for (int s = 0; s < count; ++s)
    for (double v : set.scenario(s)) energy[static_cast<std::size_t>(s)] += v;

  std::vector<int> order(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) order[static_cast<std::size_t>(s)] = s;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ea = energy[static_cast<std::size_t>(a)];
    const double eb = energy[static_cast<std::size_t>(b)];
    if (ea != eb) return ea < eb;
    const auto& va = set.values()[static_cast<std::size_t>(a)];
    const auto& vb = set.values()[static_cast<std::size_t>(b)];
    if (va != vb) return va < vb;
    return set.prob(a) > set.prob(b);
  });

  std::vector<std::vector<double>> values;
  std::vector<double> probs;
  values.reserve(static_cast<std::size_t>(count));
  probs.reserve(static_cast<std::size_t>(count));
  for (int idx : order) {
    values.push_back(set.values()[static_cast<std::size_t>(idx)]);
    probs.push_back(set.prob(idx));
  }
  return {std::move(values), std::move(probs)};
}

/// Deterministic shuffled index split; the train side gets round(fraction * n).
inline std::pair<std::vector<int>, std::vector<int>> split_indices(int n, double train_fraction,
                                                                   std::uint64_t seed) {
  if (n <= 0) fail(ErrorKind::EmptyCorpus, "cannot split an empty corpus");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    fail(ErrorKind::InvalidArgument, "train fraction must lie strictly between 0 and 1");
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  rng.shuffle(order);
  long long train_count = std::llround(train_fraction * n);
  train_count = std::clamp(train_count, 0LL, static_cast<long long>(n));
  std::vector<int> train(order.begin(), order.begin() + train_count);
  std::vector<int> test(order.begin() + train_count, order.end());
  return {std::move(train), std::move(test)};
}

inline std::pair<std::vector<ScenarioSet>, std::vector<ScenarioSet>> split_train_test(
    const std::vector<ScenarioSet>& corpus, double train_fraction, std::uint64_t seed) {
  const auto [train_idx, test_idx] = split_indices(static_cast<int>(corpus.size()), train_fraction, seed);
  std::vector<ScenarioSet> train;
  std::vector<ScenarioSet> test;
  train.reserve(train_idx.size());
  test.reserve(test_idx.size());
  for (int i : train_idx) train.push_back(corpus[static_cast<std::size_t>(i)]);
  for (int i : test_idx) test.push_back(corpus[static_cast<std::size_t>(i)]);
  return {std::move(train), std::move(test)};
}

}  // namespace scenred
