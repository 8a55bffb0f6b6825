#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "scenred/error.hpp"

namespace scenred {

/// Seeded random source built on the mt19937_64 bit stream. The mappings to
/// doubles and bounded integers are hand-rolled so that sequences are
/// reproducible across standard library implementations (std distributions
/// are only specified up to implementation-defined algorithms).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53 bits of randomness.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased uniform integer in [0, n). Rejection-sampled.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) fail(ErrorKind::InvalidArgument, "Rng::below requires n > 0");
    const std::uint64_t bucket = std::numeric_limits<std::uint64_t>::max() / n;
    const std::uint64_t limit = bucket * n;
    std::uint64_t x = gen_();
    while (x >= limit) x = gen_();
    return x / bucket;
  }

  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    if (hi < lo) fail(ErrorKind::InvalidArgument, "uniform_int: hi < lo");
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Fisher-Yates shuffle driven by below(), independent of std::shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace scenred
