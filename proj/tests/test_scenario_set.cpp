#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "scenred/scenario_set.hpp"
#include "test_support.hpp"

using scenred::ErrorKind;
using scenred::ImageGrid;
using scenred::NormalizationParams;
using scenred::Rng;
using scenred::ScenarioSet;
using testsup::error_kind_of;
using testsup::random_set;

TEST_CASE("scenario set construction") {
  SECTION("single scenario") {
    const ScenarioSet set({{0.1, 0.2}}, {1.0});
    CHECK(set.size() == 1);
    CHECK(set.horizon() == 2);
    CHECK(set.value(0, 1) == 0.2);
  }
  SECTION("probability sum out of tolerance") {
    CHECK(error_kind_of([] { ScenarioSet({{0.0}, {1.0}}, {0.5, 0.6}); }) ==
          ErrorKind::ProbabilitySumOutOfTolerance);
  }
  SECTION("negative probability") {
    CHECK(error_kind_of([] { ScenarioSet({{0.0}, {1.0}, {2.0}}, {0.3, -0.1, 0.8}); }) ==
          ErrorKind::NegativeProbability);
  }
  SECTION("ragged rows rejected") {
    CHECK(error_kind_of([] { ScenarioSet({{0.0, 1.0}, {1.0}}, {0.5, 0.5}); }) ==
          ErrorKind::DimensionMismatch);
  }
  SECTION("non-finite value rejected") {
    CHECK(error_kind_of([] { ScenarioSet({{std::nan("")}}, {1.0}); }) == ErrorKind::NonFiniteValue);
  }
  SECTION("slightly-off sums renormalize") {
    const ScenarioSet set({{0.0}, {1.0}}, {0.5 + 2e-7, 0.5});
    CHECK(std::abs(set.prob(0) + set.prob(1) - 1.0) <= 1e-12);
  }
}

TEST_CASE("normalization") {
  SECTION("linear map over a known range") {
    const ScenarioSet raw({{0.0, 2.0}, {4.0, 1.0}}, {0.5, 0.5});
    const auto [normalized, params] = scenred::normalize(raw);
    CHECK(params.v_min == 0.0);
    CHECK(params.v_max == 4.0);
    CHECK(normalized.value(0, 1) == 0.5);
    CHECK(normalized.value(1, 0) == 1.0);
  }
  SECTION("constant set degenerates to zeros") {
    const ScenarioSet raw({{3.0, 3.0}, {3.0, 3.0}}, {0.5, 0.5});
    const auto [normalized, params] = scenred::normalize(raw);
    CHECK(params.v_min == 3.0);
    CHECK(params.v_max == 3.0);
    CHECK(params.degenerate());
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) CHECK(normalized.value(s, t) == 0.0);
    const ScenarioSet restored = scenred::denormalize(normalized, params);
    CHECK(restored.value(1, 1) == 3.0);
  }
  SECTION("denormalize inverts normalize on random sets") {
    Rng rng(11);
    for (int it = 0; it < 50; ++it) {
      ScenarioSet set = random_set(rng, rng.uniform_int(1, 9), rng.uniform_int(1, 6));
      const auto [normalized, params] = scenred::normalize(set);
      const ScenarioSet restored = scenred::denormalize(normalized, params);
      for (int s = 0; s < set.size(); ++s)
        for (int t = 0; t < set.horizon(); ++t)
          CHECK(std::abs(restored.value(s, t) - set.value(s, t)) <= 1e-12);
    }
  }
  SECTION("probabilities pass through untouched") {
    Rng rng(12);
    const ScenarioSet set = random_set(rng, 5, 3);
    const auto [normalized, params] = scenred::normalize(set);
    CHECK(normalized.probs() == set.probs());
  }
}

TEST_CASE("image encoding") {
  SECTION("layout matches the column convention") {
    const ScenarioSet set({{0.1, 0.2}, {0.3, 0.4}}, {0.6, 0.4});
    const ImageGrid grid = scenred::encode_image(set);
    REQUIRE(grid.rows == 3);
    REQUIRE(grid.cols == 2);
    const std::vector<double> expected{0.1, 0.3, 0.2, 0.4, 0.6, 0.4};
    CHECK(grid.data == expected);
  }
  SECTION("single scenario becomes a single column") {
    const ScenarioSet set({{0.5, 0.7, 0.1}}, {1.0});
    const ImageGrid grid = scenred::encode_image(set);
    REQUIRE(grid.rows == 4);
    REQUIRE(grid.cols == 1);
    CHECK(grid.data == std::vector<double>{0.5, 0.7, 0.1, 1.0});
  }
  SECTION("decode inverts the layout") {
    ImageGrid grid(3, 2);
    grid.data = {0.1, 0.3, 0.2, 0.4, 0.6, 0.4};
    const ScenarioSet set = scenred::decode_image(grid);
    CHECK(set.values() == std::vector<std::vector<double>>{{0.1, 0.2}, {0.3, 0.4}});
    CHECK(set.probs() == std::vector<double>{0.6, 0.4});
  }
  SECTION("decode renormalizes the probability row") {
    ImageGrid grid(2, 2);
    grid.data = {0.1, 0.9, 0.2, 0.2};
    const ScenarioSet set = scenred::decode_image(grid);
    CHECK(set.prob(0) == 0.5);
    CHECK(set.prob(1) == 0.5);
  }
  SECTION("negative probability entries clamp to zero") {
    ImageGrid grid(2, 2);
    grid.data = {0.1, 0.9, -0.3, 0.2};
    const ScenarioSet set = scenred::decode_image(grid);
    CHECK(set.prob(0) == 0.0);
    CHECK(set.prob(1) == 1.0);
  }
  SECTION("all-zero probability row fails") {
    ImageGrid grid(2, 2);
    grid.data = {0.1, 0.9, 0.0, -0.1};
    CHECK(error_kind_of([&] { scenred::decode_image(grid); }) == ErrorKind::AllZeroProbabilityRow);
  }
  SECTION("grids need at least two rows") {
    ImageGrid grid(1, 2);
    grid.data = {0.5, 0.5};
    CHECK(error_kind_of([&] { scenred::decode_image(grid); }) == ErrorKind::EmptyGrid);
  }
  SECTION("decode of encode is bit-exact on random sets") {
    Rng rng(21);
    for (int it = 0; it < 100; ++it) {
      const ScenarioSet set = random_set(rng, rng.uniform_int(1, 12), rng.uniform_int(1, 8));
      const ScenarioSet back = scenred::decode_image(scenred::encode_image(set));
      CHECK(back == set);
    }
  }
}

TEST_CASE("canonical ordering") {
  SECTION("already sorted input is unchanged") {
    const ScenarioSet set({{0.1, 0.1}, {0.5, 0.5}}, {0.4, 0.6});
    CHECK(scenred::canonical_order(set) == set);
  }
  SECTION("identical scenarios order by descending probability") {
    const ScenarioSet set({{0.2, 0.2}, {0.2, 0.2}}, {0.3, 0.7});
    const ScenarioSet ordered = scenred::canonical_order(set);
    CHECK(ordered.prob(0) == 0.7);
    CHECK(ordered.prob(1) == 0.3);
  }
  SECTION("energy ties fall back to lexicographic values") {
    const ScenarioSet set({{0.4, 0.1}, {0.1, 0.4}}, {0.5, 0.5});
    const ScenarioSet ordered = scenred::canonical_order(set);
    CHECK(ordered.value(0, 0) == 0.1);
    CHECK(ordered.value(1, 0) == 0.4);
  }
  SECTION("idempotent and a permutation on random sets") {
    Rng rng(31);
    for (int it = 0; it < 50; ++it) {
      const ScenarioSet set = random_set(rng, rng.uniform_int(1, 10), rng.uniform_int(1, 5));
      const ScenarioSet once = scenred::canonical_order(set);
      CHECK(scenred::canonical_order(once) == once);

      auto pairs_of = [](const ScenarioSet& s) {
        std::vector<std::pair<std::vector<double>, double>> pairs;
        for (int i = 0; i < s.size(); ++i)
          pairs.emplace_back(s.values()[static_cast<std::size_t>(i)], s.prob(i));
        std::sort(pairs.begin(), pairs.end());
        return pairs;
      };
      CHECK(pairs_of(once) == pairs_of(set));
    }
  }
}

TEST_CASE("train/test split") {
  const auto make_corpus = [](int n) {
    std::vector<ScenarioSet> corpus;
    Rng rng(77);
    for (int i = 0; i < n; ++i) corpus.push_back(random_set(rng, 3, 2));
    return corpus;
  };
  SECTION("82 percent of 100") {
    const auto corpus = make_corpus(100);
    const auto [train, test] = scenred::split_train_test(corpus, 0.82, 5);
    CHECK(train.size() == 82);
    CHECK(test.size() == 18);
  }
  SECTION("half of two") {
    const auto corpus = make_corpus(2);
    const auto [train, test] = scenred::split_train_test(corpus, 0.5, 5);
    CHECK(train.size() == 1);
    CHECK(test.size() == 1);
  }
  SECTION("same seed, same split") {
    const auto [a_train, a_test] = scenred::split_indices(40, 0.7, 123);
    const auto [b_train, b_test] = scenred::split_indices(40, 0.7, 123);
    CHECK(a_train == b_train);
    CHECK(a_test == b_test);
    const auto [c_train, c_test] = scenred::split_indices(40, 0.7, 124);
    CHECK(a_train != c_train);
  }
  SECTION("empty corpus rejected") {
    CHECK(error_kind_of([] { scenred::split_indices(0, 0.5, 1); }) == ErrorKind::EmptyCorpus);
  }
  SECTION("fraction bounds enforced") {
    CHECK(error_kind_of([] { scenred::split_indices(10, 1.0, 1); }) == ErrorKind::InvalidArgument);
  }
}
