#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "scenred/metrics.hpp"
#include "test_support.hpp"

using scenred::ErrorKind;
using scenred::Rng;
using scenred::ScenarioSet;
using testsup::error_kind_of;
using testsup::random_set;

TEST_CASE("scenario distance") {
  SECTION("identical vectors") {
    const std::vector<double> a{0.3, 0.7, 0.1};
    CHECK(scenred::scenario_distance(a, a) == 0.0);
  }
  SECTION("unit square diagonal") {
    const std::vector<double> a{0.0, 0.0};
    const std::vector<double> b{1.0, 1.0};
    CHECK_THAT(scenred::scenario_distance(a, b),
               Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-15));
  }
  SECTION("length mismatch") {
    const std::vector<double> a{0.0, 0.0};
    const std::vector<double> b{1.0};
    CHECK(error_kind_of([&] { scenred::scenario_distance(a, b); }) == ErrorKind::LengthMismatch);
  }
  SECTION("triangle inequality on random triples") {
    Rng rng(41);
    for (int it = 0; it < 200; ++it) {
      const int horizon = rng.uniform_int(1, 6);
      std::vector<double> a(static_cast<std::size_t>(horizon)), b = a, c = a;
      for (int t = 0; t < horizon; ++t) {
        a[static_cast<std::size_t>(t)] = rng.uniform(-2.0, 2.0);
        b[static_cast<std::size_t>(t)] = rng.uniform(-2.0, 2.0);
        c[static_cast<std::size_t>(t)] = rng.uniform(-2.0, 2.0);
      }
      CHECK(scenred::scenario_distance(a, c) <=
            scenred::scenario_distance(a, b) + scenred::scenario_distance(b, c) + 1e-12);
    }
  }
}

TEST_CASE("space distance") {
  SECTION("zero against itself") {
    Rng rng(42);
    const ScenarioSet set = random_set(rng, 6, 4);
    CHECK(scenred::space_distance(set, set) == 0.0);
  }
  SECTION("hand-computed two-to-one reduction") {
    const ScenarioSet original({{0.0, 0.0}, {1.0, 1.0}}, {0.5, 0.5});
    const ScenarioSet reduced({{0.0, 0.0}}, {1.0});
    CHECK_THAT(scenred::space_distance(original, reduced),
               Catch::Matchers::WithinAbs(0.5 * std::sqrt(2.0), 1e-15));
  }
  SECTION("matches the double-loop oracle on random instances") {
    Rng rng(43);
    for (int it = 0; it < 200; ++it) {
      const int horizon = rng.uniform_int(1, 6);
      const ScenarioSet original = random_set(rng, 10, horizon);
      const ScenarioSet reduced = random_set(rng, 3, horizon);
      CHECK_THAT(scenred::space_distance(original, reduced),
                 Catch::Matchers::WithinAbs(testsup::naive_space_distance(original, reduced), 1e-12));
    }
  }
  SECTION("monotone under reduced-set growth") {
    Rng rng(44);
    for (int it = 0; it < 50; ++it) {
      const int horizon = rng.uniform_int(1, 5);
      const ScenarioSet original = random_set(rng, 8, horizon);
      const ScenarioSet smaller = random_set(rng, 3, horizon);
      std::vector<std::vector<double>> grown = smaller.values();
      grown.push_back(random_set(rng, 1, horizon).values().front());
      const ScenarioSet larger(std::move(grown),
                               std::vector<double>(4, 0.25));
      CHECK(scenred::space_distance(original, larger) <=
            scenred::space_distance(original, smaller) + 1e-15);
    }
  }
  SECTION("horizon mismatch") {
    const ScenarioSet a({{0.0, 0.0}}, {1.0});
    const ScenarioSet b({{0.0}}, {1.0});
    CHECK(error_kind_of([&] { scenred::space_distance(a, b); }) == ErrorKind::HorizonMismatch);
  }
}

TEST_CASE("moment distance") {
  SECTION("zero against itself") {
    Rng rng(45);
    const ScenarioSet set = random_set(rng, 7, 3);
    CHECK(scenred::moment_distance(set, set) == 0.0);
  }
  SECTION("hand-computed single-step case") {
    // Original: mean 1, variance 1. Reduced: mean 1, variance 0.
    const ScenarioSet original({{0.0}, {2.0}}, {0.5, 0.5});
    const ScenarioSet reduced({{1.0}}, {1.0});
    CHECK_THAT(scenred::moment_distance(original, reduced), Catch::Matchers::WithinAbs(1.0, 1e-15));
  }
  SECTION("matches the oracle on random instances") {
    Rng rng(46);
    for (int it = 0; it < 200; ++it) {
      const int horizon = rng.uniform_int(1, 6);
      const ScenarioSet a = random_set(rng, rng.uniform_int(2, 9), horizon);
      const ScenarioSet b = random_set(rng, rng.uniform_int(1, 5), horizon);
      CHECK_THAT(scenred::moment_distance(a, b),
                 Catch::Matchers::WithinAbs(testsup::naive_moment_distance(a, b), 1e-12));
    }
  }
}

TEST_CASE("combined objective") {
  Rng rng(47);
  SECTION("lambda zero reduces to space distance") {
    const ScenarioSet a = random_set(rng, 6, 3);
    const ScenarioSet b = random_set(rng, 2, 3);
    const auto report = scenred::combined_objective(a, b, 0.0);
    CHECK(report.combined == report.space);
  }
  SECTION("report fields are consistent on random instances") {
    for (int it = 0; it < 100; ++it) {
      const int horizon = rng.uniform_int(1, 5);
      const ScenarioSet a = random_set(rng, rng.uniform_int(2, 8), horizon);
      const ScenarioSet b = random_set(rng, rng.uniform_int(1, 4), horizon);
      const double lambda = rng.uniform(0.0, 3.0);
      const auto report = scenred::combined_objective(a, b, lambda);
      CHECK(report.space == scenred::space_distance(a, b));
      CHECK(report.moment == scenred::moment_distance(a, b));
      CHECK_THAT(report.combined,
                 Catch::Matchers::WithinAbs(report.space + lambda * report.moment, 1e-12));
      CHECK(report.space >= 0.0);
      CHECK(report.moment >= 0.0);
    }
  }
  SECTION("negative lambda rejected") {
    const ScenarioSet a = random_set(rng, 3, 2);
    CHECK(error_kind_of([&] { scenred::combined_objective(a, a, -1.0); }) ==
          ErrorKind::InvalidArgument);
  }
}

TEST_CASE("metric scale covariance") {
  Rng rng(48);
  for (int it = 0; it < 50; ++it) {
    const int horizon = rng.uniform_int(1, 5);
    const ScenarioSet a = random_set(rng, rng.uniform_int(2, 8), horizon);
    const ScenarioSet b = random_set(rng, rng.uniform_int(1, 4), horizon);
    const double scale = rng.uniform(0.0, 4.0);

    const auto scaled = [scale](const ScenarioSet& s) {
      std::vector<std::vector<double>> values = s.values();
      for (auto& row : values)
        for (double& v : row) v *= scale;
      return ScenarioSet(std::move(values), s.probs());
    };
    const ScenarioSet sa = scaled(a);
    const ScenarioSet sb = scaled(b);

    CHECK_THAT(scenred::space_distance(sa, sb),
               Catch::Matchers::WithinAbs(scale * scenred::space_distance(a, b), 1e-10));

    std::vector<double> mean_a, var_a, mean_b, var_b;
    testsup::naive_moments(a, mean_a, var_a);
    testsup::naive_moments(b, mean_b, var_b);
    double expected_moment = 0.0;
    for (int t = 0; t < horizon; ++t) {
      expected_moment += scale * std::abs(mean_a[static_cast<std::size_t>(t)] -
                                          mean_b[static_cast<std::size_t>(t)]);
      expected_moment += scale * scale * std::abs(var_a[static_cast<std::size_t>(t)] -
                                                  var_b[static_cast<std::size_t>(t)]);
    }
    expected_moment /= horizon;
    CHECK_THAT(scenred::moment_distance(sa, sb),
               Catch::Matchers::WithinAbs(expected_moment, 1e-10));
  }
}
