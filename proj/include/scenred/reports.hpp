#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "scenred/dcnn.hpp"
#include "scenred/error.hpp"
#include "scenred/metrics.hpp"
#include "scenred/reducers.hpp"
#include "scenred/scenario_set.hpp"

namespace scenred {

/// One benchmark row: which reducer ran, how long the reduction call took,
/// and how far its output sits from the original set.
struct ReductionReport {
  std::string method;
  double time_ms = 0.0;
  double space_distance = 0.0;
  double moment_distance = 0.0;
  int set_size = 0;
  int reduced_size = 0;
  int horizon = 0;
  std::uint64_t seed = 0;
};

inline nlohmann::json to_json(const ReductionReport& report) {
  return {{"method", report.method},
          {"time_ms", report.time_ms},
          {"space_distance", report.space_distance},
          {"moment_distance", report.moment_distance},
          {"S", report.set_size},
          {"S_hat", report.reduced_size},
          {"T", report.horizon},
          {"seed", report.seed}};
}

inline ReductionReport reduction_report_from_json(const nlohmann::json& j) {
  ReductionReport report;
  report.method = j.at("method").get<std::string>();
  report.time_ms = j.at("time_ms").get<double>();
  report.space_distance = j.at("space_distance").get<double>();
  report.moment_distance = j.at("moment_distance").get<double>();
  report.set_size = j.at("S").get<int>();
  report.reduced_size = j.at("S_hat").get<int>();
  report.horizon = j.at("T").get<int>();
  report.seed = j.at("seed").get<std::uint64_t>();
  return report;
}

inline nlohmann::json to_json(const DistanceReport& report) {
  return {{"space_distance", report.space},
          {"moment_distance", report.moment},
          {"combined", report.combined},
          {"lambda_moment", report.lambda_moment}};
}

inline nlohmann::json to_json(const TrainReport& report, int train_size, int test_size) {
  nlohmann::json j{{"epochs", report.epochs_run},
                   {"seed", report.seed},
                   {"wall_seconds", report.wall_seconds},
                   {"train_size", train_size},
                   {"test_size", test_size}};
  if (!report.train_loss.empty()) {
    j["initial_train_loss"] = report.train_loss.front();
    j["final_train_loss"] = report.train_loss.back();
  }
  if (!report.test_loss.empty()) {
    j["initial_test_loss"] = report.test_loss.front();
    j["final_test_loss"] = report.test_loss.back();
  }
  return j;
}

/// Runs one reduction method under a monotonic clock and fills in the
/// distance columns afterwards, so only the reduction itself is timed. For
/// "dcnn" the clock covers the network forward pass plus decode, matching the
/// inference-cost framing the classic methods are compared against.
inline ReductionReport run_reduction_report(const ScenarioSet& set, std::string_view method,
                                            const ReductionConfig& cfg, DcnnModel* model = nullptr) {
  ReductionReport report;
  report.method = std::string(method);
  report.set_size = set.size();
  report.horizon = set.horizon();
  report.seed = cfg.seed;

  ScenarioSet reduced = [&]() {
    if (method == "dcnn") {
      if (model == nullptr)
        fail(ErrorKind::InvalidArgument, "method 'dcnn' requires a trained model");
      ReduceResult result = forward_reduce(*model, set);
      report.time_ms = result.elapsed_seconds * 1e3;
      return std::move(result.reduced);
    }
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioSet out = reduce_with_method(set, method, cfg);
    report.time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }();

  report.time_ms = std::max(report.time_ms, 1e-6);
  report.reduced_size = reduced.size();
  report.space_distance = space_distance(set, reduced);
  report.moment_distance = moment_distance(set, reduced);
  return report;
}

}  // namespace scenred
