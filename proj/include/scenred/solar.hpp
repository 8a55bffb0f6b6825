#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "scenred/error.hpp"
#include "scenred/rng.hpp"
#include "scenred/scenario_set.hpp"

namespace scenred {

/// Synthetic hourly solar profiles: a clear-sky half-sine across the daylight
/// window, a per-scenario amplitude jitter, and a few random Gaussian-shaped
/// cloud dips.
struct SolarGenConfig {
  int horizon = 24;
  int sunrise = 6;   // first daylight step
  int sunset = 18;   // first dark step after the window
  double peak_kw = 4.0;
  double amplitude_jitter = 0.15;  // fraction of peak
  int min_cloud_dips = 0;
  int max_cloud_dips = 3;
  double dip_depth_min = 0.2;
  double dip_depth_max = 0.7;
  std::uint64_t seed = 0;
};

inline ScenarioSet gen_synthetic(const SolarGenConfig& cfg, int set_size) {
  if (set_size < 1) fail(ErrorKind::InvalidArgument, "set size must be at least 1");
  if (!(cfg.sunrise >= 0 && cfg.sunrise < cfg.sunset && cfg.sunset <= cfg.horizon))
    fail(ErrorKind::InvalidWindow, "daylight window [" + std::to_string(cfg.sunrise) + ", " +
                                       std::to_string(cfg.sunset) + ") must fit inside 0.." +
                                       std::to_string(cfg.horizon));
  if (!(cfg.peak_kw > 0.0)) fail(ErrorKind::InvalidArgument, "peak_kw must be positive");
  if (!(cfg.amplitude_jitter >= 0.0 && cfg.amplitude_jitter < 1.0))
    fail(ErrorKind::InvalidArgument, "amplitude jitter must lie in [0, 1)");
  if (cfg.min_cloud_dips < 0 || cfg.max_cloud_dips < cfg.min_cloud_dips)
    fail(ErrorKind::InvalidArgument, "cloud dip counts must satisfy 0 <= min <= max");
  if (!(cfg.dip_depth_min >= 0.0 && cfg.dip_depth_min <= cfg.dip_depth_max && cfg.dip_depth_max < 1.0))
    fail(ErrorKind::InvalidArgument, "dip depths must satisfy 0 <= min <= max < 1");

  Rng rng(cfg.seed);
  const double window = static_cast<double>(cfg.sunset - cfg.sunrise);
  std::vector<std::vector<double>> values;
  values.reserve(static_cast<std::size_t>(set_size));
  for (int s = 0; s < set_size; ++s) {
    const double amplitude = cfg.peak_kw * (1.0 + cfg.amplitude_jitter * rng.uniform(-1.0, 1.0));
    std::vector<double> row(static_cast<std::size_t>(cfg.horizon), 0.0);
    for (int t = cfg.sunrise; t < cfg.sunset; ++t) {
      const double phase = (static_cast<double>(t - cfg.sunrise) + 0.5) / window;
      row[static_cast<std::size_t>(t)] = amplitude * std::sin(std::numbers::pi * phase);
    }
    const int dips = rng.uniform_int(cfg.min_cloud_dips, cfg.max_cloud_dips);
    for (int d = 0; d < dips; ++d) {
      const double center = rng.uniform(static_cast<double>(cfg.sunrise), static_cast<double>(cfg.sunset));
      const double halfwidth = rng.uniform(0.5, 2.0);
      const double depth = rng.uniform(cfg.dip_depth_min, cfg.dip_depth_max);
      for (int t = cfg.sunrise; t < cfg.sunset; ++t) {
        const double offset = (static_cast<double>(t) + 0.5 - center) / halfwidth;
        row[static_cast<std::size_t>(t)] *= 1.0 - depth * std::exp(-offset * offset);
      }
    }
    values.push_back(std::move(row));
  }
  std::vector<double> probs(static_cast<std::size_t>(set_size), 1.0 / set_size);
  return {std::move(values), std::move(probs)};
}

}  // namespace scenred
