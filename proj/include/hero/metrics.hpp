#ifndef HERO_METRICS_HPP
#define HERO_METRICS_HPP

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hero/telemetry.hpp"

namespace hero {

struct DetectionLatency {
  std::string stream;
  std::string mode;
  double t_start = 0.0;
  std::optional<double> latency;  // s from injection to first hard failure
};

struct MetricsReport {
  double availability = 0.0;        // fraction of ticks with q_p Good
  double rmse_position = 0.0;       // m, over q_p-Good ticks
  double max_discontinuity = 0.0;   // m, largest published position step
  int switch_count = 0;
  int reinit_count = 0;
  bool landed_safely = true;
  std::vector<DetectionLatency> detection_latency;
};

/// Pure function of the telemetry; recomputable offline from the written
/// CSV/JSONL files with identical results.
MetricsReport compute_metrics(const Telemetry& t);

nlohmann::ordered_json metrics_to_json(const MetricsReport& m);
void write_metrics_json(const MetricsReport& m, const std::string& path);

}  // namespace hero

#endif  // HERO_METRICS_HPP
