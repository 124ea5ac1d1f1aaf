#ifndef HERO_SCENARIO_HPP
#define HERO_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hero/fusion.hpp"
#include "hero/mobility.hpp"
#include "hero/sim.hpp"
#include "hero/telemetry.hpp"

namespace hero {

/// Declarative description of one simulated run: trajectory, streams with
/// noise and thresholds, failure events, mission and seed.
struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  double tick_rate = 100.0;
  double v_max = 2.0;
  bool allow_preempt = false;

  TrajectorySpec trajectory;
  std::vector<SimStreamSpec> streams;
  std::vector<std::string> ranking;  // defaults to stream order
  ImuSpec imu;
  RangerSpec ranger;
  std::vector<FailureEvent> failures;
  std::vector<Vec3> mission;
  BehaviorConfig behavior;

  ProcessNoise filter_noise;
  double attitude_meas_var = 4e-4;
  double init_sigma_pos = 0.02;   // m, initial filter position uncertainty
  double init_sigma_vel = 0.05;   // m/s
  double init_sigma_att = 0.01;   // rad
  double init_sigma_bias = 0.01;
};

/// Parses and validates a scenario. Throws ConfigError with the offending
/// field path on any malformed or inconsistent entry.
ScenarioConfig load_scenario_file(const std::string& path);
ScenarioConfig parse_scenario_json(const std::string& text);
void validate_scenario(const ScenarioConfig& cfg);

struct RunResult {
  Telemetry telemetry;
  std::vector<std::string> violations;  // invariant breaches seen while running
};

/// Steps the full pipeline (plant -> streams -> health -> fusion -> mux ->
/// mobility) at tick_rate over the scenario duration. max_ticks truncates
/// the run when >= 0.
RunResult run_scenario(const ScenarioConfig& cfg, long max_ticks = -1);

}  // namespace hero

#endif  // HERO_SCENARIO_HPP
