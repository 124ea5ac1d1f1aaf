#ifndef HERO_HEALTH_HPP
#define HERO_HEALTH_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hero/state.hpp"
#include "hero/streams.hpp"

namespace hero {

enum class CheckId { Rate, Jump, Divergence, SensorData, Vote };

enum class Verdict { Pass, SoftFail, HardFail };

const char* to_string(CheckId id);
const char* to_string(Verdict v);

/// Thresholds for all confidence checks. Values are configuration, not
/// claims; they are tuned per stream in the scenario file.
struct CheckConfig {
  double nominal_rate = 20.0;        // Hz
  double gap_factor = 3.0;           // periods of silence tolerated
  double v_max = 2.0;                // m/s, platform kinematic bound
  double jump_margin = 0.1;          // m, noise allowance on jump bound
  double cov_trace_max = 0.5;        // m^2, position covariance trace
  double intensity_min = 0.05;
  double intensity_var_min = 1e-4;
  double invalid_fraction_max = 0.5;
  double vote_k = 3.0;               // MAD multiplier
  double mad_floor = 0.05;           // m/s, lower bound on the MAD scale

  bool valid() const;
};

struct CheckResult {
  CheckId check_id = CheckId::Rate;
  Verdict verdict = Verdict::Pass;
  double detail = 0.0;  // the measured value the verdict was based on
};

/// Gap detection. Pass while the silence is at most gap_factor periods,
/// SoftFail up to 2*gap_factor, HardFail beyond. Boundaries are inclusive
/// on the passing side.
CheckResult rate_check(double last_stamp, double now, const CheckConfig& cfg);

/// Jump detection: HardFail when the position step exceeds
/// v_max * dt + jump_margin. Poses are only comparable within one init
/// epoch; throws EpochMismatch otherwise.
CheckResult jump_check(const RobotState& prev, int prev_epoch, const OdometryMessage& msg,
                       const CheckConfig& cfg);

/// Divergence detection on the trace of the position covariance block.
/// Throws InvalidCovariance when the block violates symmetry/PSD.
CheckResult divergence_check(const CovarianceBlock& cov, const CheckConfig& cfg);

/// Hardware-level screening of sensor statistics; failures are soft
/// (degraded but usable).
CheckResult sensor_data_check(const SensorStats& stats, const CheckConfig& cfg);

/// Cross-stream voting on body-frame velocities. Per axis, a stream is an
/// outlier when it deviates from the median by more than
/// vote_k * max(MAD, mad_floor). Requires at least three entries; throws
/// InsufficientStreams otherwise (skipped, not failed).
std::map<std::string, CheckResult> voting_check(
    const std::vector<std::pair<std::string, Vec3>>& velocities, const CheckConfig& cfg);

/// Median / median-absolute-deviation helpers used by the voting check.
double median(std::vector<double> values);
double median_absolute_deviation(const std::vector<double>& values, double med);

}  // namespace hero

#endif  // HERO_HEALTH_HPP
