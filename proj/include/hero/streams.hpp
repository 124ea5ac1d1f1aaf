#ifndef HERO_STREAMS_HPP
#define HERO_STREAMS_HPP

#include <optional>
#include <string>

#include "hero/geometry.hpp"
#include "hero/state.hpp"

namespace hero {

/// Hardware-level statistics attached to an odometry output, used by the
/// sensor-data confidence check.
struct SensorStats {
  double output_rate = 0.0;      // Hz
  double intensity_mean = 0.0;   // [0, 1]
  double intensity_var = 0.0;
  double invalid_fraction = 0.0; // invalid scan points / total

  bool finite() const;
};

/// One stamped output of one odometry stream. The pose is expressed in the
/// stream's local frame, i.e. relative to its origin at the last
/// (re-)initialization; init_epoch counts those re-initializations.
struct OdometryMessage {
  std::string stream_id;
  double stamp = 0.0;
  std::optional<Pose> pose;
  std::optional<Vec3> velocity;          // body frame
  std::optional<Vec3> angular_velocity;  // body frame
  std::optional<CovarianceBlock> covariance;
  std::optional<SensorStats> sensor_stats;
  int init_epoch = 0;

  bool has_payload() const { return pose.has_value() || velocity.has_value(); }
};

}  // namespace hero

#endif  // HERO_STREAMS_HPP
