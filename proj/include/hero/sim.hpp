#ifndef HERO_SIM_HPP
#define HERO_SIM_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hero/fusion.hpp"
#include "hero/geometry.hpp"
#include "hero/mobility.hpp"
#include "hero/mux.hpp"
#include "hero/state.hpp"
#include "hero/streams.hpp"

namespace hero {

/// Deterministic generator with label-forked substreams: a child stream
/// depends only on the parent seed and the label, never on draw order, so
/// adding a stream does not perturb the noise any other stream sees.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  Rng fork(const std::string& label) const;

  double uniform();   // [0, 1)
  double gaussian();  // standard normal, Box-Muller
  Vec3 gaussian3(double sigma);

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

struct TrajectorySpec {
  enum class Kind { Hover, Line, Circle, TunnelPath };
  Kind kind = Kind::Hover;
  double duration = 10.0;  // s
  double speed = 0.0;      // m/s along the path
  Vec3 start{0.0, 0.0, 1.5};
  Vec3 direction{1.0, 0.0, 0.0};  // Line
  Vec3 center{0.0, 0.0, 1.5};    // Circle
  double radius = 2.0;            // Circle
  std::vector<Vec3> path;         // TunnelPath vertices
  double yaw0 = 0.0;
};

/// Analytic trajectory sample with exact derivatives: v is the time
/// derivative of p, a of v, and w is consistent with r.
/// Throws OutOfRange for t outside [0, duration].
RobotState ground_truth(const TrajectorySpec& spec, double t);

enum class FailureMode { Gap, Jump, Divergence, Drift, SensorDegrade };

const char* to_string(FailureMode m);

struct FailureEvent {
  std::string stream_id;
  double t_start = 0.0;
  double t_end = 0.0;
  FailureMode mode = FailureMode::Gap;
  Vec3 jump_offset{Vec3::Zero()};   // m, Jump
  double cov_growth = 0.0;          // m^2/s, Divergence
  Vec3 drift_bias{Vec3::Zero()};    // m/s, Drift
  SensorStats degraded_stats;       // SensorDegrade override

  bool active(double t) const { return t >= t_start && t < t_end; }
};

struct SimStreamSpec {
  std::string id;
  StreamKind kind = StreamKind::PoseOnly;
  double rate = 20.0;       // Hz
  double sigma_pos = 0.01;  // m
  double sigma_rot = 0.002; // rad
  double sigma_vel = 0.02;  // m/s
  double base_cov = 1e-4;   // m^2, reported position covariance diagonal
  CheckConfig checks;
  LifecycleConfig lifecycle;
  SensorStats nominal_stats{20.0, 0.6, 0.02, 0.01};
};

struct ImuSpec {
  double rate = 200.0;
  double sigma_gyro = 0.002;   // rad/s
  double sigma_accel = 0.02;   // m/s^2
  Vec3 bias_gyro{Vec3::Zero()};
  Vec3 bias_accel{Vec3::Zero()};
};

struct RangerSpec {
  bool enabled = false;
  double rate = 25.0;
  double sigma = 0.01;  // m
};

/// Synthesizes one odometry stream: emits at its own rate, restarts with a
/// fresh origin and incremented epoch on command, and realizes the injected
/// failure modes.
class SyntheticStream {
 public:
  SyntheticStream(SimStreamSpec spec, Rng rng, const Pose& initial_origin);

  /// One poll per tick; emits when a sample is due in (prev tick, now].
  std::optional<OdometryMessage> poll(double now, const RobotState& actual,
                                      const std::vector<const FailureEvent*>& active);

  void command_reinit(double now);

  int epoch() const { return epoch_; }
  const Pose& origin() const { return origin_; }

 private:
  SimStreamSpec spec_;
  Rng rng_;
  Pose origin_;
  int epoch_ = 0;
  double next_emit_ = 0.0;
  double period_;
  std::optional<double> reinit_until_;
};

/// IMU sample synthesis at one instant: gyro = w + bias + noise, accel is
/// specific force (kinematic acceleration minus gravity, in body axes).
ImuSample simulate_imu(const RobotState& actual, const ImuSpec& spec, Rng& rng);

/// Plant integrator: follows the scripted trajectory while the mission is
/// being tracked, brakes to a hover when told to hold, and descends when
/// landing. Velocity is rate-limited so the IMU never sees impulsive
/// accelerations.
class ActualKinematics {
 public:
  ActualKinematics(TrajectorySpec spec, double tick_dt, double max_accel = 4.0);

  void step(const ControlCommand& cmd, double now);
  const RobotState& state() const { return state_; }

 private:
  TrajectorySpec spec_;
  double dt_;
  double max_accel_;
  RobotState state_;
  Vec3 v_world_{Vec3::Zero()};
  double script_clock_ = 0.0;
  Vec3 prev_omega_{Vec3::Zero()};
};

}  // namespace hero

#endif  // HERO_SIM_HPP
