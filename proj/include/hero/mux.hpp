#ifndef HERO_MUX_HPP
#define HERO_MUX_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hero/fusion.hpp"
#include "hero/geometry.hpp"
#include "hero/health.hpp"
#include "hero/mobility.hpp"
#include "hero/state.hpp"
#include "hero/streams.hpp"
#include "hero/supervisor.hpp"

namespace hero {

/// Stream priorities, highest first. Must cover every configured stream,
/// no duplicates.
struct Ranking {
  std::vector<std::string> order;

  bool contains(const std::string& id) const;
  /// Position in the ranking; lower is higher priority.
  std::size_t rank_of(const std::string& id) const;
};

/// World-from-stream-origin pose per (stream, init epoch). Every stream
/// epoch that contributes to the published output has an entry.
class AnchorTable {
 public:
  void set(const std::string& stream, int epoch, const Pose& anchor);
  bool has(const std::string& stream, int epoch) const;
  const Pose& get(const std::string& stream, int epoch) const;  // throws MissingAnchor

 private:
  std::map<std::pair<std::string, int>, Pose> anchors_;
};

/// Maps a stream-local message pose into the world frame through the
/// stream's anchor. Throws MissingAnchor if no anchor exists for the
/// message's (stream, epoch).
Pose apply_continuity(const AnchorTable& anchors, const OdometryMessage& msg);

/// Installs anchor = last_output * inverse(first_new_pose) for
/// (stream, epoch), so that first_new_pose maps exactly onto last_output.
/// Returns the new anchor.
Pose rebase_anchor(AnchorTable& anchors, const std::string& stream, int epoch,
                   const Pose& last_output, const Pose& first_new_pose);

/// Ranked selection with switch minimization: keep the current channel
/// while it is Healthy, otherwise take the highest-ranked Healthy stream,
/// otherwise none. With allow_preempt a recovered higher-priority stream
/// takes over even when the current one is still Healthy.
std::optional<std::string> select_channel(
    const std::map<std::string, StreamState>& statuses, const Ranking& ranking,
    const std::optional<std::string>& current, bool allow_preempt = false);

enum class StreamKind { PoseOnly, PoseVelocity, VelocityOnly };

const char* to_string(StreamKind k);

struct MuxStreamConfig {
  std::string id;
  StreamKind kind = StreamKind::PoseOnly;
  CheckConfig checks;
  LifecycleConfig lifecycle;
};

struct MuxConfig {
  std::vector<MuxStreamConfig> streams;
  Ranking ranking;
  double tick_rate = 100.0;  // Hz
  double v_max = 2.0;        // m/s, used for the continuity audit
  bool allow_preempt = false;
  double imu_rate = 200.0;   // Hz, for IMU gap detection
  double imu_gap_factor = 3.0;
  ProcessNoise imu_noise;
  double attitude_meas_var = 4e-4;
  FilterState initial;       // shared initial state for all stream filters
};

struct RangerSample {
  double stamp = 0.0;
  double range = 0.0;  // m, slant range along body -z
  double var = 1e-4;
};

struct TickInputs {
  double now = 0.0;
  std::vector<OdometryMessage> messages;  // time ordered
  std::vector<ImuSample> imu;             // time ordered
  std::optional<RangerSample> ranger;
};

struct MuxOutput {
  RobotState state;
  StateQuality quality;
  std::optional<std::string> channel;
  std::vector<std::string> reinit_commands;
  MobilityService service_hint = MobilityService::Attitude;
};

struct MuxEvent {
  enum class Kind { Switch, ReinitCommand, StreamRestarted, FailureDetected };
  Kind kind;
  double stamp = 0.0;
  std::string stream;           // new channel for Switch
  std::string previous;         // previous channel for Switch
  std::optional<CheckId> check; // for FailureDetected
  double detail = 0.0;
};

/// The resiliency logic: supervises all streams, commands re-initialization
/// of failed ones, multiplexes the best fused estimate into one continuous
/// output and publishes it with its quality.
class ResiliencyMux {
 public:
  explicit ResiliencyMux(MuxConfig cfg);

  /// Advances one tick. Inputs carry everything that arrived in
  /// (previous tick, now].
  MuxOutput step(const TickInputs& inputs);

  const StreamStatus& stream_status(const std::string& id) const;
  std::map<std::string, StreamState> states() const;
  const std::optional<std::string>& channel() const { return channel_; }
  const AnchorTable& anchors() const { return anchors_; }

  /// Events emitted since the last drain (switches, reinits, detections).
  std::vector<MuxEvent> drain_events();

  /// Invariant violations detected during stepping (continuity bound,
  /// selection correctness). Empty on a healthy run.
  const std::vector<std::string>& violations() const { return violations_; }

  /// Verdicts evaluated at the most recent tick, per stream.
  const std::map<std::string, std::vector<CheckResult>>& last_verdicts() const {
    return last_verdicts_;
  }

 private:
  struct StreamRuntime {
    MuxStreamConfig cfg;
    StreamSupervisor supervisor;
    std::unique_ptr<ErrorStateFilter> filter;  // pose-bearing streams only
    std::optional<RobotState> jump_baseline;
    int baseline_epoch = 0;
    int last_seen_epoch = 0;
    std::optional<Pose> last_raw_pose;
    std::optional<Vec3> last_velocity;
    double last_velocity_stamp = -1.0;
  };

  StreamRuntime& runtime(const std::string& id);
  void predict_filters(const TickInputs& inputs);
  std::vector<CheckResult> message_checks(StreamRuntime& rt, const OdometryMessage& msg);
  void handle_epoch_advance(StreamRuntime& rt, const OdometryMessage& msg);
  void switch_to(const std::optional<std::string>& next, double now);
  RobotState publish(double now);
  StateQuality assess_quality(double now) const;
  void audit(const RobotState& out, double now);

  MuxConfig cfg_;
  double tick_dt_;
  std::map<std::string, StreamRuntime> streams_;
  AnchorTable anchors_;
  std::optional<std::string> channel_;
  Pose last_output_pose_;
  Vec3 last_output_vel_world_{Vec3::Zero()};
  bool have_output_ = false;

  std::unique_ptr<ErrorStateFilter> dead_reckon_;  // active when no pose channel
  double last_imu_stamp_ = 0.0;
  bool imu_seen_ = false;
  Vec3 last_gyro_{Vec3::Zero()};
  Vec3 last_accel_{Vec3::Zero()};
  Vec3 prev_omega_{Vec3::Zero()};
  double last_ranger_stamp_ = -1.0;

  std::vector<MuxEvent> events_;
  std::vector<std::string> violations_;
  std::map<std::string, std::vector<CheckResult>> last_verdicts_;
};

}  // namespace hero

#endif  // HERO_MUX_HPP
