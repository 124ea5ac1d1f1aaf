#ifndef HERO_MOBILITY_HPP
#define HERO_MOBILITY_HPP

#include <optional>
#include <vector>

#include "hero/state.hpp"
#include "hero/types.hpp"

namespace hero {

/// Mobility capability classes, ordered: a larger value means a more
/// capable service.
enum class MobilityService {
  OpenLoopLand = 0,
  Attitude = 1,
  ClosedLoopZ = 2,
  Local = 3,
  Global = 4,
};

const char* to_string(MobilityService s);

/// Capability rule over the five quality bits:
///   att Bad                     -> OpenLoopLand
///   all Good                    -> Global
///   vxy Good                    -> Local
///   gz Good or vz Good          -> ClosedLoopZ
///   otherwise                   -> Attitude
/// Total over all 32 combinations and monotone in every bit.
MobilityService map_quality_to_service(const StateQuality& q);

enum class Behavior { TakeOff, WaypointNav, VelocityHold, HoverZ, AttitudeLand, Landed };

const char* to_string(Behavior b);

struct ControlCommand {
  enum class Mode { TrackMission, HoldVelocity, HoldAltitude, Descend, Idle };
  Mode mode = Mode::Idle;
  Vec3 velocity_world{Vec3::Zero()};  // HoldVelocity setpoint
  double target_z = 0.0;              // HoldAltitude setpoint
  double vertical_rate = 0.0;         // Descend / TakeOff feed, signed

  // Which state blocks this command closes a loop on; auditable against
  // the quality bits in telemetry.
  bool closes_p = false;
  bool closes_gz = false;
  bool closes_vxy = false;
  bool closes_vz = false;
  bool closes_att = false;
};

struct BehaviorConfig {
  double safety_timeout = 3.0;  // s of dead reckoning before forced landing
  double descent_rate = 0.5;    // m/s during AttitudeLand
  double takeoff_rate = 0.5;    // m/s during TakeOff
  double waypoint_gain = 1.0;   // 1/s proportional gain on position error
  double cruise_speed = 1.0;    // m/s cap on commanded velocity
  double accept_radius = 0.2;   // m to consider a waypoint reached
  double ground_alt = 0.05;     // m altitude treated as touched down
};

/// Behavior state machine driven by the mobility service each tick.
/// AttitudeLand is absorbing until touchdown, then Landed.
class BehaviorMachine {
 public:
  explicit BehaviorMachine(BehaviorConfig cfg, bool start_on_ground = false);

  ControlCommand step(MobilityService service, const RobotState& est,
                      const StateQuality& q, const std::vector<Vec3>& mission, double now);

  Behavior behavior() const { return behavior_; }
  std::optional<double> dead_reckon_since() const { return dead_reckon_since_; }
  std::size_t waypoint_index() const { return wp_index_; }

 private:
  ControlCommand command_for(MobilityService service, const RobotState& est,
                             const StateQuality& q, const std::vector<Vec3>& mission);

  BehaviorConfig cfg_;
  Behavior behavior_;
  std::optional<double> dead_reckon_since_;
  std::optional<double> hold_z_;
  std::size_t wp_index_ = 0;
};

}  // namespace hero

#endif  // HERO_MOBILITY_HPP
