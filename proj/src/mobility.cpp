#include "hero/mobility.hpp"

#include <algorithm>

namespace hero {

const char* to_string(MobilityService s) {
  switch (s) {
    case MobilityService::Global: return "global";
    case MobilityService::Local: return "local";
    case MobilityService::ClosedLoopZ: return "closed_loop_z";
    case MobilityService::Attitude: return "attitude";
    case MobilityService::OpenLoopLand: return "open_loop_land";
  }
  return "?";
}

const char* to_string(Behavior b) {
  switch (b) {
    case Behavior::TakeOff: return "takeoff";
    case Behavior::WaypointNav: return "waypoint_nav";
    case Behavior::VelocityHold: return "velocity_hold";
    case Behavior::HoverZ: return "hover_z";
    case Behavior::AttitudeLand: return "attitude_land";
    case Behavior::Landed: return "landed";
  }
  return "?";
}

MobilityService map_quality_to_service(const StateQuality& q) {
  if (q.att == Q::Bad) return MobilityService::OpenLoopLand;
  if (q.p == Q::Good && q.gz == Q::Good && q.vxy == Q::Good && q.vz == Q::Good) {
    return MobilityService::Global;
  }
  if (q.vxy == Q::Good) return MobilityService::Local;
  if (q.gz == Q::Good || q.vz == Q::Good) return MobilityService::ClosedLoopZ;
  return MobilityService::Attitude;
}

BehaviorMachine::BehaviorMachine(BehaviorConfig cfg, bool start_on_ground)
    : cfg_(cfg), behavior_(start_on_ground ? Behavior::TakeOff : Behavior::WaypointNav) {}

ControlCommand BehaviorMachine::step(MobilityService service, const RobotState& est,
                                     const StateQuality& q,
                                     const std::vector<Vec3>& mission, double now) {
  if (behavior_ == Behavior::Landed) {
    return ControlCommand{};
  }

  if (behavior_ == Behavior::AttitudeLand) {
    if (est.p.z() <= cfg_.ground_alt) {
      behavior_ = Behavior::Landed;
      return ControlCommand{};
    }
    ControlCommand cmd;
    cmd.mode = ControlCommand::Mode::Descend;
    cmd.vertical_rate = -cfg_.descent_rate;
    cmd.closes_att = q.att == Q::Good;
    return cmd;
  }

  if (service == MobilityService::OpenLoopLand) {
    // IMU failure: commit to an immediate open-loop landing.
    behavior_ = Behavior::AttitudeLand;
    ControlCommand cmd;
    cmd.mode = ControlCommand::Mode::Descend;
    cmd.vertical_rate = -cfg_.descent_rate;
    return cmd;
  }

  if (static_cast<int>(service) < static_cast<int>(MobilityService::Local)) {
    if (!dead_reckon_since_) dead_reckon_since_ = now;
    if (now - *dead_reckon_since_ >= cfg_.safety_timeout) {
      behavior_ = Behavior::AttitudeLand;
      ControlCommand cmd;
      cmd.mode = ControlCommand::Mode::Descend;
      cmd.vertical_rate = -cfg_.descent_rate;
      cmd.closes_att = true;
      return cmd;
    }
  } else {
    dead_reckon_since_.reset();
  }

  return command_for(service, est, q, mission);
}

ControlCommand BehaviorMachine::command_for(MobilityService service, const RobotState& est,
                                            const StateQuality& q,
                                            const std::vector<Vec3>& mission) {
  ControlCommand cmd;
  switch (service) {
    case MobilityService::Global: {
      if (behavior_ == Behavior::TakeOff) {
        const double target_z = mission.empty() ? 1.0 : mission.front().z();
        if (est.p.z() < target_z - cfg_.accept_radius) {
          cmd.mode = ControlCommand::Mode::Descend;
          cmd.vertical_rate = cfg_.takeoff_rate;
          cmd.closes_gz = true;
          cmd.closes_att = true;
          return cmd;
        }
        behavior_ = Behavior::WaypointNav;
      }
      behavior_ = Behavior::WaypointNav;
      hold_z_.reset();
      cmd.mode = ControlCommand::Mode::TrackMission;
      if (!mission.empty()) {
        while (wp_index_ + 1 < mission.size() &&
               (mission[wp_index_] - est.p).norm() <= cfg_.accept_radius) {
          ++wp_index_;
        }
        Vec3 v = cfg_.waypoint_gain * (mission[wp_index_] - est.p);
        const double speed = v.norm();
        if (speed > cfg_.cruise_speed) v *= cfg_.cruise_speed / speed;
        cmd.velocity_world = v;
      }
      cmd.closes_p = cmd.closes_gz = cmd.closes_vxy = cmd.closes_vz = cmd.closes_att = true;
      return cmd;
    }
    case MobilityService::Local: {
      behavior_ = Behavior::VelocityHold;
      hold_z_.reset();
      cmd.mode = ControlCommand::Mode::HoldVelocity;
      cmd.velocity_world = Vec3::Zero();  // hover-in-place
      cmd.closes_vxy = true;
      cmd.closes_vz = q.vz == Q::Good;
      cmd.closes_gz = q.gz == Q::Good;  // logged; behavior identical either way
      cmd.closes_att = true;
      return cmd;
    }
    case MobilityService::ClosedLoopZ: {
      behavior_ = Behavior::HoverZ;
      if (!hold_z_) hold_z_ = est.p.z();
      cmd.mode = ControlCommand::Mode::HoldAltitude;
      cmd.target_z = *hold_z_;
      cmd.closes_gz = q.gz == Q::Good;
      cmd.closes_vz = q.vz == Q::Good;
      cmd.closes_att = true;
      return cmd;
    }
    case MobilityService::Attitude: {
      // Precautionary slow descent on attitude only; the committed
      // AttitudeLand follows if the service does not recover in time.
      behavior_ = Behavior::VelocityHold;
      hold_z_.reset();
      cmd.mode = ControlCommand::Mode::Descend;
      cmd.vertical_rate = -cfg_.descent_rate;
      cmd.closes_att = true;
      return cmd;
    }
    case MobilityService::OpenLoopLand:
      break;  // handled by the caller
  }
  return cmd;
}

}  // namespace hero
