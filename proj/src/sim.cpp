#include "hero/sim.hpp"

#include <algorithm>
#include <cmath>

#include "hero/errors.hpp"

namespace hero {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

constexpr double kTimeEps = 1e-9;

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

Rng Rng::fork(const std::string& label) const {
  return Rng(splitmix64(seed_ ^ fnv1a(label)));
}

double Rng::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
}

double Rng::gaussian() {
  // Box-Muller; two uniforms per draw keeps the stream layout trivial.
  double u1 = uniform();
  const double u2 = uniform();
  if (u1 <= 0.0) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Vec3 Rng::gaussian3(double sigma) {
  return Vec3(sigma * gaussian(), sigma * gaussian(), sigma * gaussian());
}

const char* to_string(FailureMode m) {
  switch (m) {
    case FailureMode::Gap: return "gap";
    case FailureMode::Jump: return "jump";
    case FailureMode::Divergence: return "divergence";
    case FailureMode::Drift: return "drift";
    case FailureMode::SensorDegrade: return "sensor_degrade";
  }
  return "?";
}

RobotState ground_truth(const TrajectorySpec& spec, double t) {
  if (t < -kTimeEps || t > spec.duration + kTimeEps) {
    throw OutOfRange("trajectory time " + std::to_string(t) + " outside [0, " +
                     std::to_string(spec.duration) + "]");
  }
  RobotState s;
  s.stamp = t;
  switch (spec.kind) {
    case TrajectorySpec::Kind::Hover: {
      s.p = spec.start;
      s.r = UnitRotation::from_yaw_pitch_roll(spec.yaw0, 0.0, 0.0);
      break;
    }
    case TrajectorySpec::Kind::Line: {
      const Vec3 dir = spec.direction.normalized();
      s.p = spec.start + dir * spec.speed * t;
      const double yaw = std::atan2(dir.y(), dir.x());
      s.r = UnitRotation::from_yaw_pitch_roll(yaw, 0.0, 0.0);
      const Vec3 v_world = dir * spec.speed;
      s.v = s.r.matrix().transpose() * v_world;
      break;
    }
    case TrajectorySpec::Kind::Circle: {
      const double omega = spec.radius > 0.0 ? spec.speed / spec.radius : 0.0;
      const double th = omega * t;
      s.p = spec.center + spec.radius * Vec3(std::cos(th), std::sin(th), 0.0);
      const double yaw = th + M_PI / 2.0;  // tangent heading
      s.r = UnitRotation::from_yaw_pitch_roll(yaw, 0.0, 0.0);
      const Vec3 v_world =
          spec.radius * omega * Vec3(-std::sin(th), std::cos(th), 0.0);
      const Vec3 a_world =
          -spec.radius * omega * omega * Vec3(std::cos(th), std::sin(th), 0.0);
      const Mat3 Rt = s.r.matrix().transpose();
      s.v = Rt * v_world;
      s.a = Rt * a_world;
      s.w = Vec3(0.0, 0.0, omega);
      break;
    }
    case TrajectorySpec::Kind::TunnelPath: {
      if (spec.path.size() < 2) throw OutOfRange("tunnel path needs >= 2 vertices");
      double remaining = spec.speed * t;
      Vec3 a = spec.path.front();
      Vec3 dir = (spec.path[1] - spec.path[0]).normalized();
      for (std::size_t i = 0; i + 1 < spec.path.size(); ++i) {
        const Vec3 seg = spec.path[i + 1] - spec.path[i];
        const double len = seg.norm();
        if (remaining <= len || i + 2 == spec.path.size()) {
          a = spec.path[i] + seg.normalized() * std::min(remaining, len);
          dir = seg.normalized();
          break;
        }
        remaining -= len;
      }
      s.p = a;
      const double yaw = std::atan2(dir.y(), dir.x());
      s.r = UnitRotation::from_yaw_pitch_roll(yaw, 0.0, 0.0);
      s.v = s.r.matrix().transpose() * (dir * spec.speed);
      break;
    }
  }
  return s;
}

SyntheticStream::SyntheticStream(SimStreamSpec spec, Rng rng, const Pose& initial_origin)
    : spec_(std::move(spec)), rng_(std::move(rng)), origin_(initial_origin),
      period_(1.0 / spec_.rate) {}

void SyntheticStream::command_reinit(double now) {
  reinit_until_ = now + spec_.lifecycle.reinit_delay;
}

std::optional<OdometryMessage> SyntheticStream::poll(
    double now, const RobotState& actual, const std::vector<const FailureEvent*>& active) {
  if (reinit_until_) {
    if (now + kTimeEps < *reinit_until_) return std::nullopt;
    // Restart: fresh origin at the pose of the re-init instant.
    epoch_ += 1;
    origin_ = actual.pose();
    next_emit_ = *reinit_until_;
    reinit_until_.reset();
  }
  if (now + kTimeEps < next_emit_) return std::nullopt;
  next_emit_ += period_;

  const FailureEvent* gap = nullptr;
  const FailureEvent* jump = nullptr;
  const FailureEvent* divergence = nullptr;
  const FailureEvent* drift = nullptr;
  const FailureEvent* degrade = nullptr;
  for (const auto* ev : active) {
    switch (ev->mode) {
      case FailureMode::Gap: gap = ev; break;
      case FailureMode::Jump: jump = ev; break;
      case FailureMode::Divergence: divergence = ev; break;
      case FailureMode::Drift: drift = ev; break;
      case FailureMode::SensorDegrade: degrade = ev; break;
    }
  }
  if (gap) return std::nullopt;  // messages withheld, the emit grid advances

  OdometryMessage msg;
  msg.stream_id = spec_.id;
  msg.stamp = now;
  msg.init_epoch = epoch_;

  if (spec_.kind != StreamKind::VelocityOnly) {
    Pose local = compose(inverse(origin_), actual.pose());
    local.t += rng_.gaussian3(spec_.sigma_pos);
    local.r = local.r * UnitRotation::exp(rng_.gaussian3(spec_.sigma_rot));
    if (jump) local.t += jump->jump_offset;
    if (drift) local.t += drift->drift_bias * (now - drift->t_start);
    msg.pose = local;
  }
  if (spec_.kind != StreamKind::PoseOnly) {
    Vec3 v = actual.v + rng_.gaussian3(spec_.sigma_vel);
    if (drift) v += drift->drift_bias;
    msg.velocity = v;
    msg.angular_velocity = actual.w;
  }

  CovarianceBlock cov;
  double pos_var = spec_.base_cov;
  if (divergence) pos_var += divergence->cov_growth * (now - divergence->t_start);
  cov.position = Mat3::Identity() * pos_var;
  cov.velocity = Mat3::Identity() * std::max(spec_.sigma_vel * spec_.sigma_vel, 1e-6);
  msg.covariance = cov;

  SensorStats stats = spec_.nominal_stats;
  stats.output_rate = spec_.rate;
  if (degrade) stats = degrade->degraded_stats;
  msg.sensor_stats = stats;
  return msg;
}

ImuSample simulate_imu(const RobotState& actual, const ImuSpec& spec, Rng& rng) {
  ImuSample s;
  s.stamp = actual.stamp;
  s.gyro = actual.w + spec.bias_gyro + rng.gaussian3(spec.sigma_gyro);
  const Mat3 Rt = actual.r.matrix().transpose();
  s.accel = actual.a - Rt * gravity() + spec.bias_accel + rng.gaussian3(spec.sigma_accel);
  return s;
}

ActualKinematics::ActualKinematics(TrajectorySpec spec, double tick_dt, double max_accel)
    : spec_(std::move(spec)), dt_(tick_dt), max_accel_(max_accel) {
  state_ = ground_truth(spec_, 0.0);
  v_world_ = state_.r.rotate(state_.v);
}

void ActualKinematics::step(const ControlCommand& cmd, double now) {
  Vec3 target_v = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
  bool track = false;

  switch (cmd.mode) {
    case ControlCommand::Mode::TrackMission: {
      track = true;
      const double t_script = std::min(script_clock_, spec_.duration);
      const RobotState ref = ground_truth(spec_, t_script);
      target_v = ref.r.rotate(ref.v);
      omega = ref.w;
      break;
    }
    case ControlCommand::Mode::HoldVelocity:
      target_v = cmd.velocity_world;
      break;
    case ControlCommand::Mode::HoldAltitude: {
      const double vz = std::clamp(1.0 * (cmd.target_z - state_.p.z()), -0.5, 0.5);
      target_v = Vec3(0.0, 0.0, vz);
      break;
    }
    case ControlCommand::Mode::Descend:
      target_v = Vec3(0.0, 0.0, cmd.vertical_rate);
      break;
    case ControlCommand::Mode::Idle:
      target_v = Vec3::Zero();
      break;
  }

  // Rate-limited velocity, so acceleration stays bounded.
  Vec3 dv = target_v - v_world_;
  const double dv_max = max_accel_ * dt_;
  if (dv.norm() > dv_max) dv *= dv_max / dv.norm();
  const Vec3 a_world = dv / dt_;
  v_world_ += dv;

  state_.p += v_world_ * dt_;
  if (state_.p.z() <= 0.0 && v_world_.z() < 0.0) {
    state_.p.z() = 0.0;
    v_world_.setZero();
  }

  if (track) {
    // The script clock advances with the achieved speed so the scripted
    // heading stays aligned with the integrated position during ramps.
    const double script_speed = std::max(spec_.speed, 1e-9);
    const double ratio =
        spec_.speed > 1e-9 ? std::clamp(v_world_.norm() / script_speed, 0.0, 1.0) : 1.0;
    script_clock_ = std::min(script_clock_ + ratio * dt_, spec_.duration);
    omega *= ratio;
  }

  state_.r = state_.r * UnitRotation::exp(omega * dt_);
  const Mat3 Rt = state_.r.matrix().transpose();
  state_.v = Rt * v_world_;
  state_.a = Rt * a_world;
  state_.alpha = (omega - prev_omega_) / dt_;
  state_.w = omega;
  prev_omega_ = omega;
  state_.stamp = now;
}

}  // namespace hero
