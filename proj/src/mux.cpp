#include "hero/mux.hpp"

#include <algorithm>
#include <set>

#include "hero/errors.hpp"

namespace hero {

namespace {
constexpr double kContinuityEps = 1e-6;  // m, slack on the continuity bound
constexpr double kDefaultMeasSigma = 0.02;
constexpr double kMaxPredictDt = 0.1;

double cos_tilt(const UnitRotation& r) {
  return std::max(0.2, r.matrix()(2, 2));
}
}  // namespace

const char* to_string(StreamKind k) {
  switch (k) {
    case StreamKind::PoseOnly: return "pose";
    case StreamKind::PoseVelocity: return "pose_velocity";
    case StreamKind::VelocityOnly: return "velocity";
  }
  return "?";
}

bool Ranking::contains(const std::string& id) const {
  return std::find(order.begin(), order.end(), id) != order.end();
}

std::size_t Ranking::rank_of(const std::string& id) const {
  const auto it = std::find(order.begin(), order.end(), id);
  return static_cast<std::size_t>(it - order.begin());
}

void AnchorTable::set(const std::string& stream, int epoch, const Pose& anchor) {
  anchors_[{stream, epoch}] = anchor;
}

bool AnchorTable::has(const std::string& stream, int epoch) const {
  return anchors_.count({stream, epoch}) > 0;
}

const Pose& AnchorTable::get(const std::string& stream, int epoch) const {
  const auto it = anchors_.find({stream, epoch});
  if (it == anchors_.end()) {
    throw MissingAnchor("no anchor for stream " + stream + " epoch " + std::to_string(epoch));
  }
  return it->second;
}

Pose apply_continuity(const AnchorTable& anchors, const OdometryMessage& msg) {
  return compose(anchors.get(msg.stream_id, msg.init_epoch), msg.pose.value());
}

Pose rebase_anchor(AnchorTable& anchors, const std::string& stream, int epoch,
                   const Pose& last_output, const Pose& first_new_pose) {
  const Pose anchor = compose(last_output, inverse(first_new_pose));
  anchors.set(stream, epoch, anchor);
  return anchor;
}

std::optional<std::string> select_channel(const std::map<std::string, StreamState>& statuses,
                                          const Ranking& ranking,
                                          const std::optional<std::string>& current,
                                          bool allow_preempt) {
  if (!allow_preempt && current && statuses.at(*current) == StreamState::Healthy) {
    return current;
  }
  for (const auto& id : ranking.order) {
    if (statuses.at(id) == StreamState::Healthy) return id;
  }
  return std::nullopt;
}

ResiliencyMux::ResiliencyMux(MuxConfig cfg)
    : cfg_(std::move(cfg)), tick_dt_(1.0 / cfg_.tick_rate) {
  if (cfg_.streams.empty()) throw ConfigError("streams", "at least one stream required");
  std::set<std::string> ranked(cfg_.ranking.order.begin(), cfg_.ranking.order.end());
  if (ranked.size() != cfg_.ranking.order.size()) {
    throw ConfigError("ranking", "duplicate stream ids");
  }
  const Pose initial_pose{cfg_.initial.p, cfg_.initial.r};
  for (const auto& sc : cfg_.streams) {
    if (!ranked.count(sc.id)) throw ConfigError("ranking", "missing stream " + sc.id);
    StreamRuntime rt{sc, StreamSupervisor(sc.id, sc.lifecycle), nullptr, {}, 0, 0, {}, {}, -1.0};
    if (sc.kind != StreamKind::VelocityOnly) {
      rt.filter = std::make_unique<ErrorStateFilter>(cfg_.initial, cfg_.imu_noise,
                                                     cfg_.attitude_meas_var);
      rt.filter->reset_from(initial_pose);
      anchors_.set(sc.id, 0, initial_pose);
    }
    streams_.emplace(sc.id, std::move(rt));
  }
  if (ranked.size() != streams_.size()) {
    throw ConfigError("ranking", "ranking must cover exactly the configured streams");
  }
  last_output_pose_ = initial_pose;
  last_output_vel_world_ = cfg_.initial.v;
}

ResiliencyMux::StreamRuntime& ResiliencyMux::runtime(const std::string& id) {
  return streams_.at(id);
}

const StreamStatus& ResiliencyMux::stream_status(const std::string& id) const {
  return streams_.at(id).supervisor.status();
}

std::map<std::string, StreamState> ResiliencyMux::states() const {
  std::map<std::string, StreamState> out;
  for (const auto& [id, rt] : streams_) out[id] = rt.supervisor.state();
  return out;
}

std::vector<MuxEvent> ResiliencyMux::drain_events() {
  std::vector<MuxEvent> out;
  out.swap(events_);
  return out;
}

void ResiliencyMux::predict_filters(const TickInputs& inputs) {
  for (const auto& s : inputs.imu) {
    if (!imu_seen_) {
      imu_seen_ = true;
      last_imu_stamp_ = s.stamp;
      last_gyro_ = s.gyro;
      last_accel_ = s.accel;
      continue;
    }
    const double dt = s.stamp - last_imu_stamp_;
    last_imu_stamp_ = s.stamp;
    last_gyro_ = s.gyro;
    last_accel_ = s.accel;
    if (dt <= 0.0) continue;
    if (dt > kMaxPredictDt) continue;  // IMU outage: resume without integrating the hole
    for (auto& [id, rt] : streams_) {
      if (rt.filter) rt.filter->predict(s, dt);
    }
    if (dead_reckon_) dead_reckon_->predict(s, dt);
  }
}

void ResiliencyMux::handle_epoch_advance(StreamRuntime& rt, const OdometryMessage& msg) {
  if (msg.init_epoch <= rt.last_seen_epoch) return;
  rt.last_seen_epoch = msg.init_epoch;
  rt.jump_baseline.reset();
  if (rt.filter && msg.pose) {
    // Keep the fused product continuous across the stream restart: the new
    // origin is placed so the first post-init sample lands on the filter's
    // current pose estimate.
    const Pose anchor = rebase_anchor(anchors_, msg.stream_id, msg.init_epoch,
                                      rt.filter->pose(), *msg.pose);
    rt.filter->reset_from(anchor);
  }
}

std::vector<CheckResult> ResiliencyMux::message_checks(StreamRuntime& rt,
                                                       const OdometryMessage& msg) {
  std::vector<CheckResult> verdicts;
  verdicts.push_back(
      rate_check(rt.supervisor.status().last_msg_stamp, msg.stamp, rt.cfg.checks));
  if (msg.pose) {
    if (rt.jump_baseline && rt.baseline_epoch == msg.init_epoch &&
        rt.jump_baseline->stamp < msg.stamp) {
      verdicts.push_back(jump_check(*rt.jump_baseline, rt.baseline_epoch, msg, rt.cfg.checks));
    }
    RobotState base;
    base.stamp = msg.stamp;
    base.p = msg.pose->t;
    base.r = msg.pose->r;
    rt.jump_baseline = base;
    rt.baseline_epoch = msg.init_epoch;
  }
  if (msg.covariance) {
    verdicts.push_back(divergence_check(*msg.covariance, rt.cfg.checks));
  }
  if (msg.sensor_stats) {
    verdicts.push_back(sensor_data_check(*msg.sensor_stats, rt.cfg.checks));
  }
  return verdicts;
}

void ResiliencyMux::switch_to(const std::optional<std::string>& next, double now) {
  if (have_output_) {
    // The very first selection is not a switch, nothing was published yet.
    events_.push_back(MuxEvent{MuxEvent::Kind::Switch, now, next.value_or("none"),
                               channel_.value_or("none"), std::nullopt, 0.0});
  }

  // Source filter carrying velocity and bias estimates into the new regime.
  const ErrorStateFilter* previous = nullptr;
  if (channel_) {
    const auto& rt = streams_.at(*channel_);
    if (rt.filter) previous = rt.filter.get();
  }
  if (!previous && dead_reckon_) previous = dead_reckon_.get();

  if (next && streams_.at(*next).filter) {
    auto& rt = streams_.at(*next);
    if (have_output_) {
      const Pose old_anchor = rt.filter->world_from_stream();
      const Pose implied_local = between(old_anchor, rt.filter->pose());
      const Pose new_anchor = rebase_anchor(anchors_, *next, rt.supervisor.epoch(),
                                            last_output_pose_, implied_local);
      const Pose delta = compose(new_anchor, inverse(old_anchor));
      rt.filter->transform_world_frame(delta);
    }
    dead_reckon_.reset();
  } else {
    // Velocity-only channel or no channel: dead-reckon from the last
    // published output, keeping the previous source's velocity and biases.
    std::unique_ptr<ErrorStateFilter> dr;
    if (previous) {
      dr = std::make_unique<ErrorStateFilter>(*previous);
    } else {
      dr = std::make_unique<ErrorStateFilter>(cfg_.initial, cfg_.imu_noise,
                                              cfg_.attitude_meas_var);
    }
    if (have_output_) {
      const Pose delta = compose(last_output_pose_, inverse(dr->pose()));
      dr->transform_world_frame(delta);
    }
    dead_reckon_ = std::move(dr);
  }
  channel_ = next;
}

RobotState ResiliencyMux::publish(double now) {
  const FilterState* fs = nullptr;
  if (channel_ && streams_.at(*channel_).filter) {
    fs = &streams_.at(*channel_).filter->state();
  } else {
    if (!dead_reckon_) {
      dead_reckon_ = std::make_unique<ErrorStateFilter>(cfg_.initial, cfg_.imu_noise,
                                                        cfg_.attitude_meas_var);
    }
    fs = &dead_reckon_->state();
  }

  RobotState st;
  st.stamp = now;
  st.p = fs->p;
  st.r = fs->r;
  const Mat3 Rt = fs->r.matrix().transpose();
  st.v = Rt * fs->v;
  st.w = last_gyro_ - fs->gyro_bias;
  st.a = last_accel_ - fs->accel_bias + Rt * gravity();
  st.alpha = (st.w - prev_omega_) / tick_dt_;
  prev_omega_ = st.w;
  return st;
}

StateQuality ResiliencyMux::assess_quality(double now) const {
  StateQuality q;  // all Bad
  const bool imu_ok =
      imu_seen_ && (now - last_imu_stamp_) <= cfg_.imu_gap_factor / cfg_.imu_rate;
  if (!imu_ok) return q;
  q.att = Q::Good;
  if (!channel_) return q;

  const auto& rt = streams_.at(*channel_);
  const bool pose_bearing = rt.filter != nullptr;
  const bool ranger_ok = last_ranger_stamp_ >= 0.0 && (now - last_ranger_stamp_) <= 0.5;
  q.p = pose_bearing ? Q::Good : Q::Bad;
  q.vxy = Q::Good;
  q.vz = Q::Good;
  q.gz = (pose_bearing || ranger_ok) ? Q::Good : Q::Bad;
  return q;
}

void ResiliencyMux::audit(const RobotState& out, double now) {
  if (have_output_) {
    const double step = (out.p - last_output_pose_.t).norm();
    const double bound = cfg_.v_max * tick_dt_ + kContinuityEps;
    if (step > bound) {
      violations_.push_back("continuity violated at t=" + std::to_string(now) + ": step " +
                            std::to_string(step) + " > " + std::to_string(bound));
    }
  }
  if (channel_ && streams_.at(*channel_).supervisor.state() != StreamState::Healthy) {
    violations_.push_back("non-healthy channel selected at t=" + std::to_string(now));
  }
}

MuxOutput ResiliencyMux::step(const TickInputs& inputs) {
  const double now = inputs.now;
  MuxOutput out;

  for (auto& [id, rt] : streams_) {
    if (rt.supervisor.poll_reinit(now)) {
      events_.push_back({MuxEvent::Kind::StreamRestarted, now, id, "", std::nullopt,
                         static_cast<double>(rt.supervisor.epoch())});
    }
  }

  predict_filters(inputs);

  if (inputs.ranger) {
    last_ranger_stamp_ = inputs.ranger->stamp;
    for (auto& [id, rt] : streams_) {
      if (!rt.filter) continue;
      const double c = cos_tilt(rt.filter->state().r);
      rt.filter->update_height(inputs.ranger->range * c, inputs.ranger->var);
    }
    if (dead_reckon_) {
      // Keeping the dead-reckoned altitude ranger-disciplined keeps later
      // splice anchors consistent with the height reference.
      const double c = cos_tilt(dead_reckon_->state().r);
      dead_reckon_->update_height(inputs.ranger->range * c, inputs.ranger->var);
    }
  }

  // Per-message checks first; voting joins after all fresh velocities are in.
  struct Pending {
    StreamRuntime* rt;
    const OdometryMessage* msg;
    std::vector<CheckResult> verdicts;
  };
  std::vector<Pending> pending;
  std::vector<std::pair<std::string, Vec3>> fresh_velocities;
  last_verdicts_.clear();
  for (const auto& msg : inputs.messages) {
    auto& rt = runtime(msg.stream_id);
    handle_epoch_advance(rt, msg);
    auto verdicts = message_checks(rt, msg);
    if (msg.velocity) {
      rt.last_velocity = msg.velocity;
      rt.last_velocity_stamp = msg.stamp;
      fresh_velocities.emplace_back(msg.stream_id, *msg.velocity);
    }
    if (msg.pose) rt.last_raw_pose = msg.pose;
    pending.push_back({&rt, &msg, std::move(verdicts)});
  }

  if (fresh_velocities.size() >= 3) {
    // Voting thresholds come from the top-ranked stream's configuration.
    const auto& vote_cfg = streams_.at(cfg_.ranking.order.front()).cfg.checks;
    const auto votes = voting_check(fresh_velocities, vote_cfg);
    for (auto& p : pending) {
      const auto it = votes.find(p.msg->stream_id);
      if (it != votes.end()) p.verdicts.push_back(it->second);
    }
  }

  std::set<std::string> had_message;
  for (auto& p : pending) {
    const bool hard = std::any_of(p.verdicts.begin(), p.verdicts.end(), [](const auto& v) {
      return v.verdict == Verdict::HardFail;
    });
    if (!hard && p.msg->pose && p.rt->filter) {
      CovarianceBlock cov;
      cov.position = Mat3::Identity() * kDefaultMeasSigma * kDefaultMeasSigma;
      if (p.msg->covariance) cov = *p.msg->covariance;
      p.rt->filter->update_stream_pose(*p.msg->pose, cov);
    }
    if (!hard && p.msg->velocity && channel_ == p.msg->stream_id &&
        p.rt->cfg.kind == StreamKind::VelocityOnly && dead_reckon_) {
      Mat3 vcov = Mat3::Identity() * kDefaultMeasSigma * kDefaultMeasSigma;
      if (p.msg->covariance) vcov = p.msg->covariance->velocity;
      const Vec3 v_world = dead_reckon_->state().r.rotate(*p.msg->velocity);
      dead_reckon_->update_velocity_world(v_world, vcov);
    }
    p.rt->supervisor.ingest(*p.msg, p.verdicts);
    last_verdicts_[p.msg->stream_id] = p.verdicts;
    had_message.insert(p.msg->stream_id);
  }

  for (auto& [id, rt] : streams_) {
    if (had_message.count(id)) continue;
    const auto state = rt.supervisor.state();
    if (state == StreamState::Failed || state == StreamState::Reinitializing) continue;
    const auto rv = rate_check(rt.supervisor.status().last_msg_stamp, now, rt.cfg.checks);
    rt.supervisor.evaluate(now, {rv});
    last_verdicts_[id] = {rv};
  }

  for (auto& [id, rt] : streams_) {
    if (rt.supervisor.state() != StreamState::Failed) continue;
    const auto& st = rt.supervisor.status();
    events_.push_back({MuxEvent::Kind::FailureDetected, now, id, "", st.failure_reason, 0.0});
    rt.supervisor.command_reinit(now);
    events_.push_back({MuxEvent::Kind::ReinitCommand, now, id, "", st.failure_reason,
                       static_cast<double>(rt.supervisor.epoch())});
    out.reinit_commands.push_back(id);
  }

  const auto next = select_channel(states(), cfg_.ranking, channel_, cfg_.allow_preempt);
  if (next != channel_) switch_to(next, now);

  out.state = publish(now);
  out.quality = assess_quality(now);
  out.channel = channel_;
  out.service_hint = map_quality_to_service(out.quality);

  audit(out.state, now);
  last_output_pose_ = out.state.pose();
  last_output_vel_world_ = out.state.r.rotate(out.state.v);
  have_output_ = true;
  return out;
}

}  // namespace hero
