#include <cmath>
#include <cstdlib>
#include <map>

#include <nlohmann/json.hpp>

#include "hero/errors.hpp"
#include "hero/metrics.hpp"
#include "hero/scenario.hpp"

namespace hero {

namespace {

constexpr double kTimeEps = 1e-9;

double cos_tilt_of(const UnitRotation& r) { return std::max(0.2, r.matrix()(2, 2)); }

nlohmann::json mux_event_json(const MuxEvent& ev) {
  nlohmann::json d;
  switch (ev.kind) {
    case MuxEvent::Kind::Switch:
      d["from"] = ev.previous;
      d["to"] = ev.stream;
      break;
    case MuxEvent::Kind::ReinitCommand:
    case MuxEvent::Kind::StreamRestarted:
      d["stream"] = ev.stream;
      d["epoch"] = static_cast<int>(ev.detail);
      break;
    case MuxEvent::Kind::FailureDetected:
      d["stream"] = ev.stream;
      d["check"] = ev.check ? to_string(*ev.check) : "unknown";
      break;
  }
  return d;
}

const char* mux_event_type(const MuxEvent& ev) {
  switch (ev.kind) {
    case MuxEvent::Kind::Switch: return "switch";
    case MuxEvent::Kind::ReinitCommand: return "reinit_command";
    case MuxEvent::Kind::StreamRestarted: return "stream_restarted";
    case MuxEvent::Kind::FailureDetected: return "failure_detected";
  }
  return "?";
}

bool log_enabled() {
  const char* v = std::getenv("HERO_MUX_LOG");
  return v != nullptr && v[0] != '\0' && std::string(v) != "0";
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, long max_ticks) {
  validate_scenario(cfg);
  const bool verbose = log_enabled();
  const double dt = 1.0 / cfg.tick_rate;
  long n_ticks = static_cast<long>(std::llround(cfg.trajectory.duration * cfg.tick_rate)) + 1;
  if (max_ticks >= 0) n_ticks = std::min(n_ticks, max_ticks);

  const RobotState gt0 = ground_truth(cfg.trajectory, 0.0);

  MuxConfig mc;
  mc.ranking.order = cfg.ranking;
  mc.tick_rate = cfg.tick_rate;
  mc.v_max = cfg.v_max;
  mc.allow_preempt = cfg.allow_preempt;
  mc.imu_rate = cfg.imu.rate;
  mc.imu_noise = cfg.filter_noise;
  mc.attitude_meas_var = cfg.attitude_meas_var;
  mc.initial.p = gt0.p;
  mc.initial.r = gt0.r;
  mc.initial.v = gt0.r.rotate(gt0.v);
  mc.initial.P = Mat15::Zero();
  mc.initial.P.block<3, 3>(0, 0) = Mat3::Identity() * cfg.init_sigma_pos * cfg.init_sigma_pos;
  mc.initial.P.block<3, 3>(3, 3) = Mat3::Identity() * cfg.init_sigma_vel * cfg.init_sigma_vel;
  mc.initial.P.block<3, 3>(6, 6) = Mat3::Identity() * cfg.init_sigma_att * cfg.init_sigma_att;
  mc.initial.P.block<3, 3>(9, 9) = Mat3::Identity() * cfg.init_sigma_bias * cfg.init_sigma_bias;
  mc.initial.P.block<3, 3>(12, 12) =
      Mat3::Identity() * cfg.init_sigma_bias * cfg.init_sigma_bias;
  for (const auto& s : cfg.streams) {
    mc.streams.push_back(MuxStreamConfig{s.id, s.kind, s.checks, s.lifecycle});
  }
  ResiliencyMux mux(mc);

  const Rng root(cfg.seed);
  std::vector<SyntheticStream> emitters;
  std::map<std::string, std::size_t> emitter_index;
  for (const auto& s : cfg.streams) {
    emitter_index[s.id] = emitters.size();
    emitters.emplace_back(s, root.fork("stream:" + s.id), gt0.pose());
  }
  Rng imu_rng = root.fork("imu");
  Rng ranger_rng = root.fork("ranger");

  ActualKinematics plant(cfg.trajectory, dt);
  BehaviorMachine behavior(cfg.behavior);
  ControlCommand cmd;
  cmd.mode = ControlCommand::Mode::TrackMission;

  Telemetry tel;
  for (const auto& s : cfg.streams) tel.stream_ids.push_back(s.id);

  nlohmann::json rc;
  rc["name"] = cfg.name;
  rc["seed"] = cfg.seed;
  rc["tick_rate"] = cfg.tick_rate;
  rc["v_max"] = cfg.v_max;
  rc["descent_limit"] = cfg.behavior.descent_rate * 1.1;
  tel.events.push_back(make_event(0.0, "run_config", rc));

  auto active_failures = [&](const std::string& id, double now) {
    std::vector<const FailureEvent*> out;
    for (const auto& f : cfg.failures) {
      if (f.stream_id == id && f.active(now)) out.push_back(&f);
    }
    return out;
  };

  std::map<std::string, std::optional<Vec3>> last_raw;
  double imu_next = 0.0;
  double ranger_next = 0.0;
  Behavior prev_behavior = behavior.behavior();
  std::vector<bool> failure_live(cfg.failures.size(), false);

  for (long k = 0; k < n_ticks; ++k) {
    const double now = k * dt;
    if (k > 0) plant.step(cmd, now);
    const RobotState& actual = plant.state();

    // Failure window edges.
    for (std::size_t i = 0; i < cfg.failures.size(); ++i) {
      const auto& f = cfg.failures[i];
      const bool live = f.active(now);
      if (live && !failure_live[i]) {
        nlohmann::json d;
        d["stream"] = f.stream_id;
        d["mode"] = to_string(f.mode);
        d["t_start"] = f.t_start;
        d["t_end"] = f.t_end;
        tel.events.push_back(make_event(now, "failure_injected", d));
      } else if (!live && failure_live[i]) {
        nlohmann::json d;
        d["stream"] = f.stream_id;
        d["mode"] = to_string(f.mode);
        tel.events.push_back(make_event(now, "failure_cleared", d));
      }
      failure_live[i] = live;
    }

    TickInputs in;
    in.now = now;
    while (imu_next <= now + kTimeEps) {
      if (active_failures("imu", imu_next).empty()) {
        RobotState s = actual;
        s.stamp = imu_next;
        in.imu.push_back(simulate_imu(s, cfg.imu, imu_rng));
      }
      imu_next += 1.0 / cfg.imu.rate;
    }
    if (cfg.ranger.enabled) {
      while (ranger_next <= now + kTimeEps) {
        if (active_failures("ranger", ranger_next).empty()) {
          RangerSample r;
          r.stamp = ranger_next;
          r.range = actual.p.z() / cos_tilt_of(actual.r) + cfg.ranger.sigma * ranger_rng.gaussian();
          r.var = std::max(cfg.ranger.sigma * cfg.ranger.sigma, 1e-8);
          in.ranger = r;  // one sample per tick is enough at ranger rates
        }
        ranger_next += 1.0 / cfg.ranger.rate;
      }
    }
    for (const auto& s : cfg.streams) {
      auto& em = emitters[emitter_index[s.id]];
      if (auto msg = em.poll(now, actual, active_failures(s.id, now))) {
        if (msg->pose) last_raw[s.id] = msg->pose->t;
        in.messages.push_back(std::move(*msg));
      }
    }

    MuxOutput out = mux.step(in);
    for (const auto& id : out.reinit_commands) {
      emitters[emitter_index[id]].command_reinit(now);
    }

    cmd = behavior.step(out.service_hint, out.state, out.quality, cfg.mission, now);
    if (behavior.behavior() != prev_behavior) {
      nlohmann::json d;
      d["from"] = to_string(prev_behavior);
      d["to"] = to_string(behavior.behavior());
      tel.events.push_back(make_event(now, "behavior_transition", d));
      prev_behavior = behavior.behavior();
    }

    for (const auto& ev : mux.drain_events()) {
      tel.events.push_back(make_event(ev.stamp, mux_event_type(ev), mux_event_json(ev)));
      if (verbose) {
        std::fprintf(stderr, "[hero %.3f] %s %s\n", ev.stamp, mux_event_type(ev),
                     ev.stream.c_str());
      }
    }

    TickRow row;
    row.stamp = now;
    row.gt = actual;
    row.out = out.state;
    row.quality = out.quality;
    row.channel = out.channel.value_or("none");
    row.service = out.service_hint;
    row.behavior = behavior.behavior();
    for (const auto& s : cfg.streams) {
      const auto& st = mux.stream_status(s.id);
      StreamCell cell;
      cell.state = st.state;
      cell.epoch = st.epoch;
      cell.fail = st.failure_reason ? to_string(*st.failure_reason) : "";
      cell.raw_p = last_raw[s.id];
      row.streams.push_back(cell);
    }
    tel.rows.push_back(std::move(row));
  }

  return RunResult{std::move(tel), mux.violations()};
}

}  // namespace hero
