#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hero/errors.hpp"
#include "hero/scenario.hpp"

namespace hero {

namespace {

using nlohmann::json;

double num(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

Vec3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(path, "expected [x, y, z]");
  return Vec3(num(j[0], path + "[0]"), num(j[1], path + "[1]"), num(j[2], path + "[2]"));
}

double get_num(const json& j, const std::string& key, double fallback,
               const std::string& path) {
  if (!j.contains(key)) return fallback;
  return num(j.at(key), path + "." + key);
}

Vec3 get_vec3(const json& j, const std::string& key, const Vec3& fallback,
              const std::string& path) {
  if (!j.contains(key)) return fallback;
  return vec3(j.at(key), path + "." + key);
}

TrajectorySpec parse_trajectory(const json& j, const std::string& path) {
  TrajectorySpec t;
  const std::string kind = j.value("kind", "hover");
  if (kind == "hover") {
    t.kind = TrajectorySpec::Kind::Hover;
  } else if (kind == "line") {
    t.kind = TrajectorySpec::Kind::Line;
  } else if (kind == "circle") {
    t.kind = TrajectorySpec::Kind::Circle;
  } else if (kind == "tunnel") {
    t.kind = TrajectorySpec::Kind::TunnelPath;
  } else {
    throw ConfigError(path + ".kind", "unknown trajectory kind '" + kind + "'");
  }
  t.duration = get_num(j, "duration", t.duration, path);
  t.speed = get_num(j, "speed", t.speed, path);
  t.start = get_vec3(j, "start", t.start, path);
  t.direction = get_vec3(j, "direction", t.direction, path);
  t.center = get_vec3(j, "center", t.center, path);
  t.radius = get_num(j, "radius", t.radius, path);
  t.yaw0 = get_num(j, "yaw0", t.yaw0, path);
  if (j.contains("path")) {
    const auto& p = j.at("path");
    if (!p.is_array()) throw ConfigError(path + ".path", "expected an array of points");
    for (std::size_t i = 0; i < p.size(); ++i) {
      t.path.push_back(vec3(p[i], path + ".path[" + std::to_string(i) + "]"));
    }
  }
  return t;
}

CheckConfig parse_checks(const json& j, const std::string& path, double stream_rate) {
  CheckConfig c;
  c.nominal_rate = get_num(j, "nominal_rate", stream_rate, path);
  c.gap_factor = get_num(j, "gap_factor", c.gap_factor, path);
  c.v_max = get_num(j, "v_max", c.v_max, path);
  c.jump_margin = get_num(j, "jump_margin", c.jump_margin, path);
  c.cov_trace_max = get_num(j, "cov_trace_max", c.cov_trace_max, path);
  c.intensity_min = get_num(j, "intensity_min", c.intensity_min, path);
  c.intensity_var_min = get_num(j, "intensity_var_min", c.intensity_var_min, path);
  c.invalid_fraction_max = get_num(j, "invalid_fraction_max", c.invalid_fraction_max, path);
  c.vote_k = get_num(j, "vote_k", c.vote_k, path);
  c.mad_floor = get_num(j, "mad_floor", c.mad_floor, path);
  if (!c.valid()) throw ConfigError(path, "check thresholds must be positive, gap_factor >= 1");
  return c;
}

SimStreamSpec parse_stream(const json& j, const std::string& path) {
  SimStreamSpec s;
  if (!j.contains("id")) throw ConfigError(path + ".id", "stream id is required");
  s.id = j.at("id").get<std::string>();
  const std::string kind = j.value("kind", "pose");
  if (kind == "pose") {
    s.kind = StreamKind::PoseOnly;
  } else if (kind == "pose_velocity") {
    s.kind = StreamKind::PoseVelocity;
  } else if (kind == "velocity") {
    s.kind = StreamKind::VelocityOnly;
  } else {
    throw ConfigError(path + ".kind", "unknown stream kind '" + kind + "'");
  }
  s.rate = get_num(j, "rate", s.rate, path);
  if (s.rate <= 0) throw ConfigError(path + ".rate", "rate must be positive");
  s.sigma_pos = get_num(j, "sigma_pos", s.sigma_pos, path);
  s.sigma_rot = get_num(j, "sigma_rot", s.sigma_rot, path);
  s.sigma_vel = get_num(j, "sigma_vel", s.sigma_vel, path);
  s.base_cov = get_num(j, "base_cov", s.base_cov, path);
  s.checks = parse_checks(j.value("checks", json::object()), path + ".checks", s.rate);
  const auto& lc = j.value("lifecycle", json::object());
  s.lifecycle.suspect_grace =
      get_num(lc, "suspect_grace", s.lifecycle.suspect_grace, path + ".lifecycle");
  s.lifecycle.reinit_delay =
      get_num(lc, "reinit_delay", s.lifecycle.reinit_delay, path + ".lifecycle");
  s.lifecycle.recover_window =
      get_num(lc, "recover_window", s.lifecycle.recover_window, path + ".lifecycle");
  const auto& st = j.value("nominal_stats", json::object());
  s.nominal_stats.intensity_mean =
      get_num(st, "intensity_mean", s.nominal_stats.intensity_mean, path + ".nominal_stats");
  s.nominal_stats.intensity_var =
      get_num(st, "intensity_var", s.nominal_stats.intensity_var, path + ".nominal_stats");
  s.nominal_stats.invalid_fraction = get_num(st, "invalid_fraction",
                                             s.nominal_stats.invalid_fraction,
                                             path + ".nominal_stats");
  return s;
}

FailureEvent parse_failure(const json& j, const std::string& path) {
  FailureEvent f;
  if (!j.contains("stream")) throw ConfigError(path + ".stream", "failure needs a stream id");
  f.stream_id = j.at("stream").get<std::string>();
  f.t_start = get_num(j, "t_start", 0.0, path);
  f.t_end = get_num(j, "t_end", 0.0, path);
  const std::string mode = j.value("mode", "gap");
  if (mode == "gap") {
    f.mode = FailureMode::Gap;
  } else if (mode == "jump") {
    f.mode = FailureMode::Jump;
    f.jump_offset = get_vec3(j, "offset", Vec3(10.0, 0.0, 0.0), path);
  } else if (mode == "divergence") {
    f.mode = FailureMode::Divergence;
    f.cov_growth = get_num(j, "cov_growth", 0.5, path);
  } else if (mode == "drift") {
    f.mode = FailureMode::Drift;
    f.drift_bias = get_vec3(j, "bias", Vec3(0.3, 0.0, 0.0), path);
  } else if (mode == "sensor_degrade") {
    f.mode = FailureMode::SensorDegrade;
    const auto& st = j.value("stats", json::object());
    f.degraded_stats.output_rate = get_num(st, "output_rate", 0.0, path + ".stats");
    f.degraded_stats.intensity_mean = get_num(st, "intensity_mean", 0.0, path + ".stats");
    f.degraded_stats.intensity_var = get_num(st, "intensity_var", 0.0, path + ".stats");
    f.degraded_stats.invalid_fraction = get_num(st, "invalid_fraction", 1.0, path + ".stats");
  } else {
    throw ConfigError(path + ".mode", "unknown failure mode '" + mode + "'");
  }
  return f;
}

}  // namespace

ScenarioConfig parse_scenario_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }

  ScenarioConfig cfg;
  cfg.name = j.value("name", cfg.name);
  if (!j.contains("seed")) throw ConfigError("seed", "seed is mandatory");
  if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) {
    throw ConfigError("seed", "seed must be an integer");
  }
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.tick_rate = get_num(j, "tick_rate", cfg.tick_rate, "");
  cfg.v_max = get_num(j, "v_max", cfg.v_max, "");
  cfg.allow_preempt = j.value("allow_preempt", cfg.allow_preempt);

  if (!j.contains("trajectory")) throw ConfigError("trajectory", "trajectory is required");
  cfg.trajectory = parse_trajectory(j.at("trajectory"), "trajectory");

  if (!j.contains("streams") || !j.at("streams").is_array() || j.at("streams").empty()) {
    throw ConfigError("streams", "at least one stream is required");
  }
  for (std::size_t i = 0; i < j.at("streams").size(); ++i) {
    cfg.streams.push_back(
        parse_stream(j.at("streams")[i], "streams[" + std::to_string(i) + "]"));
  }

  if (j.contains("ranking")) {
    for (const auto& r : j.at("ranking")) cfg.ranking.push_back(r.get<std::string>());
  } else {
    for (const auto& s : cfg.streams) cfg.ranking.push_back(s.id);
  }

  const auto& imu = j.value("imu", json::object());
  cfg.imu.rate = get_num(imu, "rate", cfg.imu.rate, "imu");
  cfg.imu.sigma_gyro = get_num(imu, "sigma_gyro", cfg.imu.sigma_gyro, "imu");
  cfg.imu.sigma_accel = get_num(imu, "sigma_accel", cfg.imu.sigma_accel, "imu");
  cfg.imu.bias_gyro = get_vec3(imu, "bias_gyro", cfg.imu.bias_gyro, "imu");
  cfg.imu.bias_accel = get_vec3(imu, "bias_accel", cfg.imu.bias_accel, "imu");

  const auto& ranger = j.value("ranger", json::object());
  cfg.ranger.enabled = ranger.value("enabled", cfg.ranger.enabled);
  cfg.ranger.rate = get_num(ranger, "rate", cfg.ranger.rate, "ranger");
  cfg.ranger.sigma = get_num(ranger, "sigma", cfg.ranger.sigma, "ranger");

  if (j.contains("failures")) {
    for (std::size_t i = 0; i < j.at("failures").size(); ++i) {
      cfg.failures.push_back(
          parse_failure(j.at("failures")[i], "failures[" + std::to_string(i) + "]"));
    }
  }

  if (j.contains("mission")) {
    const auto& m = j.at("mission");
    for (std::size_t i = 0; i < m.size(); ++i) {
      cfg.mission.push_back(vec3(m[i], "mission[" + std::to_string(i) + "]"));
    }
  }

  const auto& b = j.value("behavior", json::object());
  cfg.behavior.safety_timeout = get_num(b, "safety_timeout", cfg.behavior.safety_timeout, "behavior");
  cfg.behavior.descent_rate = get_num(b, "descent_rate", cfg.behavior.descent_rate, "behavior");
  cfg.behavior.takeoff_rate = get_num(b, "takeoff_rate", cfg.behavior.takeoff_rate, "behavior");
  cfg.behavior.waypoint_gain = get_num(b, "waypoint_gain", cfg.behavior.waypoint_gain, "behavior");
  cfg.behavior.cruise_speed = get_num(b, "cruise_speed", cfg.behavior.cruise_speed, "behavior");
  cfg.behavior.accept_radius = get_num(b, "accept_radius", cfg.behavior.accept_radius, "behavior");
  cfg.behavior.ground_alt = get_num(b, "ground_alt", cfg.behavior.ground_alt, "behavior");

  const auto& fl = j.value("filter", json::object());
  cfg.filter_noise.sigma_accel = get_num(fl, "sigma_accel", cfg.filter_noise.sigma_accel, "filter");
  cfg.filter_noise.sigma_gyro = get_num(fl, "sigma_gyro", cfg.filter_noise.sigma_gyro, "filter");
  cfg.filter_noise.sigma_accel_bias =
      get_num(fl, "sigma_accel_bias", cfg.filter_noise.sigma_accel_bias, "filter");
  cfg.filter_noise.sigma_gyro_bias =
      get_num(fl, "sigma_gyro_bias", cfg.filter_noise.sigma_gyro_bias, "filter");
  cfg.attitude_meas_var = get_num(fl, "attitude_meas_var", cfg.attitude_meas_var, "filter");
  cfg.init_sigma_pos = get_num(fl, "init_sigma_pos", cfg.init_sigma_pos, "filter");
  cfg.init_sigma_vel = get_num(fl, "init_sigma_vel", cfg.init_sigma_vel, "filter");
  cfg.init_sigma_att = get_num(fl, "init_sigma_att", cfg.init_sigma_att, "filter");
  cfg.init_sigma_bias = get_num(fl, "init_sigma_bias", cfg.init_sigma_bias, "filter");

  validate_scenario(cfg);
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("<file>", "cannot open scenario file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario_json(ss.str());
}

void validate_scenario(const ScenarioConfig& cfg) {
  if (cfg.tick_rate <= 0) throw ConfigError("tick_rate", "must be positive");
  if (cfg.trajectory.duration <= 0) throw ConfigError("trajectory.duration", "must be positive");
  if (cfg.trajectory.speed > cfg.v_max) {
    throw ConfigError("trajectory.speed", "exceeds platform v_max");
  }
  if (cfg.trajectory.kind == TrajectorySpec::Kind::TunnelPath && cfg.trajectory.path.size() < 2) {
    throw ConfigError("trajectory.path", "tunnel path needs >= 2 vertices");
  }

  std::set<std::string> ids;
  for (const auto& s : cfg.streams) {
    if (!ids.insert(s.id).second) throw ConfigError("streams", "duplicate stream id " + s.id);
  }
  std::set<std::string> ranked(cfg.ranking.begin(), cfg.ranking.end());
  if (ranked.size() != cfg.ranking.size()) throw ConfigError("ranking", "duplicate entries");
  if (ranked != ids) throw ConfigError("ranking", "must cover exactly the configured streams");

  for (std::size_t i = 0; i < cfg.failures.size(); ++i) {
    const auto& f = cfg.failures[i];
    const std::string path = "failures[" + std::to_string(i) + "]";
    if (f.stream_id != "imu" && f.stream_id != "ranger" && !ids.count(f.stream_id)) {
      throw ConfigError(path + ".stream", "unknown stream " + f.stream_id);
    }
    if (!(f.t_start < f.t_end)) throw ConfigError(path, "t_start must be before t_end");
    if (f.t_end > cfg.trajectory.duration + 1e-9) {
      throw ConfigError(path + ".t_end", "failure window exceeds scenario duration");
    }
  }
}

}  // namespace hero
