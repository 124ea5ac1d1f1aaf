#include "hero/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

namespace hero {

MetricsReport compute_metrics(const Telemetry& t) {
  MetricsReport m;
  if (t.rows.empty()) return m;

  std::size_t good = 0;
  double sq_err = 0.0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    if (row.quality.p == Q::Good) {
      ++good;
      sq_err += (row.out.p - row.gt.p).squaredNorm();
    }
    if (i > 0) {
      m.max_discontinuity =
          std::max(m.max_discontinuity, (row.out.p - t.rows[i - 1].out.p).norm());
    }
  }
  m.availability = static_cast<double>(good) / static_cast<double>(t.rows.size());
  m.rmse_position = good > 0 ? std::sqrt(sq_err / static_cast<double>(good)) : 0.0;

  double descent_limit = 1.0;
  struct Injected {
    std::string stream;
    std::string mode;
    double t_start;
  };
  std::vector<Injected> injected;
  std::map<std::string, std::vector<double>> detections;
  for (const auto& ev : t.events) {
    if (ev.type == "switch") ++m.switch_count;
    if (ev.type == "reinit_command") ++m.reinit_count;
    if (ev.type == "run_config") {
      const auto j = nlohmann::json::parse(ev.json);
      if (j.contains("descent_limit")) descent_limit = j["descent_limit"].get<double>();
    }
    if (ev.type == "failure_injected") {
      const auto j = nlohmann::json::parse(ev.json);
      injected.push_back({j.at("stream").get<std::string>(), j.at("mode").get<std::string>(),
                          j.at("t_start").get<double>()});
    }
    if (ev.type == "failure_detected") {
      const auto j = nlohmann::json::parse(ev.json);
      detections[j.at("stream").get<std::string>()].push_back(ev.stamp);
    }
  }

  for (const auto& inj : injected) {
    DetectionLatency d{inj.stream, inj.mode, inj.t_start, std::nullopt};
    const auto it = detections.find(inj.stream);
    if (it != detections.end()) {
      for (const double stamp : it->second) {
        if (stamp >= inj.t_start - 1e-9) {
          d.latency = stamp - inj.t_start;
          break;
        }
      }
    }
    m.detection_latency.push_back(std::move(d));
  }

  bool landing_started = false;
  std::optional<std::size_t> landed_at;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i].behavior == Behavior::AttitudeLand) landing_started = true;
    if (t.rows[i].behavior == Behavior::Landed && !landed_at) landed_at = i;
  }
  if (landing_started) {
    if (!landed_at) {
      m.landed_safely = false;
    } else {
      const std::size_t touchdown = *landed_at > 0 ? *landed_at - 1 : *landed_at;
      m.landed_safely = std::abs(t.rows[touchdown].gt.v.z()) <= descent_limit;
    }
  }
  return m;
}

nlohmann::ordered_json metrics_to_json(const MetricsReport& m) {
  nlohmann::ordered_json j;
  j["availability"] = m.availability;
  j["rmse_position"] = m.rmse_position;
  j["max_discontinuity"] = m.max_discontinuity;
  j["switch_count"] = m.switch_count;
  j["reinit_count"] = m.reinit_count;
  j["landed_safely"] = m.landed_safely;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& d : m.detection_latency) {
    nlohmann::ordered_json e;
    e["stream"] = d.stream;
    e["mode"] = d.mode;
    e["t_start"] = d.t_start;
    if (d.latency) {
      e["latency"] = *d.latency;
    } else {
      e["latency"] = nullptr;
    }
    arr.push_back(e);
  }
  j["detection_latency"] = arr;
  return j;
}

void write_metrics_json(const MetricsReport& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << metrics_to_json(m).dump(2) << '\n';
}

}  // namespace hero
