#ifndef HERO_TELEMETRY_HPP
#define HERO_TELEMETRY_HPP

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hero/mobility.hpp"
#include "hero/state.hpp"
#include "hero/supervisor.hpp"

namespace hero {

struct StreamCell {
  StreamState state = StreamState::Initializing;
  int epoch = 0;
  std::string fail;             // failing check id, empty when clean
  std::optional<Vec3> raw_p;    // last raw stream-local position
};

struct TickRow {
  double stamp = 0.0;
  RobotState gt;
  RobotState out;
  StateQuality quality;
  std::string channel = "none";
  MobilityService service = MobilityService::Attitude;
  Behavior behavior = Behavior::WaypointNav;
  std::vector<StreamCell> streams;  // config order
};

struct Event {
  double stamp = 0.0;
  std::string type;
  std::string json;  // serialized payload, one JSONL row
};

struct Telemetry {
  std::vector<std::string> stream_ids;
  std::vector<TickRow> rows;
  std::vector<Event> events;
};

/// Full round-trip precision (17 significant digits), so written files are
/// stable and recomputation from them is exact.
std::string fmt17(double v);

void write_telemetry_csv(const Telemetry& t, const std::string& path);
void write_events_jsonl(const Telemetry& t, const std::string& path);

/// Reads back files produced by the writers above.
Telemetry read_telemetry(const std::string& csv_path, const std::string& events_path);

Event make_event(double stamp, const std::string& type, const nlohmann::json& data);

}  // namespace hero

#endif  // HERO_TELEMETRY_HPP
