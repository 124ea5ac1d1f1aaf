#include "hero/telemetry.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hero/errors.hpp"

namespace hero {

namespace {

StreamState stream_state_from_string(const std::string& s) {
  if (s == "initializing") return StreamState::Initializing;
  if (s == "healthy") return StreamState::Healthy;
  if (s == "suspect") return StreamState::Suspect;
  if (s == "failed") return StreamState::Failed;
  if (s == "reinitializing") return StreamState::Reinitializing;
  throw OutOfRange("unknown stream state '" + s + "'");
}

MobilityService service_from_string(const std::string& s) {
  if (s == "global") return MobilityService::Global;
  if (s == "local") return MobilityService::Local;
  if (s == "closed_loop_z") return MobilityService::ClosedLoopZ;
  if (s == "attitude") return MobilityService::Attitude;
  if (s == "open_loop_land") return MobilityService::OpenLoopLand;
  throw OutOfRange("unknown service '" + s + "'");
}

Behavior behavior_from_string(const std::string& s) {
  if (s == "takeoff") return Behavior::TakeOff;
  if (s == "waypoint_nav") return Behavior::WaypointNav;
  if (s == "velocity_hold") return Behavior::VelocityHold;
  if (s == "hover_z") return Behavior::HoverZ;
  if (s == "attitude_land") return Behavior::AttitudeLand;
  if (s == "landed") return Behavior::Landed;
  throw OutOfRange("unknown behavior '" + s + "'");
}

void append_state_columns(std::ostringstream& os, const RobotState& s) {
  os << ',' << fmt17(s.p.x()) << ',' << fmt17(s.p.y()) << ',' << fmt17(s.p.z());
  os << ',' << fmt17(s.r.w()) << ',' << fmt17(s.r.x()) << ',' << fmt17(s.r.y()) << ','
     << fmt17(s.r.z());
  os << ',' << fmt17(s.v.x()) << ',' << fmt17(s.v.y()) << ',' << fmt17(s.v.z());
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Event make_event(double stamp, const std::string& type, const nlohmann::json& data) {
  nlohmann::ordered_json row;
  row["t"] = stamp;
  row["type"] = type;
  for (const auto& [k, v] : data.items()) row[k] = v;
  return Event{stamp, type, row.dump()};
}

void write_telemetry_csv(const Telemetry& t, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");

  std::ostringstream header;
  header << "stamp";
  for (const char* p : {"gt", "out"}) {
    for (const char* c : {"px", "py", "pz", "qw", "qx", "qy", "qz", "vx", "vy", "vz"}) {
      header << ',' << p << '_' << c;
    }
  }
  header << ",q_p,q_gz,q_vxy,q_vz,q_att,channel,service,behavior";
  for (const auto& id : t.stream_ids) {
    header << ',' << id << "_state," << id << "_epoch," << id << "_fail," << id << "_raw_px,"
           << id << "_raw_py," << id << "_raw_pz";
  }
  f << header.str() << '\n';

  for (const auto& row : t.rows) {
    std::ostringstream os;
    os << fmt17(row.stamp);
    append_state_columns(os, row.gt);
    append_state_columns(os, row.out);
    os << ',' << (row.quality.p == Q::Good ? 1 : 0) << ',' << (row.quality.gz == Q::Good ? 1 : 0)
       << ',' << (row.quality.vxy == Q::Good ? 1 : 0) << ','
       << (row.quality.vz == Q::Good ? 1 : 0) << ',' << (row.quality.att == Q::Good ? 1 : 0);
    os << ',' << row.channel << ',' << to_string(row.service) << ',' << to_string(row.behavior);
    for (const auto& cell : row.streams) {
      os << ',' << to_string(cell.state) << ',' << cell.epoch << ',' << cell.fail;
      if (cell.raw_p) {
        os << ',' << fmt17(cell.raw_p->x()) << ',' << fmt17(cell.raw_p->y()) << ','
           << fmt17(cell.raw_p->z());
      } else {
        os << ",,,";
      }
    }
    f << os.str() << '\n';
  }
}

void write_events_jsonl(const Telemetry& t, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto& ev : t.events) f << ev.json << '\n';
}

Telemetry read_telemetry(const std::string& csv_path, const std::string& events_path) {
  Telemetry t;

  std::ifstream f(csv_path);
  if (!f) throw std::runtime_error("cannot open " + csv_path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("empty telemetry file " + csv_path);
  const auto header = split_csv(line);

  // Stream ids from the trailing per-stream column groups.
  constexpr std::size_t kFixed = 1 + 10 + 10 + 5 + 3;
  for (std::size_t i = kFixed; i + 5 < header.size(); i += 6) {
    const std::string& col = header[i];
    t.stream_ids.push_back(col.substr(0, col.rfind("_state")));
  }

  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    TickRow row;
    std::size_t i = 0;
    row.stamp = std::stod(cells[i++]);
    auto read_state = [&](RobotState& s) {
      s.stamp = row.stamp;
      s.p = Vec3(std::stod(cells[i]), std::stod(cells[i + 1]), std::stod(cells[i + 2]));
      s.r = UnitRotation(std::stod(cells[i + 3]), std::stod(cells[i + 4]),
                         std::stod(cells[i + 5]), std::stod(cells[i + 6]));
      s.v = Vec3(std::stod(cells[i + 7]), std::stod(cells[i + 8]), std::stod(cells[i + 9]));
      i += 10;
    };
    read_state(row.gt);
    read_state(row.out);
    auto bit = [&]() { return cells[i++] == "1" ? Q::Good : Q::Bad; };
    row.quality.p = bit();
    row.quality.gz = bit();
    row.quality.vxy = bit();
    row.quality.vz = bit();
    row.quality.att = bit();
    row.channel = cells[i++];
    row.service = service_from_string(cells[i++]);
    row.behavior = behavior_from_string(cells[i++]);
    for (std::size_t s = 0; s < t.stream_ids.size(); ++s) {
      StreamCell cell;
      cell.state = stream_state_from_string(cells[i++]);
      cell.epoch = std::stoi(cells[i++]);
      cell.fail = cells[i++];
      if (!cells[i].empty()) {
        cell.raw_p = Vec3(std::stod(cells[i]), std::stod(cells[i + 1]), std::stod(cells[i + 2]));
      }
      i += 3;
      row.streams.push_back(cell);
    }
    t.rows.push_back(std::move(row));
  }

  std::ifstream ef(events_path);
  if (!ef) throw std::runtime_error("cannot open " + events_path);
  while (std::getline(ef, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    t.events.push_back(Event{j.at("t").get<double>(), j.at("type").get<std::string>(), line});
  }
  return t;
}

}  // namespace hero
