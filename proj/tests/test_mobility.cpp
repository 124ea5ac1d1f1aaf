#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hero/mobility.hpp"

using namespace hero;

namespace {

StateQuality quality(Q p, Q gz, Q vxy, Q vz, Q att) { return {p, gz, vxy, vz, att}; }

StateQuality from_mask(unsigned m) {
  return quality((m & 1) ? Q::Good : Q::Bad, (m & 2) ? Q::Good : Q::Bad,
                 (m & 4) ? Q::Good : Q::Bad, (m & 8) ? Q::Good : Q::Bad,
                 (m & 16) ? Q::Good : Q::Bad);
}

RobotState at(const Vec3& p) {
  RobotState s;
  s.p = p;
  return s;
}

constexpr Q G = Q::Good;
constexpr Q B = Q::Bad;

}  // namespace

TEST_CASE("the five published quality rows map to their services") {
  CHECK(map_quality_to_service(quality(G, G, G, G, G)) == MobilityService::Global);
  CHECK(map_quality_to_service(quality(B, G, G, G, G)) == MobilityService::Local);
  CHECK(map_quality_to_service(quality(B, B, G, G, G)) == MobilityService::Local);
  CHECK(map_quality_to_service(quality(B, G, B, G, G)) == MobilityService::ClosedLoopZ);
  CHECK(map_quality_to_service(quality(B, B, B, B, G)) == MobilityService::Attitude);
}

TEST_CASE("attitude-block failure forces the open-loop landing service") {
  for (unsigned m = 0; m < 16; ++m) {
    auto q = from_mask(m);
    q.att = B;
    CHECK(map_quality_to_service(q) == MobilityService::OpenLoopLand);
  }
}

TEST_CASE("service map is total and monotone in every bit") {
  for (unsigned m = 0; m < 32; ++m) {
    const auto base = map_quality_to_service(from_mask(m));
    for (unsigned bit = 0; bit < 5; ++bit) {
      if (m & (1u << bit)) continue;
      const auto improved = map_quality_to_service(from_mask(m | (1u << bit)));
      CHECK(static_cast<int>(improved) >= static_cast<int>(base));
    }
  }
}

TEST_CASE("waypoint tracking commands roughly hover at the waypoint") {
  BehaviorMachine bm(BehaviorConfig{});
  const std::vector<Vec3> mission = {Vec3(0, 0, 1.5)};
  const auto cmd = bm.step(MobilityService::Global, at(Vec3(0, 0, 1.5)),
                           StateQuality::all_good(), mission, 0.0);
  CHECK(bm.behavior() == Behavior::WaypointNav);
  CHECK(cmd.mode == ControlCommand::Mode::TrackMission);
  CHECK(cmd.velocity_world.norm() < 1e-9);
}

TEST_CASE("three seconds of dead reckoning forces AttitudeLand") {
  BehaviorConfig cfg;
  BehaviorMachine bm(cfg);
  const std::vector<Vec3> mission = {Vec3(5, 0, 1.5)};
  auto q_bad = StateQuality::all_bad();
  q_bad.att = G;

  bm.step(MobilityService::Global, at(Vec3(0, 0, 1.5)), StateQuality::all_good(), mission, 0.0);
  for (int k = 0; k <= 301; ++k) {
    const double t = 1.0 + k * 0.01;
    bm.step(MobilityService::Attitude, at(Vec3(0, 0, 1.5)), q_bad, mission, t);
    if (t - 1.0 < 3.0 - 1e-9) {
      CHECK(bm.behavior() != Behavior::AttitudeLand);
    }
  }
  CHECK(bm.behavior() == Behavior::AttitudeLand);
  REQUIRE(bm.dead_reckon_since().has_value());
  CHECK(*bm.dead_reckon_since() == doctest::Approx(1.0));
}

TEST_CASE("recovery before the timeout clears the timer and resumes the mission") {
  BehaviorMachine bm(BehaviorConfig{});
  const std::vector<Vec3> mission = {Vec3(5, 0, 1.5)};
  auto q_bad = StateQuality::all_bad();
  q_bad.att = G;

  bm.step(MobilityService::Global, at(Vec3(0, 0, 1.5)), StateQuality::all_good(), mission, 0.0);
  for (double t = 1.0; t < 3.9; t += 0.01) {
    bm.step(MobilityService::Attitude, at(Vec3(0, 0, 1.5)), q_bad, mission, t);
  }
  // 2.9 s of dead reckoning, then the service recovers
  const auto cmd = bm.step(MobilityService::Global, at(Vec3(0, 0, 1.5)),
                           StateQuality::all_good(), mission, 3.91);
  CHECK(bm.behavior() == Behavior::WaypointNav);
  CHECK_FALSE(bm.dead_reckon_since().has_value());
  CHECK(cmd.mode == ControlCommand::Mode::TrackMission);
}

TEST_CASE("AttitudeLand is absorbing until touchdown, then Landed") {
  BehaviorConfig cfg;
  BehaviorMachine bm(cfg);
  auto q_bad = StateQuality::all_bad();
  q_bad.att = G;
  const std::vector<Vec3> mission = {Vec3(5, 0, 1.5)};

  for (double t = 0.0; t < 3.2; t += 0.01) {
    bm.step(MobilityService::Attitude, at(Vec3(0, 0, 1.5)), q_bad, mission, t);
  }
  REQUIRE(bm.behavior() == Behavior::AttitudeLand);

  // recovery does not cancel a committed landing
  bm.step(MobilityService::Global, at(Vec3(0, 0, 1.0)), StateQuality::all_good(), mission, 3.3);
  CHECK(bm.behavior() == Behavior::AttitudeLand);

  bm.step(MobilityService::Attitude, at(Vec3(0, 0, 0.01)), q_bad, mission, 3.4);
  CHECK(bm.behavior() == Behavior::Landed);
  const auto cmd = bm.step(MobilityService::Attitude, at(Vec3(0, 0, 0.0)), q_bad, mission, 3.5);
  CHECK(bm.behavior() == Behavior::Landed);
  CHECK(cmd.mode == ControlCommand::Mode::Idle);
}

TEST_CASE("IMU loss lands immediately in open loop") {
  BehaviorMachine bm(BehaviorConfig{});
  const auto cmd = bm.step(MobilityService::OpenLoopLand, at(Vec3(0, 0, 1.5)),
                           StateQuality::all_bad(), {}, 0.5);
  CHECK(bm.behavior() == Behavior::AttitudeLand);
  CHECK(cmd.mode == ControlCommand::Mode::Descend);
  CHECK_FALSE(cmd.closes_att);
}

TEST_CASE("commands never close a loop on a Bad quality block") {
  BehaviorConfig cfg;
  const std::vector<Vec3> mission = {Vec3(5, 0, 1.5)};
  for (unsigned m = 0; m < 32; ++m) {
    const auto q = from_mask(m);
    const auto service = map_quality_to_service(q);
    BehaviorMachine bm(cfg);
    const auto cmd = bm.step(service, at(Vec3(1, 1, 1.5)), q, mission, 0.0);
    if (cmd.closes_p) CHECK(q.p == G);
    if (cmd.closes_gz) CHECK(q.gz == G);
    if (cmd.closes_vxy) CHECK(q.vxy == G);
    if (cmd.closes_vz) CHECK(q.vz == G);
    if (cmd.closes_att) CHECK(q.att == G);
  }
}

TEST_CASE("hover-z holds the altitude captured at entry") {
  BehaviorMachine bm(BehaviorConfig{});
  auto q = StateQuality::all_bad();
  q.att = G;
  q.gz = G;
  q.vz = G;
  const auto cmd1 = bm.step(MobilityService::ClosedLoopZ, at(Vec3(0, 0, 1.8)), q, {}, 0.0);
  CHECK(bm.behavior() == Behavior::HoverZ);
  CHECK(cmd1.mode == ControlCommand::Mode::HoldAltitude);
  CHECK(cmd1.target_z == doctest::Approx(1.8));
  const auto cmd2 = bm.step(MobilityService::ClosedLoopZ, at(Vec3(0, 0, 1.2)), q, {}, 0.5);
  CHECK(cmd2.target_z == doctest::Approx(1.8));
}
