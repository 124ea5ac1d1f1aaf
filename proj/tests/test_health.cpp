#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "hero/errors.hpp"
#include "hero/health.hpp"

using namespace hero;

namespace {

CheckConfig default_cfg() {
  CheckConfig c;
  c.nominal_rate = 20.0;
  c.gap_factor = 3.0;
  c.v_max = 2.0;
  c.jump_margin = 0.1;
  c.cov_trace_max = 0.5;
  c.intensity_min = 0.05;
  c.intensity_var_min = 1e-4;
  c.invalid_fraction_max = 0.5;
  return c;
}

OdometryMessage pose_msg(double stamp, const Vec3& p, int epoch = 0) {
  OdometryMessage m;
  m.stream_id = "s";
  m.stamp = stamp;
  Pose pose;
  pose.t = p;
  m.pose = pose;
  m.init_epoch = epoch;
  return m;
}

RobotState prev_at(double stamp, const Vec3& p) {
  RobotState s;
  s.stamp = stamp;
  s.p = p;
  return s;
}

SensorStats healthy_stats() { return SensorStats{20.0, 0.6, 0.02, 0.01}; }

}  // namespace

TEST_CASE("rate_check thresholds") {
  const auto cfg = default_cfg();
  // one nominal period
  CHECK(rate_check(0.0, 0.05, cfg).verdict == Verdict::Pass);
  // 0.20 s: beyond 3/20 = 0.15 but within 0.30
  CHECK(rate_check(0.0, 0.20, cfg).verdict == Verdict::SoftFail);
  CHECK(rate_check(0.0, 1.0, cfg).verdict == Verdict::HardFail);
  // inclusive boundaries pass on the lenient side
  CHECK(rate_check(0.0, 0.15, cfg).verdict == Verdict::Pass);
  CHECK(rate_check(0.0, 0.30, cfg).verdict == Verdict::SoftFail);
}

TEST_CASE("rate_check monotonicity: larger gaps never less severe") {
  const auto cfg = default_cfg();
  int prev = 0;
  for (double gap = 0.0; gap <= 1.0; gap += 0.001) {
    const int sev = static_cast<int>(rate_check(0.0, gap, cfg).verdict);
    CHECK(sev >= prev);
    prev = sev;
  }
}

TEST_CASE("jump_check bound and epoch guard") {
  const auto cfg = default_cfg();
  // no motion over any dt
  CHECK(jump_check(prev_at(0.0, Vec3::Zero()), 0, pose_msg(1.0, Vec3::Zero()), cfg).verdict ==
        Verdict::Pass);
  // bound = 2 * 0.05 + 0.1 = 0.2; a 10 m step fails hard
  CHECK(jump_check(prev_at(0.0, Vec3::Zero()), 0, pose_msg(0.05, Vec3(10, 0, 0)), cfg).verdict ==
        Verdict::HardFail);
  // exactly at the bound passes (inclusive)
  CHECK(jump_check(prev_at(0.0, Vec3::Zero()), 0, pose_msg(0.05, Vec3(0.2, 0, 0)), cfg).verdict ==
        Verdict::Pass);
  CHECK_THROWS_AS(jump_check(prev_at(0.0, Vec3::Zero()), 0, pose_msg(0.05, Vec3(1, 0, 0), 1), cfg),
                  EpochMismatch);
}

TEST_CASE("jump_check is translation invariant") {
  const auto cfg = default_cfg();
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 300; ++i) {
    const Vec3 p0(u(gen), u(gen), u(gen));
    const Vec3 step(u(gen) * 0.002, u(gen) * 0.002, 0.0);
    const Vec3 offset(u(gen), u(gen), u(gen));
    const auto a = jump_check(prev_at(0.0, p0), 0, pose_msg(0.05, p0 + step), cfg);
    const auto b = jump_check(prev_at(0.0, p0 + offset), 0, pose_msg(0.05, p0 + step + offset), cfg);
    CHECK(a.verdict == b.verdict);
  }
}

TEST_CASE("divergence_check trace threshold") {
  const auto cfg = default_cfg();
  CovarianceBlock zero;
  CHECK(divergence_check(zero, cfg).verdict == Verdict::Pass);

  CovarianceBlock big;
  big.position = Mat3::Identity();  // trace 3 > 0.5
  CHECK(divergence_check(big, cfg).verdict == Verdict::HardFail);

  CovarianceBlock ok;
  ok.position = Mat3::Identity() * 0.1;  // trace 0.3 <= 0.5
  CHECK(divergence_check(ok, cfg).verdict == Verdict::Pass);

  CovarianceBlock broken;
  broken.position = Mat3::Identity();
  broken.position(0, 1) = 0.2;  // asymmetric
  CHECK_THROWS_AS(divergence_check(broken, cfg), InvalidCovariance);
}

TEST_CASE("sensor_data_check soft failures") {
  const auto cfg = default_cfg();
  CHECK(sensor_data_check(healthy_stats(), cfg).verdict == Verdict::Pass);

  auto dusty = healthy_stats();
  dusty.invalid_fraction = 0.9;  // dense dust on the scanner
  CHECK(sensor_data_check(dusty, cfg).verdict == Verdict::SoftFail);

  auto dark = healthy_stats();
  dark.intensity_var = 0.0;  // featureless darkness
  CHECK(sensor_data_check(dark, cfg).verdict == Verdict::SoftFail);

  auto slow = healthy_stats();
  slow.output_rate = 1.0;
  CHECK(sensor_data_check(slow, cfg).verdict == Verdict::SoftFail);
}

TEST_CASE("voting_check: agreement, outlier, insufficient streams") {
  const auto cfg = default_cfg();
  std::vector<std::pair<std::string, Vec3>> same = {
      {"a", Vec3(1, 0, 0)}, {"b", Vec3(1, 0, 0)}, {"c", Vec3(1, 0, 0)}};
  for (const auto& [id, res] : voting_check(same, cfg)) {
    CHECK(res.verdict == Verdict::Pass);
  }

  // median = 1.01, abs deviations {0.01, 0, 7.99}, MAD = 0.01 -> floor 0.05
  // scale = 3 * 0.05 = 0.15; only the third stream exceeds it
  std::vector<std::pair<std::string, Vec3>> one_off = {
      {"a", Vec3(1.0, 0, 0)}, {"b", Vec3(1.01, 0, 0)}, {"c", Vec3(9.0, 0, 0)}};
  const auto res = voting_check(one_off, cfg);
  CHECK(res.at("a").verdict == Verdict::Pass);
  CHECK(res.at("b").verdict == Verdict::Pass);
  CHECK(res.at("c").verdict == Verdict::HardFail);

  std::vector<std::pair<std::string, Vec3>> two = {{"a", Vec3(1, 0, 0)}, {"b", Vec3(2, 0, 0)}};
  CHECK_THROWS_AS(voting_check(two, cfg), InsufficientStreams);
}

TEST_CASE("voting_check flags at most floor((n-1)/2) when a majority agrees") {
  const auto cfg = default_cfg();
  std::mt19937_64 gen(31);
  std::normal_distribution<double> small(0.0, 0.01);
  std::uniform_real_distribution<double> wild(-20.0, 20.0);
  std::uniform_int_distribution<int> n_pick(3, 7);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = n_pick(gen);
    const int majority = n / 2 + 1;
    const Vec3 base(wild(gen) * 0.05, wild(gen) * 0.05, wild(gen) * 0.05);
    std::vector<std::pair<std::string, Vec3>> vels;
    for (int i = 0; i < n; ++i) {
      Vec3 v = base;
      if (i >= majority) v = Vec3(wild(gen), wild(gen), wild(gen));
      v += Vec3(small(gen), small(gen), small(gen));
      vels.emplace_back("s" + std::to_string(i), v);
    }
    int flagged = 0;
    for (const auto& [id, r] : voting_check(vels, cfg)) {
      if (r.verdict == Verdict::HardFail) ++flagged;
    }
    CHECK(flagged <= (n - 1) / 2);
  }
}

TEST_CASE("median and MAD helpers") {
  CHECK(median({1.0, 2.0, 3.0}) == doctest::Approx(2.0));
  CHECK(median({1.0, 2.0, 3.0, 4.0}) == doctest::Approx(2.5));
  CHECK(median_absolute_deviation({1.0, 1.0, 9.0}, 1.0) == doctest::Approx(0.0));
  CHECK(median_absolute_deviation({1.0, 2.0, 4.0}, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("checks are deterministic") {
  const auto cfg = default_cfg();
  for (int i = 0; i < 10; ++i) {
    CHECK(rate_check(0.0, 0.2, cfg).verdict == rate_check(0.0, 0.2, cfg).verdict);
    CHECK(rate_check(0.0, 0.2, cfg).detail == rate_check(0.0, 0.2, cfg).detail);
  }
}
