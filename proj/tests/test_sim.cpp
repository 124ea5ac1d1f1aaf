#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hero/errors.hpp"
#include "hero/sim.hpp"

using namespace hero;

namespace {

TrajectorySpec hover_spec() {
  TrajectorySpec t;
  t.kind = TrajectorySpec::Kind::Hover;
  t.duration = 20.0;
  t.start = Vec3(1, 2, 1.5);
  return t;
}

TrajectorySpec line_spec(double speed = 1.0) {
  TrajectorySpec t;
  t.kind = TrajectorySpec::Kind::Line;
  t.duration = 20.0;
  t.speed = speed;
  t.start = Vec3::Zero();
  t.direction = Vec3(1, 0, 0);
  return t;
}

TrajectorySpec circle_spec() {
  TrajectorySpec t;
  t.kind = TrajectorySpec::Kind::Circle;
  t.duration = 30.0;
  t.radius = 2.0;
  t.speed = 2.0 * M_PI * t.radius / 10.0;  // 10 s period
  t.center = Vec3(0, 0, 1.5);
  return t;
}

// Central-difference consistency of the analytic derivatives.
void check_kinematic_consistency(const TrajectorySpec& spec, double t) {
  const double h = 1e-5;
  const RobotState s = ground_truth(spec, t);
  const RobotState sp = ground_truth(spec, t + h);
  const RobotState sm = ground_truth(spec, t - h);
  const Vec3 v_fd = (sp.p - sm.p) / (2 * h);
  const Vec3 v_world = s.r.rotate(s.v);
  CHECK((v_fd - v_world).norm() < 1e-6 * (1.0 + v_world.norm()));

  const Vec3 a_fd = (sp.r.rotate(sp.v) - sm.r.rotate(sm.v)) / (2 * h);
  const Vec3 a_world = s.r.rotate(s.a);
  CHECK((a_fd - a_world).norm() < 1e-5 * (1.0 + a_world.norm()));
}

}  // namespace

TEST_CASE("hover ground truth is static") {
  const auto s = ground_truth(hover_spec(), 7.3);
  CHECK(s.p.isApprox(Vec3(1, 2, 1.5)));
  CHECK(s.v.norm() == 0.0);
  CHECK(s.a.norm() == 0.0);
  CHECK(s.w.norm() == 0.0);
}

TEST_CASE("line ground truth at closed-form points") {
  const auto s = ground_truth(line_spec(1.0), 5.0);
  CHECK(s.p.isApprox(Vec3(5, 0, 0), 1e-12));
  CHECK(s.v.isApprox(Vec3(1, 0, 0), 1e-12));  // body x is along the path
}

TEST_CASE("circle centripetal acceleration magnitude") {
  const auto spec = circle_spec();
  const double omega = 2.0 * M_PI / 10.0;
  for (double t : {0.3, 2.7, 6.1, 9.9}) {
    const auto s = ground_truth(spec, t);
    CHECK(s.a.norm() == doctest::Approx(omega * omega * spec.radius).epsilon(1e-9));
    CHECK(s.w.z() == doctest::Approx(omega));
  }
}

TEST_CASE("ground truth derivatives match finite differences") {
  for (double t : {0.5, 3.33, 8.25, 15.0}) {
    check_kinematic_consistency(hover_spec(), t);
    check_kinematic_consistency(line_spec(0.8), t);
    check_kinematic_consistency(circle_spec(), t);
  }
  TrajectorySpec tunnel;
  tunnel.kind = TrajectorySpec::Kind::TunnelPath;
  tunnel.duration = 30.0;
  tunnel.speed = 1.0;
  tunnel.path = {Vec3(0, 0, 1.5), Vec3(10, 0, 1.5), Vec3(10, 10, 1.5)};
  for (double t : {1.0, 5.0, 14.0}) check_kinematic_consistency(tunnel, t);  // off corners
}

TEST_CASE("trajectory time bounds") {
  CHECK_THROWS_AS(ground_truth(hover_spec(), -0.5), OutOfRange);
  CHECK_THROWS_AS(ground_truth(hover_spec(), 20.5), OutOfRange);
}

TEST_CASE("rng forks are label-stable and order-independent") {
  const Rng root(1234);
  Rng a1 = root.fork("stream:a");
  Rng b1 = root.fork("stream:b");
  // forking again from the same root gives the same substreams
  Rng a2 = root.fork("stream:a");
  for (int i = 0; i < 100; ++i) CHECK(a1.gaussian() == a2.gaussian());
  // different labels give different sequences
  Rng a3 = root.fork("stream:a");
  bool all_same = true;
  for (int i = 0; i < 16; ++i) all_same = all_same && (a3.gaussian() == b1.gaussian());
  CHECK_FALSE(all_same);
}

TEST_CASE("gaussian sampler statistics") {
  Rng rng(99);
  const int n = 20000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.gaussian();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("noise-free stream reports the exact relative pose") {
  SimStreamSpec spec;
  spec.id = "s";
  spec.rate = 20.0;
  spec.sigma_pos = 0.0;
  spec.sigma_rot = 0.0;
  spec.sigma_vel = 0.0;
  const auto gt0 = ground_truth(line_spec(1.0), 0.0);
  SyntheticStream stream(spec, Rng(1).fork("s"), gt0.pose());

  const auto at5 = ground_truth(line_spec(1.0), 5.0);
  auto msg = stream.poll(0.0, gt0, {});
  REQUIRE(msg.has_value());
  CHECK(msg->pose->t.norm() < 1e-12);  // at the origin of its own frame

  // advance the emit grid to t = 5
  for (double t = 0.05; t < 5.0 - 1e-9; t += 0.05) stream.poll(t, ground_truth(line_spec(1.0), t), {});
  msg = stream.poll(5.0, at5, {});
  REQUIRE(msg.has_value());
  const Pose expect = compose(inverse(gt0.pose()), at5.pose());
  CHECK((msg->pose->t - expect.t).norm() < 1e-12);
  CHECK(msg->init_epoch == 0);
}

TEST_CASE("gap withholds messages; jump displaces by the configured offset") {
  SimStreamSpec spec;
  spec.id = "s";
  spec.sigma_pos = 0.0;
  spec.sigma_rot = 0.0;
  const auto gt = ground_truth(hover_spec(), 1.0);
  SyntheticStream stream(spec, Rng(1).fork("s"), ground_truth(hover_spec(), 0.0).pose());

  FailureEvent gap{"s", 0.9, 1.2, FailureMode::Gap, {}, 0, {}, {}};
  CHECK_FALSE(stream.poll(1.0, gt, {&gap}).has_value());

  FailureEvent jump{"s", 1.0, 2.0, FailureMode::Jump, Vec3(10, 0, 0), 0, {}, {}};
  const auto msg = stream.poll(1.05, gt, {&jump});
  REQUIRE(msg.has_value());
  CHECK((msg->pose->t - Vec3(10, 0, 0)).norm() < 1e-12);  // hover: relative pose zero
}

TEST_CASE("divergence inflates the reported covariance linearly") {
  SimStreamSpec spec;
  spec.id = "s";
  spec.base_cov = 1e-4;
  const auto gt = ground_truth(hover_spec(), 3.0);
  SyntheticStream stream(spec, Rng(1).fork("s"), ground_truth(hover_spec(), 0.0).pose());
  FailureEvent div{"s", 1.0, 10.0, FailureMode::Divergence, {}, 0.5, {}, {}};
  // march the grid to t = 3
  for (double t = 0.0; t < 3.0 - 1e-9; t += 0.05) stream.poll(t, ground_truth(hover_spec(), t), {});
  const auto msg = stream.poll(3.0, gt, {&div});
  REQUIRE(msg.has_value());
  CHECK(msg->covariance->position(0, 0) == doctest::Approx(1e-4 + 0.5 * 2.0).epsilon(1e-9));
}

TEST_CASE("reinit restarts the stream at identity with the next epoch") {
  SimStreamSpec spec;
  spec.id = "s";
  spec.sigma_pos = 0.0;
  spec.sigma_rot = 0.0;
  spec.lifecycle.reinit_delay = 1.0;
  const auto line = line_spec(1.0);
  SyntheticStream stream(spec, Rng(1).fork("s"), ground_truth(line, 0.0).pose());

  stream.poll(0.0, ground_truth(line, 0.0), {});
  stream.command_reinit(2.0);
  CHECK_FALSE(stream.poll(2.5, ground_truth(line, 2.5), {}).has_value());
  const auto msg = stream.poll(3.0, ground_truth(line, 3.0), {});
  REQUIRE(msg.has_value());
  CHECK(msg->init_epoch == 1);
  CHECK(msg->pose->t.norm() < 1e-12);  // fresh origin at the reinit pose
}

TEST_CASE("imu model: hover sample and bias recovery") {
  ImuSpec spec;
  spec.sigma_gyro = 0.0;
  spec.sigma_accel = 0.0;
  Rng rng(5);
  const auto hover = ground_truth(hover_spec(), 1.0);
  const auto s = simulate_imu(hover, spec, rng);
  CHECK((s.accel - Vec3(0, 0, 9.81)).norm() < 1e-12);
  CHECK(s.gyro.norm() < 1e-12);

  // Monte-Carlo mean of (sample - truth) recovers the configured bias.
  ImuSpec noisy;
  noisy.sigma_gyro = 0.01;
  noisy.sigma_accel = 0.05;
  noisy.bias_gyro = Vec3(0.003, -0.001, 0.002);
  noisy.bias_accel = Vec3(0.02, 0.01, -0.03);
  const int n = 10000;
  Vec3 gyro_sum = Vec3::Zero(), accel_sum = Vec3::Zero();
  double accel_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto sample = simulate_imu(hover, noisy, rng);
    gyro_sum += sample.gyro;
    accel_sum += sample.accel - Vec3(0, 0, 9.81);
    accel_sq += (sample.accel.x() - noisy.bias_accel.x()) *
                (sample.accel.x() - noisy.bias_accel.x());
  }
  const Vec3 gyro_mean = gyro_sum / n;
  const Vec3 accel_mean = accel_sum / n;
  const double tol_g = 3.0 * noisy.sigma_gyro / std::sqrt(double(n));
  const double tol_a = 3.0 * noisy.sigma_accel / std::sqrt(double(n));
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(gyro_mean[i] - noisy.bias_gyro[i]) < 3.0 * tol_g);
    CHECK(std::abs(accel_mean[i] - noisy.bias_accel[i]) < 3.0 * tol_a);
  }
  // sample variance within 10%
  CHECK(accel_sq / n == doctest::Approx(noisy.sigma_accel * noisy.sigma_accel).epsilon(0.10));
}

TEST_CASE("stream noise statistics match the configuration within 10%") {
  SimStreamSpec spec;
  spec.id = "s";
  spec.rate = 20.0;
  spec.sigma_pos = 0.02;
  spec.sigma_vel = 0.03;
  spec.kind = StreamKind::PoseVelocity;
  TrajectorySpec hover = hover_spec();
  hover.duration = 1e6;
  const auto gt0 = ground_truth(hover, 0.0);
  SyntheticStream stream(spec, Rng(31).fork("s"), gt0.pose());

  const int n = 12000;
  double pos_sq = 0.0, vel_sq = 0.0;
  int count = 0;
  for (int k = 0; k < n; ++k) {
    const double t = k * 0.05;
    RobotState gt = ground_truth(hover, t);
    gt.stamp = t;
    const auto msg = stream.poll(t, gt, {});
    REQUIRE(msg.has_value());
    // hover at the stream origin: the reported values are pure noise
    pos_sq += msg->pose->t.squaredNorm() / 3.0;
    vel_sq += msg->velocity->squaredNorm() / 3.0;
    ++count;
  }
  CHECK(pos_sq / count == doctest::Approx(spec.sigma_pos * spec.sigma_pos).epsilon(0.10));
  CHECK(vel_sq / count == doctest::Approx(spec.sigma_vel * spec.sigma_vel).epsilon(0.10));
}

TEST_CASE("plant follows the script and stops when idle") {
  ActualKinematics plant(line_spec(1.0), 0.01);
  ControlCommand track;
  track.mode = ControlCommand::Mode::TrackMission;
  for (int k = 1; k <= 500; ++k) plant.step(track, k * 0.01);
  // Short ramp-in, then 1 m/s along x.
  CHECK(plant.state().p.x() == doctest::Approx(5.0).epsilon(0.05));
  CHECK(plant.state().r.rotate(plant.state().v).x() == doctest::Approx(1.0).epsilon(1e-6));

  ControlCommand idle;
  idle.mode = ControlCommand::Mode::HoldVelocity;
  for (int k = 501; k <= 600; ++k) plant.step(idle, k * 0.01);
  CHECK(plant.state().v.norm() < 1e-9);
}
