#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "hero/errors.hpp"
#include "hero/geometry.hpp"

using namespace hero;

namespace {

// Independent 3x3 matrix-arithmetic oracle (Shoemake form), kept free of the
// Pose/UnitRotation implementation path.
void quat_to_matrix_oracle(double w, double x, double y, double z, double R[3][3]) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  w /= n; x /= n; y /= n; z /= n;
  R[0][0] = 1 - 2 * (y * y + z * z);
  R[0][1] = 2 * (x * y - w * z);
  R[0][2] = 2 * (x * z + w * y);
  R[1][0] = 2 * (x * y + w * z);
  R[1][1] = 1 - 2 * (x * x + z * z);
  R[1][2] = 2 * (y * z - w * x);
  R[2][0] = 2 * (x * z - w * y);
  R[2][1] = 2 * (y * z + w * x);
  R[2][2] = 1 - 2 * (x * x + y * y);
}

struct OraclePose {
  double R[3][3];
  double t[3];
};

OraclePose to_oracle(const Pose& p) {
  OraclePose o;
  quat_to_matrix_oracle(p.r.w(), p.r.x(), p.r.y(), p.r.z(), o.R);
  o.t[0] = p.t.x();
  o.t[1] = p.t.y();
  o.t[2] = p.t.z();
  return o;
}

OraclePose compose_oracle(const OraclePose& a, const OraclePose& b) {
  OraclePose c;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      c.R[i][j] = 0;
      for (int k = 0; k < 3; ++k) c.R[i][j] += a.R[i][k] * b.R[k][j];
    }
    c.t[i] = a.t[i];
    for (int k = 0; k < 3; ++k) c.t[i] += a.R[i][k] * b.t[k];
  }
  return c;
}

double oracle_diff(const OraclePose& a, const Pose& b) {
  const OraclePose ob = to_oracle(b);
  double d = 0;
  for (int i = 0; i < 3; ++i) {
    d = std::max(d, std::abs(a.t[i] - ob.t[i]));
    for (int j = 0; j < 3; ++j) d = std::max(d, std::abs(a.R[i][j] - ob.R[i][j]));
  }
  return d;
}

Pose random_pose(std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  Pose p;
  p.t = Vec3(u(gen), u(gen), u(gen));
  p.r = UnitRotation(n(gen), n(gen), n(gen), n(gen));
  return p;
}

const UnitRotation yaw90 = UnitRotation::from_yaw_pitch_roll(M_PI / 2.0, 0.0, 0.0);

}  // namespace

TEST_CASE("compose: identity and pure translation") {
  std::mt19937_64 gen(7);
  const Pose x = random_pose(gen);
  const Pose ix = compose(Pose::identity(), x);
  CHECK(translation_distance(ix, x) < 1e-12);
  CHECK(rotation_distance(ix, x) < 1e-12);

  Pose a, b;
  a.t = Vec3(1, 0, 0);
  b.t = Vec3(2, 0, 0);
  const Pose c = compose(a, b);
  CHECK(c.t.isApprox(Vec3(3, 0, 0), 1e-12));
  CHECK(c.r.angle_to(UnitRotation::identity()) < 1e-12);
}

TEST_CASE("compose: rotation carries the second translation") {
  Pose a;
  a.r = yaw90;
  Pose b;
  b.t = Vec3(1, 0, 0);
  const Pose c = compose(a, b);
  CHECK(c.t.isApprox(Vec3(0, 1, 0), 1e-9));
  CHECK(c.r.angle_to(yaw90) < 1e-9);
}

TEST_CASE("inverse: identity, translation, rotated case vs matrix oracle") {
  const Pose id_inv = inverse(Pose::identity());
  CHECK(id_inv.t.norm() < 1e-12);
  CHECK(id_inv.r.angle_to(UnitRotation::identity()) < 1e-12);

  Pose a;
  a.t = Vec3(3, 0, 0);
  CHECK(inverse(a).t.isApprox(Vec3(-3, 0, 0), 1e-12));

  Pose b;
  b.t = Vec3(1, 0, 0);
  b.r = yaw90;
  const Pose binv = inverse(b);
  CHECK(binv.t.isApprox(Vec3(0, 1, 0), 1e-9));
  CHECK(binv.r.angle_to(UnitRotation::from_yaw_pitch_roll(-M_PI / 2.0, 0, 0)) < 1e-9);

  // compose(a, inverse(a)) == identity, checked with raw matrix arithmetic
  std::mt19937_64 gen(11);
  for (int i = 0; i < 1000; ++i) {
    const Pose p = random_pose(gen);
    const OraclePose prod = compose_oracle(to_oracle(p), to_oracle(inverse(p)));
    CHECK(oracle_diff(prod, Pose::identity()) < 1e-9);
  }
}

TEST_CASE("between: trivial cases and round-trip property") {
  std::mt19937_64 gen(13);
  const Pose x = random_pose(gen);
  const Pose d0 = between(x, x);
  CHECK(d0.t.norm() < 1e-9);
  CHECK(d0.r.angle_to(UnitRotation::identity()) < 1e-9);

  const Pose d1 = between(Pose::identity(), x);
  CHECK(translation_distance(d1, x) < 1e-12);
  CHECK(rotation_distance(d1, x) < 1e-12);

  for (int i = 0; i < 1000; ++i) {
    const Pose a = random_pose(gen);
    const Pose b = random_pose(gen);
    const Pose back = compose(a, between(a, b));
    CHECK(translation_distance(back, b) < 1e-9);
    CHECK(rotation_distance(back, b) < 1e-9);
  }
}

TEST_CASE("compose is associative within 1e-8") {
  std::mt19937_64 gen(17);
  for (int i = 0; i < 1000; ++i) {
    const Pose a = random_pose(gen);
    const Pose b = random_pose(gen);
    const Pose c = random_pose(gen);
    const Pose lhs = compose(compose(a, b), c);
    const Pose rhs = compose(a, compose(b, c));
    CHECK(translation_distance(lhs, rhs) < 1e-8);
    CHECK(rotation_distance(lhs, rhs) < 1e-8);
  }
}

TEST_CASE("normalize: canonical form and degenerate input") {
  const UnitRotation a = normalize(2, 0, 0, 0);
  CHECK(a.w() == doctest::Approx(1.0).epsilon(1e-12));

  const UnitRotation b = normalize(-1, 0, 0, 0);
  CHECK(b.w() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(normalize(0, 0, 0, 1e-15), DegenerateRotation);
}

TEST_CASE("rotations stay unit-norm and canonical after operations") {
  std::mt19937_64 gen(19);
  for (int i = 0; i < 1000; ++i) {
    const Pose a = random_pose(gen);
    const Pose b = random_pose(gen);
    for (const Pose& p : {compose(a, b), inverse(a), between(a, b)}) {
      CHECK(std::abs(p.r.quaternion().norm() - 1.0) < 1e-9);
      CHECK(p.r.w() >= 0.0);
    }
  }
}

TEST_CASE("yaw-pitch-roll round trip") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> yaw(-M_PI, M_PI);
  std::uniform_real_distribution<double> pitch(-1.4, 1.4);
  std::uniform_real_distribution<double> roll(-M_PI, M_PI);
  for (int i = 0; i < 200; ++i) {
    const double y = yaw(gen), p = pitch(gen), r = roll(gen);
    const UnitRotation q = UnitRotation::from_yaw_pitch_roll(y, p, r);
    const Vec3 ypr = q.yaw_pitch_roll();
    const UnitRotation q2 = UnitRotation::from_yaw_pitch_roll(ypr.x(), ypr.y(), ypr.z());
    CHECK(q.angle_to(q2) < 1e-9);
  }
}

TEST_CASE("exp/log round trip") {
  std::mt19937_64 gen(29);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const Vec3 v(n(gen), n(gen), n(gen));
    const Vec3 back = UnitRotation::exp(v).log();
    // log returns the wrapped representative; compare as rotations
    CHECK(UnitRotation::exp(v).angle_to(UnitRotation::exp(back)) < 1e-9);
  }
  CHECK(UnitRotation::exp(Vec3::Zero()).angle_to(UnitRotation::identity()) == 0.0);
  const Vec3 tiny(1e-12, -2e-12, 5e-13);
  CHECK((UnitRotation::exp(tiny).log() - tiny).norm() < 1e-15);
}
