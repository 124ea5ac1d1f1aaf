#include "hero/geometry.hpp"

#include <cmath>

#include "hero/errors.hpp"

namespace hero {

namespace {

constexpr double kDegenerateNorm = 1e-12;

// Canonical sign: w > 0, ties broken on the first nonzero component.
Quat canonicalize(Quat q) {
  double lead = q.w();
  if (lead == 0.0) lead = q.x();
  if (lead == 0.0) lead = q.y();
  if (lead == 0.0) lead = q.z();
  if (lead < 0.0) q.coeffs() = -q.coeffs();
  return q;
}

}  // namespace

UnitRotation::UnitRotation(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!(n > kDegenerateNorm)) {
    throw DegenerateRotation("rotation norm " + std::to_string(n) + " below 1e-12");
  }
  q_ = canonicalize(Quat(w / n, x / n, y / n, z / n));
}

UnitRotation UnitRotation::from_yaw_pitch_roll(double yaw, double pitch, double roll) {
  const Quat q = Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                 Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                 Eigen::AngleAxisd(roll, Vec3::UnitX());
  return UnitRotation(q);
}

UnitRotation UnitRotation::exp(const Vec3& rotvec) {
  const double angle = rotvec.norm();
  Quat q;
  if (angle < 1e-10) {
    // First-order series; renormalized by the constructor.
    q = Quat(1.0, 0.5 * rotvec.x(), 0.5 * rotvec.y(), 0.5 * rotvec.z());
  } else {
    const Vec3 axis = rotvec / angle;
    q = Quat(Eigen::AngleAxisd(angle, axis));
  }
  return UnitRotation(q);
}

Vec3 UnitRotation::log() const {
  // w >= 0 by canonicalization, so the angle is already in [0, pi].
  const Vec3 im(q_.x(), q_.y(), q_.z());
  const double im_norm = im.norm();
  if (im_norm < 1e-10) {
    return 2.0 * im;  // small-angle: log(q) ~ 2 * imaginary part
  }
  const double angle = 2.0 * std::atan2(im_norm, q_.w());
  return (angle / im_norm) * im;
}

Vec3 UnitRotation::yaw_pitch_roll() const {
  const Mat3 m = matrix();
  const double pitch = std::atan2(-m(2, 0), std::sqrt(m(0, 0) * m(0, 0) + m(1, 0) * m(1, 0)));
  const double yaw = std::atan2(m(1, 0), m(0, 0));
  const double roll = std::atan2(m(2, 1), m(2, 2));
  return {yaw, pitch, roll};
}

UnitRotation UnitRotation::inverse() const {
  return UnitRotation(canonicalize(q_.conjugate()), raw_tag{});
}

double UnitRotation::angle_to(const UnitRotation& other) const {
  // atan2 form: precise for near-identity relative rotations where acos
  // on the dot product loses ~1e-8 of resolution.
  const Quat d = q_.conjugate() * other.q_;
  const double im = Vec3(d.x(), d.y(), d.z()).norm();
  return 2.0 * std::atan2(im, std::abs(d.w()));
}

UnitRotation operator*(const UnitRotation& a, const UnitRotation& b) {
  Quat q = a.q_ * b.q_;
  q.normalize();
  return UnitRotation(canonicalize(q), UnitRotation::raw_tag{});
}

UnitRotation normalize(double w, double x, double y, double z) {
  return UnitRotation(w, x, y, z);
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.t = a.t + a.r.rotate(b.t);
  out.r = a.r * b.r;
  return out;
}

Pose inverse(const Pose& a) {
  Pose out;
  out.r = a.r.inverse();
  out.t = -out.r.rotate(a.t);
  return out;
}

Pose between(const Pose& a, const Pose& b) {
  return compose(inverse(a), b);
}

double translation_distance(const Pose& a, const Pose& b) {
  return (a.t - b.t).norm();
}

double rotation_distance(const Pose& a, const Pose& b) {
  return a.r.angle_to(b.r);
}

}  // namespace hero
