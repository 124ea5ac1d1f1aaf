#ifndef HERO_GEOMETRY_HPP
#define HERO_GEOMETRY_HPP

#include "hero/types.hpp"

namespace hero {

/// Rotation stored as a unit quaternion, canonicalized to w >= 0 so that
/// equal rotations compare bitwise equal.
class UnitRotation {
 public:
  UnitRotation() : q_(1.0, 0.0, 0.0, 0.0) {}

  /// Normalizes and canonicalizes. Throws DegenerateRotation if the input
  /// norm is <= 1e-12.
  UnitRotation(double w, double x, double y, double z);
  explicit UnitRotation(const Quat& q) : UnitRotation(q.w(), q.x(), q.y(), q.z()) {}

  static UnitRotation identity() { return UnitRotation(); }

  /// ZYX convention: yaw about world z, then pitch, then roll.
  static UnitRotation from_yaw_pitch_roll(double yaw, double pitch, double roll);

  /// Exponential map from a rotation vector (axis * angle, radians).
  static UnitRotation exp(const Vec3& rotvec);

  /// Logarithm map back to a rotation vector; angle in [0, pi].
  Vec3 log() const;

  Vec3 yaw_pitch_roll() const;
  Mat3 matrix() const { return q_.toRotationMatrix(); }
  Vec3 rotate(const Vec3& v) const { return q_ * v; }
  UnitRotation inverse() const;

  /// Angle of the relative rotation this->inverse() * other, in [0, pi].
  double angle_to(const UnitRotation& other) const;

  const Quat& quaternion() const { return q_; }
  double w() const { return q_.w(); }
  double x() const { return q_.x(); }
  double y() const { return q_.y(); }
  double z() const { return q_.z(); }

  friend UnitRotation operator*(const UnitRotation& a, const UnitRotation& b);

 private:
  struct raw_tag {};
  UnitRotation(const Quat& q, raw_tag) : q_(q) {}
  Quat q_;
};

/// Rebuilds a UnitRotation from an arbitrary (w, x, y, z) 4-vector.
/// Throws DegenerateRotation when the norm is <= 1e-12.
UnitRotation normalize(double w, double x, double y, double z);

/// Rigid-body transform: rotation plus translation (meters).
struct Pose {
  Vec3 t{Vec3::Zero()};
  UnitRotation r;

  static Pose identity() { return Pose{}; }
};

/// a then b, with b expressed in a's frame:
/// t = a.t + a.r * b.t, r = a.r * b.r.
Pose compose(const Pose& a, const Pose& b);

/// Inverse transform: compose(a, inverse(a)) == identity.
Pose inverse(const Pose& a);

/// Relative delta d with compose(a, d) == b.
Pose between(const Pose& a, const Pose& b);

/// Translation distance plus rotation angle between two poses.
double translation_distance(const Pose& a, const Pose& b);
double rotation_distance(const Pose& a, const Pose& b);

}  // namespace hero

#endif  // HERO_GEOMETRY_HPP
