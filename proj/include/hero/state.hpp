#ifndef HERO_STATE_HPP
#define HERO_STATE_HPP

#include "hero/geometry.hpp"
#include "hero/types.hpp"

namespace hero {

/// Full kinematic state. Position and orientation are in the world frame;
/// velocities and accelerations are in the body frame.
struct RobotState {
  double stamp = 0.0;
  Vec3 p{Vec3::Zero()};
  UnitRotation r;
  Vec3 v{Vec3::Zero()};      // linear velocity, body
  Vec3 w{Vec3::Zero()};      // angular velocity, body
  Vec3 a{Vec3::Zero()};      // linear acceleration, body
  Vec3 alpha{Vec3::Zero()};  // angular acceleration, body

  Pose pose() const { return Pose{p, r}; }
  bool finite() const;
};

enum class Q : std::uint8_t { Bad = 0, Good = 1 };

/// Binary quality over the five state blocks: position, height, horizontal
/// velocity, vertical velocity, and the attitude block (R, w, a, alpha).
struct StateQuality {
  Q p = Q::Bad;
  Q gz = Q::Bad;
  Q vxy = Q::Bad;
  Q vz = Q::Bad;
  Q att = Q::Bad;

  static StateQuality all_good() { return {Q::Good, Q::Good, Q::Good, Q::Good, Q::Good}; }
  static StateQuality all_bad() { return {}; }

  bool operator==(const StateQuality&) const = default;
};

/// Per-bit conservative merge: Good only if both inputs are Good.
StateQuality worst_quality(const StateQuality& a, const StateQuality& b);

/// 3x3 covariance blocks for position (m^2) and velocity ((m/s)^2).
struct CovarianceBlock {
  Mat3 position{Mat3::Zero()};
  Mat3 velocity{Mat3::Zero()};
};

/// Symmetric within sym_tol and PSD with min eigenvalue >= eig_floor.
bool is_valid_covariance(const Mat3& m, double sym_tol = 1e-12, double eig_floor = -1e-10);

}  // namespace hero

#endif  // HERO_STATE_HPP
