#ifndef HERO_TYPES_HPP
#define HERO_TYPES_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hero {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec15 = Eigen::Matrix<double, 15, 1>;
using Mat15 = Eigen::Matrix<double, 15, 15>;
using Mat6x15 = Eigen::Matrix<double, 6, 15>;

inline Vec3 gravity() { return {0.0, 0.0, -9.81}; }

inline Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0;
  return s;
}

}  // namespace hero

#endif  // HERO_TYPES_HPP
