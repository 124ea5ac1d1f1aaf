#include "hero/fusion.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "hero/errors.hpp"

namespace hero {

ErrorStateFilter::ErrorStateFilter(FilterState init, ProcessNoise noise,
                                   double attitude_meas_var)
    : state_(std::move(init)), noise_(noise), attitude_meas_var_(attitude_meas_var) {}

void ErrorStateFilter::predict(const ImuSample& imu, double dt) {
  if (!(dt > 0.0) || dt > 0.1) {
    throw InvalidDt("predict dt " + std::to_string(dt) + " outside (0, 0.1]");
  }
  const Vec3 omega = imu.gyro - state_.gyro_bias;
  const Vec3 accel_body = imu.accel - state_.accel_bias;
  const Mat3 R = state_.r.matrix();

  // Nominal kinematics.
  state_.v += (R * accel_body + gravity()) * dt;
  state_.p += state_.v * dt;
  const UnitRotation dq = UnitRotation::exp(omega * dt);
  state_.r = state_.r * dq;

  // Error-state transition.
  Mat15 F = Mat15::Identity();
  F.block<3, 3>(kP, kV) = Mat3::Identity() * dt;
  F.block<3, 3>(kV, kTh) = -R * skew(accel_body) * dt;
  F.block<3, 3>(kV, kBa) = -R * dt;
  F.block<3, 3>(kTh, kTh) = dq.matrix().transpose();
  F.block<3, 3>(kTh, kBg) = -Mat3::Identity() * dt;

  Mat15 Q = Mat15::Zero();
  const double dt2 = dt * dt;
  Q.block<3, 3>(kV, kV) = Mat3::Identity() * noise_.sigma_accel * noise_.sigma_accel * dt2;
  Q.block<3, 3>(kTh, kTh) = Mat3::Identity() * noise_.sigma_gyro * noise_.sigma_gyro * dt2;
  Q.block<3, 3>(kBg, kBg) =
      Mat3::Identity() * noise_.sigma_gyro_bias * noise_.sigma_gyro_bias * dt;
  Q.block<3, 3>(kBa, kBa) =
      Mat3::Identity() * noise_.sigma_accel_bias * noise_.sigma_accel_bias * dt;

  state_.P = F * state_.P * F.transpose() + Q;
  symmetrize();
}

Vec6 ErrorStateFilter::pose_residual(const FilterState& s, const Pose& meas) {
  Vec6 y;
  y.head<3>() = meas.t - s.p;
  y.tail<3>() = (s.r.inverse() * meas.r).log();
  return y;
}

Mat6x15 ErrorStateFilter::pose_measurement_jacobian() {
  Mat6x15 H = Mat6x15::Zero();
  H.block<3, 3>(0, kP) = Mat3::Identity();
  H.block<3, 3>(3, kTh) = Mat3::Identity();
  return H;
}

FilterState ErrorStateFilter::perturb(const FilterState& s, const Vec15& dx) {
  FilterState out = s;
  out.p += dx.segment<3>(kP);
  out.v += dx.segment<3>(kV);
  out.r = s.r * UnitRotation::exp(dx.segment<3>(kTh));
  out.gyro_bias += dx.segment<3>(kBg);
  out.accel_bias += dx.segment<3>(kBa);
  return out;
}

void ErrorStateFilter::update_pose(const Pose& meas_world, const CovarianceBlock& meas_cov) {
  const Vec6 y = pose_residual(state_, meas_world);
  const Mat6x15 H = pose_measurement_jacobian();

  Mat6 R = Mat6::Zero();
  R.topLeftCorner<3, 3>() = meas_cov.position;
  R.bottomRightCorner<3, 3>() = Mat3::Identity() * attitude_meas_var_;

  const Mat6 S = H * state_.P * H.transpose() + R;
  const Eigen::LDLT<Mat6> ldlt(S);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) {
    throw NumericalFailure("pose update innovation covariance is not invertible");
  }
  const Eigen::Matrix<double, 15, 6> K = ldlt.solve((H * state_.P).eval()).transpose();

  last_innovation_ = y;
  inject(K * y);
  joseph_update(K, H, R);
}

void ErrorStateFilter::update_height(double z_meas, double z_var) {
  const double innov = z_meas - state_.p.z();
  const double s = state_.P(2, 2) + z_var;
  const double gain = state_.P(2, 2) / s;

  // Correction restricted to the z position component; the covariance is
  // propagated in Joseph form for the same restricted gain.
  Vec15 K = Vec15::Zero();
  K(2) = gain;
  Eigen::Matrix<double, 1, 15> H = Eigen::Matrix<double, 1, 15>::Zero();
  H(2) = 1.0;

  state_.p.z() += gain * innov;
  Eigen::Matrix<double, 1, 1> R;
  R(0, 0) = z_var;
  joseph_update(K, H, R);
}

void ErrorStateFilter::update_velocity_world(const Vec3& v_meas, const Mat3& meas_cov) {
  Eigen::Matrix<double, 3, 15> H = Eigen::Matrix<double, 3, 15>::Zero();
  H.block<3, 3>(0, kV) = Mat3::Identity();

  const Mat3 S = H * state_.P * H.transpose() + meas_cov;
  const Eigen::LDLT<Mat3> ldlt(S);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) {
    throw NumericalFailure("velocity update innovation covariance is not invertible");
  }
  const Eigen::Matrix<double, 15, 3> K = ldlt.solve((H * state_.P).eval()).transpose();

  inject(K * (v_meas - state_.v));
  joseph_update(K, H, meas_cov);
}

void ErrorStateFilter::update_stream_pose(const Pose& local_pose,
                                          const CovarianceBlock& meas_cov) {
  update_pose(compose(world_from_stream_, local_pose), meas_cov);
}

void ErrorStateFilter::transform_world_frame(const Pose& delta) {
  const Mat3 Rd = delta.r.matrix();
  state_.p = delta.t + Rd * state_.p;
  state_.v = Rd * state_.v;
  state_.r = delta.r * state_.r;

  Mat15 J = Mat15::Identity();
  J.block<3, 3>(kP, kP) = Rd;
  J.block<3, 3>(kV, kV) = Rd;
  state_.P = J * state_.P * J.transpose();
  symmetrize();

  world_from_stream_ = compose(delta, world_from_stream_);
}

void ErrorStateFilter::inject(const Vec15& dx) {
  state_.p += dx.segment<3>(kP);
  state_.v += dx.segment<3>(kV);
  state_.r = state_.r * UnitRotation::exp(dx.segment<3>(kTh));
  state_.gyro_bias += dx.segment<3>(kBg);
  state_.accel_bias += dx.segment<3>(kBa);
}

void ErrorStateFilter::joseph_update(const Eigen::Ref<const Eigen::MatrixXd>& K,
                                     const Eigen::Ref<const Eigen::MatrixXd>& H,
                                     const Eigen::Ref<const Eigen::MatrixXd>& R) {
  const Mat15 IKH = Mat15::Identity() - K * H;
  state_.P = IKH * state_.P * IKH.transpose() + K * R * K.transpose();
  symmetrize();
}

}  // namespace hero
