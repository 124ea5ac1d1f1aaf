#ifndef HERO_FUSION_HPP
#define HERO_FUSION_HPP

#include "hero/geometry.hpp"
#include "hero/state.hpp"
#include "hero/types.hpp"

namespace hero {

struct ImuSample {
  double stamp = 0.0;
  Vec3 gyro{Vec3::Zero()};   // rad/s, body
  Vec3 accel{Vec3::Zero()};  // m/s^2, body, specific force (gravity included)
};

/// Continuous-time process noise densities for the IMU strapdown model.
struct ProcessNoise {
  double sigma_accel = 0.05;        // m/s^2
  double sigma_gyro = 0.002;        // rad/s
  double sigma_accel_bias = 1e-4;   // m/s^2 / sqrt(s)
  double sigma_gyro_bias = 1e-5;    // rad/s / sqrt(s)
};

/// Nominal state plus 15x15 error covariance over
/// (dp, dv, dtheta, db_gyro, db_accel).
struct FilterState {
  Vec3 p{Vec3::Zero()};  // world
  Vec3 v{Vec3::Zero()};  // world
  UnitRotation r;        // body -> world
  Vec3 gyro_bias{Vec3::Zero()};
  Vec3 accel_bias{Vec3::Zero()};
  Mat15 P{Mat15::Identity() * 1e-4};
};

/// Loosely coupled error-state EKF: IMU strapdown prediction corrected by
/// pose measurements from one odometry stream, with an optional scalar
/// height update. Attitude error is body-side (r_true = r_est * exp(dtheta)).
class ErrorStateFilter {
 public:
  static constexpr int kP = 0, kV = 3, kTh = 6, kBg = 9, kBa = 12;

  ErrorStateFilter(FilterState init, ProcessNoise noise, double attitude_meas_var = 4e-4);

  /// Strapdown propagation over dt. Throws InvalidDt unless 0 < dt <= 0.1.
  void predict(const ImuSample& imu, double dt);

  /// 6D position + attitude update with a world-frame pose measurement.
  /// Throws NumericalFailure if the innovation covariance is not invertible.
  void update_pose(const Pose& meas_world, const CovarianceBlock& meas_cov);

  /// Scalar height update applied to the z position component only; p_x and
  /// p_y are left bitwise unchanged.
  void update_height(double z_meas, double z_var);

  /// World-frame linear velocity update.
  void update_velocity_world(const Vec3& v_meas, const Mat3& meas_cov);

  /// Sets the world-from-stream-origin reference used to map stream-local
  /// measurements into the world frame. Mean and covariance are untouched.
  void reset_from(const Pose& anchor) { world_from_stream_ = anchor; }

  /// Maps a stream-local pose through the current reference and updates.
  void update_stream_pose(const Pose& local_pose, const CovarianceBlock& meas_cov);

  /// Re-expresses the whole filter in a shifted world frame:
  /// x_new = delta * x_old. Used when the mux splices this stream onto its
  /// published output. Velocity rotates, biases are body-frame and stay.
  void transform_world_frame(const Pose& delta);

  const FilterState& state() const { return state_; }
  Pose pose() const { return Pose{state_.p, state_.r}; }
  const Pose& world_from_stream() const { return world_from_stream_; }
  const Vec6& last_innovation() const { return last_innovation_; }

  // Measurement model pieces, exposed for finite-difference validation.
  static Vec6 pose_residual(const FilterState& s, const Pose& meas);
  static Mat6x15 pose_measurement_jacobian();
  static FilterState perturb(const FilterState& s, const Vec15& dx);

 private:
  void inject(const Vec15& dx);
  void joseph_update(const Eigen::Ref<const Eigen::MatrixXd>& K,
                     const Eigen::Ref<const Eigen::MatrixXd>& H,
                     const Eigen::Ref<const Eigen::MatrixXd>& R);
  void symmetrize() { state_.P = 0.5 * (state_.P + state_.P.transpose()).eval(); }

  FilterState state_;
  ProcessNoise noise_;
  double attitude_meas_var_;
  Pose world_from_stream_;
  Vec6 last_innovation_{Vec6::Zero()};
};

}  // namespace hero

#endif  // HERO_FUSION_HPP
