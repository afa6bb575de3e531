#pragma once

#include "loco/sensors/sensors.hpp"

#include <Eigen/Core>

#include <stdexcept>

namespace loco::estimation {

using Mat6 = Eigen::Matrix<double, 6, 6>;

class FilterDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Error-state attitude filter. The error state is a 3-axis attitude
// perturbation applied on the body side (q <- q * exp(dtheta)) followed by
// a 3-axis gyro bias error.
struct OrientationEstimate {
  Quat orientation = Quat::Identity();
  Vec3 gyro_bias = Vec3::Zero();
  Mat6 covariance = Mat6::Identity() * 1e-4;
  double timestamp = 0.0;

  Attitude attitude() const { return attitude_of(orientation); }
};

struct EkfTuning {
  double gyro_noise = 0.005;    // rad/s/sqrt(Hz)
  double bias_walk = 1e-5;      // rad/s^2/sqrt(Hz)
  double accel_noise = 0.05;    // m/s^2
  double gravity = kStandardGravity;
  double gate_low = 0.5;        // accepted |accel| range, multiples of g
  double gate_high = 1.5;
  // Measurement variance grows with the deviation of |accel| from g, which
  // discounts samples taken while the hull is accelerating.
  double accel_deviation_scale = 1.0;
  double initial_attitude_std = 0.02;  // rad
  double initial_bias_std = 0.005;     // rad/s
  double psd_tolerance = 1e-9;
};

OrientationEstimate initial_estimate(const Quat& orientation, const EkfTuning& tuning = {}, double timestamp = 0.0);

/// Propagates with the bias-corrected gyro. Throws FilterDivergence when the
/// covariance leaves the symmetric PSD cone, std::invalid_argument for dt <= 0.
OrientationEstimate ekf_predict(const OrientationEstimate& est, const sensors::ImuSample& imu, double dt,
                                const EkfTuning& tuning = {});

struct AccelUpdate {
  OrientationEstimate estimate;
  bool gated = false;
};

/// Gravity-direction correction of roll and pitch. `linear_acceleration` is
/// the modelled non-gravitational part of the specific force (body frame),
/// subtracted before the sample is compared with gravity.
AccelUpdate ekf_update_accel(const OrientationEstimate& est, const sensors::ImuSample& imu,
                             const EkfTuning& tuning = {}, const Vec3& linear_acceleration = Vec3::Zero());

bool is_symmetric_psd(const Mat6& m, double tolerance);

/// Angle between two orientations, radians.
double attitude_error(const Quat& a, const Quat& b);
/// Tilt-only error (angle between the two body z axes), radians.
double tilt_error(const Quat& a, const Quat& b);

}  // namespace loco::estimation
