#include "loco/estimation/attitude_ekf.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace loco::estimation {

namespace {

using Mat3x6 = Eigen::Matrix<double, 3, 6>;
using Mat6x3 = Eigen::Matrix<double, 6, 3>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

Mat6 symmetrized(const Mat6& m) { return 0.5 * (m + m.transpose()); }

void check_covariance(const Mat6& p, double tolerance, const char* stage) {
  if (!p.allFinite() || !is_symmetric_psd(p, tolerance)) {
    throw FilterDivergence(std::string("attitude covariance lost positive semi-definiteness in ") + stage);
  }
}

}  // namespace

bool is_symmetric_psd(const Mat6& m, double tolerance) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tolerance) return false;
  const Eigen::SelfAdjointEigenSolver<Mat6> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -tolerance;
}

OrientationEstimate initial_estimate(const Quat& orientation, const EkfTuning& tuning, double timestamp) {
  OrientationEstimate est;
  est.orientation = orientation.normalized();
  est.timestamp = timestamp;
  est.covariance.setZero();
  est.covariance.topLeftCorner<3, 3>().diagonal().setConstant(tuning.initial_attitude_std * tuning.initial_attitude_std);
  est.covariance.bottomRightCorner<3, 3>().diagonal().setConstant(tuning.initial_bias_std * tuning.initial_bias_std);
  return est;
}

OrientationEstimate ekf_predict(const OrientationEstimate& est, const sensors::ImuSample& imu, double dt,
                                const EkfTuning& tuning) {
  if (!(dt > 0.0)) throw std::invalid_argument("ekf_predict: dt must be positive");
  OrientationEstimate out = est;
  const Vec3 rate = imu.angular_velocity - est.gyro_bias;
  const Quat delta = quat_exp(rate * dt);
  out.orientation = (est.orientation * delta).normalized();
  out.timestamp = imu.timestamp;

  Mat6 phi = Mat6::Identity();
  phi.topLeftCorner<3, 3>() = delta.toRotationMatrix().transpose();
  phi.topRightCorner<3, 3>() = -Mat3::Identity() * dt;

  Mat6 q = Mat6::Zero();
  q.topLeftCorner<3, 3>().diagonal().setConstant(tuning.gyro_noise * tuning.gyro_noise * dt);
  q.bottomRightCorner<3, 3>().diagonal().setConstant(tuning.bias_walk * tuning.bias_walk * dt);

  out.covariance = symmetrized(phi * est.covariance * phi.transpose() + q);
  check_covariance(out.covariance, tuning.psd_tolerance, "predict");
  return out;
}

AccelUpdate ekf_update_accel(const OrientationEstimate& est, const sensors::ImuSample& imu, const EkfTuning& tuning,
                             const Vec3& linear_acceleration) {
  AccelUpdate result{est, false};
  const Vec3 gravity_reaction = imu.linear_acceleration - linear_acceleration;
  const double magnitude = gravity_reaction.norm();
  if (!(magnitude >= tuning.gate_low * tuning.gravity && magnitude <= tuning.gate_high * tuning.gravity)) {
    result.gated = true;
    return result;
  }

  const Vec3 measured = gravity_reaction / magnitude;
  const Vec3 predicted = est.orientation.conjugate() * Vec3::UnitZ();
  Mat3x6 h = Mat3x6::Zero();
  h.leftCols<3>() = skew(predicted);

  const double deviation = tuning.accel_deviation_scale * (magnitude - tuning.gravity);
  const double variance =
      std::max((tuning.accel_noise * tuning.accel_noise + deviation * deviation) / (magnitude * magnitude), 1e-12);
  const Mat3 r = Mat3::Identity() * variance;

  const Mat6& p = est.covariance;
  const Mat3 s = h * p * h.transpose() + r;
  Mat6x3 k = p * h.transpose() * s.inverse();
  // The gravity direction carries no heading information: the attitude
  // correction is confined to rotations about horizontal axes.
  const Mat3 horizontal = Mat3::Identity() - predicted * predicted.transpose();
  k.topRows<3>() = horizontal * k.topRows<3>();
  const Vec6 dx = k * (measured - predicted);

  OrientationEstimate& out = result.estimate;
  out.orientation = (est.orientation * quat_exp(dx.head<3>())).normalized();
  out.gyro_bias = est.gyro_bias + dx.tail<3>();
  out.timestamp = imu.timestamp;
  const Mat6 i_kh = Mat6::Identity() - k * h;
  out.covariance = symmetrized(i_kh * p * i_kh.transpose() + k * r * k.transpose());
  check_covariance(out.covariance, tuning.psd_tolerance, "accelerometer update");
  return result;
}

double attitude_error(const Quat& a, const Quat& b) { return a.angularDistance(b); }

double tilt_error(const Quat& a, const Quat& b) {
  const Vec3 za = a * Vec3::UnitZ();
  const Vec3 zb = b * Vec3::UnitZ();
  return std::atan2(za.cross(zb).norm(), za.dot(zb));
}

}  // namespace loco::estimation
