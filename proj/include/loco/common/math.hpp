#pragma once

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace loco {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kStandardGravity = 9.80665;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

inline double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

/// Rotation vector to unit quaternion.
inline Quat quat_exp(const Vec3& rotvec) {
  const double angle = rotvec.norm();
  if (angle < 1e-12) {
    Quat q(1.0, 0.5 * rotvec.x(), 0.5 * rotvec.y(), 0.5 * rotvec.z());
    return q.normalized();
  }
  return Quat(Eigen::AngleAxisd(angle, rotvec / angle));
}

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

// Attitude angles of a body-to-world quaternion with the body frame
// x forward, y left, z up. Roll is right-handed about body x, pitch is
// positive nose-up, yaw is positive nose-left (right-handed about world z).
struct Attitude {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

inline Attitude attitude_of(const Quat& q) {
  const Mat3 r = q.toRotationMatrix();
  Attitude a;
  a.yaw = std::atan2(r(1, 0), r(0, 0));
  a.pitch = std::asin(std::clamp(r(2, 0), -1.0, 1.0));
  a.roll = std::atan2(r(2, 1), r(2, 2));
  return a;
}

inline Quat quat_from_attitude(double roll, double pitch, double yaw) {
  // Nose-up pitch is a negative rotation about the left-pointing y axis.
  return Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
              Eigen::AngleAxisd(-pitch, Vec3::UnitY()) *
              Eigen::AngleAxisd(roll, Vec3::UnitX()));
}

}  // namespace loco
