#pragma once

#include "loco/dynamics/vehicle_params.hpp"

#include <optional>

namespace loco::estimation {

// Planar dead reckoning from thruster commands: surge speed follows the
// same thrust-minus-quadratic-drag balance as the full dynamics, heading
// comes from an external yaw source.
struct OdometryEstimate {
  Vec3 position = Vec3::Zero();  // world frame
  Vec3 velocity = Vec3::Zero();  // body frame; only surge is propagated
  double yaw = 0.0;
  double timestamp = 0.0;
  const char* source = "dead_reckoning";
};

OdometryEstimate dead_reckon_step(const OdometryEstimate& odom, const dynamics::ThrusterSet& thrusters,
                                  const dynamics::VehicleParams& params, double yaw_source, double dt);

// Body-frame velocity predicted from thruster commands, gyro rates and the
// quadratic drag model. Supplies the accelerometer's non-gravitational
// component to the attitude filter.
class MotionModel {
 public:
  /// Advances one step; `body_rate` is the bias-corrected gyro.
  void propagate(const dynamics::ThrusterSet& thrusters, const dynamics::VehicleParams& params,
                 const Vec3& body_rate, double dt);

  const Vec3& velocity() const { return velocity_; }
  /// (thrust + drag) / mass over the last step, body frame.
  const Vec3& linear_acceleration() const { return acceleration_; }
  void reset() { velocity_.setZero(); acceleration_.setZero(); }

 private:
  Vec3 velocity_ = Vec3::Zero();
  Vec3 acceleration_ = Vec3::Zero();
};

// First-order low-pass on pressure-derived depth.
class DepthFilter {
 public:
  explicit DepthFilter(double cutoff_hz = 1.0) : cutoff_hz_(cutoff_hz) {}

  double update(double measured_depth, double timestamp);
  std::optional<double> value() const { return value_; }

 private:
  double cutoff_hz_;
  std::optional<double> value_;
  double last_time_ = 0.0;
};

}  // namespace loco::estimation
