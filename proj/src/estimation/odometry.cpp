#include "loco/estimation/odometry.hpp"

#include <cmath>
#include <stdexcept>

namespace loco::estimation {

OdometryEstimate dead_reckon_step(const OdometryEstimate& odom, const dynamics::ThrusterSet& thrusters,
                                  const dynamics::VehicleParams& params, double yaw_source, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dead_reckon_step: dt must be positive");
  double surge_force = 0.0;
  for (std::size_t i = 0; i < dynamics::kThrusterCount; ++i) {
    surge_force += dynamics::thrust_from_pwm(params.thrust_curve, thrusters[i]) * params.thrusters[i].axis.x();
  }
  const double u = odom.velocity.x();
  surge_force -= params.drag.surge * u * std::abs(u);

  OdometryEstimate out = odom;
  out.velocity = Vec3(u + surge_force / params.mass * dt, 0.0, 0.0);
  out.yaw = wrap_angle(yaw_source);
  const double speed = out.velocity.x();
  out.position += Vec3(std::cos(out.yaw) * speed * dt, std::sin(out.yaw) * speed * dt, 0.0);
  out.timestamp = odom.timestamp + dt;
  if (!out.position.allFinite() || !out.velocity.allFinite()) {
    // Keep the last finite estimate rather than propagating garbage.
    out = odom;
    out.timestamp = odom.timestamp + dt;
  }
  return out;
}

void MotionModel::propagate(const dynamics::ThrusterSet& thrusters, const dynamics::VehicleParams& params,
                            const Vec3& body_rate, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("MotionModel::propagate: dt must be positive");
  Vec3 force = Vec3::Zero();
  for (std::size_t i = 0; i < dynamics::kThrusterCount; ++i) {
    force += dynamics::thrust_from_pwm(params.thrust_curve, thrusters[i]) * params.thrusters[i].axis;
  }
  const Vec3 drag = params.drag.linear();
  force -= (drag.array() * velocity_.array() * velocity_.array().abs()).matrix();
  acceleration_ = force / params.mass;
  const Vec3 v = velocity_ + acceleration_ * dt;
  velocity_ = body_rate.squaredNorm() > 0.0 ? Vec3(quat_exp(-body_rate * dt) * v) : v;
  if (!velocity_.allFinite()) reset();
}

double DepthFilter::update(double measured_depth, double timestamp) {
  if (!value_) {
    value_ = measured_depth;
  } else {
    const double dt = std::max(timestamp - last_time_, 0.0);
    const double rc = 1.0 / (2.0 * kPi * cutoff_hz_);
    const double alpha = dt / (rc + dt);
    *value_ += alpha * (measured_depth - *value_);
  }
  last_time_ = timestamp;
  return *value_;
}

}  // namespace loco::estimation
