#pragma once

#include "loco/common/math.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace loco::dynamics {

/// Raised when an operation is called outside its documented domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when integration produces a non-finite quantity.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& quantity, double time)
      : std::runtime_error("non-finite " + quantity + " at t=" + std::to_string(time)),
        quantity_(quantity) {}
  const std::string& quantity() const noexcept { return quantity_; }

 private:
  std::string quantity_;
};

// Ground-truth pose and velocity. Position lives in the world frame
// (x north, y west, z up, z = 0 at the surface); velocities in the body
// frame (x forward, y left, z up). The body origin is the center of mass.
struct RigidBodyState {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  Vec3 linear_velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();
  double time = 0.0;

  double depth() const { return -position.z(); }
};

enum class Thruster : std::size_t { kLeft = 0, kRight = 1, kVertical = 2 };
inline constexpr std::size_t kThrusterCount = 3;

/// Normalized PWM per thruster in (left, right, vertical) order; always in [-1, 1].
class ThrusterSet {
 public:
  ThrusterSet() = default;
  ThrusterSet(double left, double right, double vertical)
      : pwm_{clamp_unit(left), clamp_unit(right), clamp_unit(vertical)} {}

  double operator[](Thruster t) const { return pwm_[static_cast<std::size_t>(t)]; }
  double operator[](std::size_t i) const { return pwm_.at(i); }
  double left() const { return pwm_[0]; }
  double right() const { return pwm_[1]; }
  double vertical() const { return pwm_[2]; }
  const std::array<double, kThrusterCount>& values() const { return pwm_; }

  bool operator==(const ThrusterSet&) const = default;

 private:
  std::array<double, kThrusterCount> pwm_{0.0, 0.0, 0.0};
};

struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();

  Wrench& operator+=(const Wrench& o) {
    force += o.force;
    torque += o.torque;
    return *this;
  }
  bool finite() const { return force.allFinite() && torque.allFinite(); }
};

/// Nose-up pitching moment of a body-frame torque (the body y axis points left).
inline double nose_up_moment(const Wrench& w) { return -w.torque.y(); }

}  // namespace loco::dynamics
