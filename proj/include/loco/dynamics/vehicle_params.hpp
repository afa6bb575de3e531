#pragma once

#include "loco/common/piecewise_linear.hpp"
#include "loco/dynamics/types.hpp"

#include <array>
#include <string>

namespace YAML {
class Node;
}

namespace loco::dynamics {

/// Monotone PWM -> Newtons map with a dead-band around zero.
class ThrustCurve {
 public:
  ThrustCurve() = default;
  explicit ThrustCurve(std::vector<Knot> knots);

  /// Symmetric curve: zero inside |pwm| < deadband, forward knots mirrored.
  static ThrustCurve symmetric(double deadband, const std::vector<Knot>& forward_knots);

  const PiecewiseLinear& table() const { return table_; }
  double max_forward() const { return table_(1.0); }

 private:
  PiecewiseLinear table_;
};

/// Thrust in Newtons for a pwm in [-1, 1]. Throws DomainError outside that range.
double thrust_from_pwm(const ThrustCurve& curve, double pwm);

struct ThrusterMount {
  Vec3 position = Vec3::Zero();  // body frame, relative to the center of mass
  Vec3 axis = Vec3::UnitX();     // unit vector, body frame
};

// Quadratic drag coefficients, N*s^2/m^2 for the linear axes and
// N*m*s^2/rad^2 for the rotational axes.
struct DragCoefficients {
  double surge = 0.0;
  double sway = 0.0;
  double heave = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  Vec3 linear() const { return {surge, sway, heave}; }
  Vec3 angular() const { return {roll, pitch, yaw}; }
};

// Ambient water. Currents are accepted but not yet applied by the stepper.
struct EnvironmentParams {
  Vec3 current_world = Vec3::Zero();
};

struct VehicleParams {
  double mass = 0.0;
  Vec3 inertia_diag = Vec3::Zero();
  double displaced_volume = 0.0;
  Vec3 com_offset = Vec3::Zero();  // center of mass relative to the geometric center
  std::array<ThrusterMount, kThrusterCount> thrusters{};
  ThrustCurve thrust_curve;
  DragCoefficients drag;
  double fluid_density = 1000.0;
  double gravity = kStandardGravity;
  EnvironmentParams environment;

  Vec3 center_of_buoyancy() const { return -com_offset; }
  Mat3 inertia() const { return inertia_diag.asDiagonal(); }

  /// Throws DomainError naming the first violated invariant.
  void validate() const;
};

namespace defaults {
inline constexpr double kMass = 12.47;
inline constexpr double kLength = 0.731;
inline constexpr double kWidth = 0.344;
inline constexpr double kHeight = 0.141;
inline constexpr double kMaxSpeed = 1.5;
inline constexpr double kThrustDeadband = 0.06;
inline constexpr double kMaxForwardThrust = 23.13;
inline constexpr double kRearLateralOffset = kWidth / 2.0;
inline constexpr double kRearLongitudinalOffset = -0.30;
inline constexpr double kVerticalLongitudinalOffset = 0.05;
inline constexpr double kComDrop = 0.01;
inline constexpr double kMaxYawRate = 1.5;
}  // namespace defaults

/// Default vehicle: box inertia from the hull dimensions, drag calibrated
/// so that full thrust on both rear thrusters settles at 1.5 m/s.
VehicleParams default_vehicle_params();

/// Applies overrides from a YAML mapping on top of `base`. Unknown keys are rejected.
VehicleParams vehicle_params_from_yaml(const YAML::Node& node, VehicleParams base = default_vehicle_params());
VehicleParams load_vehicle_params(const std::string& path);

}  // namespace loco::dynamics
