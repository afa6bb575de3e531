#pragma once

#include "loco/dynamics/types.hpp"
#include "loco/dynamics/vehicle_params.hpp"

namespace loco::dynamics {

inline constexpr double kMaxStep = 0.1;
inline constexpr double kDefaultStep = 0.01;

// Wrench components kept separate so sensors can report specific force
// (everything except gravity).
struct WrenchBreakdown {
  Wrench thrust;
  Wrench gravity;
  Wrench buoyancy;
  Wrench drag;

  Wrench total() const {
    Wrench w = thrust;
    w += gravity;
    w += buoyancy;
    w += drag;
    return w;
  }
};

WrenchBreakdown compute_wrench_breakdown(const RigidBodyState& state, const VehicleParams& params,
                                         const ThrusterSet& thrusters);

/// Net body-frame wrench about the center of mass.
Wrench compute_wrench(const RigidBodyState& state, const VehicleParams& params, const ThrusterSet& thrusters);

struct StepResult {
  RigidBodyState state;
  WrenchBreakdown wrench;   // evaluated at the start of the step
  Vec3 specific_force;      // body frame, m/s^2, what an ideal accelerometer reads
};

/// Advances one semi-implicit Euler step. Throws DomainError for dt outside
/// (0, kMaxStep] and IntegrationError on non-finite results.
StepResult step_detailed(const RigidBodyState& state, const VehicleParams& params, const ThrusterSet& thrusters,
                         double dt);

RigidBodyState step(const RigidBodyState& state, const VehicleParams& params, const ThrusterSet& thrusters,
                    double dt);

/// Quadratic-drag coefficient balancing `thrust_total` at `steady_speed`.
double calibrate_drag(double thrust_total, double steady_speed);

double kinetic_energy(const RigidBodyState& state, const VehicleParams& params);

}  // namespace loco::dynamics
