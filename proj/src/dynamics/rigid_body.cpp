#include "loco/dynamics/rigid_body.hpp"

#include <cmath>

namespace loco::dynamics {

namespace {

Vec3 quadratic_drag(const Vec3& coeffs, const Vec3& rate) {
  return -(coeffs.array() * rate.array() * rate.array().abs()).matrix();
}

void require_finite(const Vec3& v, const char* name, double t) {
  if (!v.allFinite()) throw IntegrationError(name, t);
}

}  // namespace

WrenchBreakdown compute_wrench_breakdown(const RigidBodyState& state, const VehicleParams& params,
                                         const ThrusterSet& thrusters) {
  WrenchBreakdown out;
  for (std::size_t i = 0; i < kThrusterCount; ++i) {
    const ThrusterMount& mount = params.thrusters[i];
    const Vec3 f = thrust_from_pwm(params.thrust_curve, thrusters[i]) * mount.axis;
    out.thrust.force += f;
    out.thrust.torque += mount.position.cross(f);
  }

  const Mat3 world_to_body = state.orientation.toRotationMatrix().transpose();
  out.gravity.force = world_to_body * Vec3(0.0, 0.0, -params.mass * params.gravity);

  const double lift = params.fluid_density * params.gravity * params.displaced_volume;
  out.buoyancy.force = world_to_body * Vec3(0.0, 0.0, lift);
  out.buoyancy.torque = params.center_of_buoyancy().cross(out.buoyancy.force);

  out.drag.force = quadratic_drag(params.drag.linear(), state.linear_velocity);
  out.drag.torque = quadratic_drag(params.drag.angular(), state.angular_velocity);
  return out;
}

Wrench compute_wrench(const RigidBodyState& state, const VehicleParams& params, const ThrusterSet& thrusters) {
  return compute_wrench_breakdown(state, params, thrusters).total();
}

StepResult step_detailed(const RigidBodyState& state, const VehicleParams& params, const ThrusterSet& thrusters,
                         double dt) {
  if (!(dt > 0.0 && dt <= kMaxStep)) {
    throw DomainError("step dt " + std::to_string(dt) + " outside (0, " + std::to_string(kMaxStep) + "]");
  }
  StepResult out;
  out.wrench = compute_wrench_breakdown(state, params, thrusters);
  const Wrench total = out.wrench.total();
  const double t_next = state.time + dt;
  if (!total.finite()) throw IntegrationError("wrench", t_next);

  // Velocities first (semi-implicit), from the start-of-step wrench.
  const Vec3 inv_inertia = params.inertia_diag.cwiseInverse();
  const Vec3 v_forced = state.linear_velocity + total.force / params.mass * dt;
  const Vec3 w_forced = state.angular_velocity + inv_inertia.cwiseProduct(total.torque) * dt;

  // Gyroscopic term: body-frame angular momentum rotates by -w*dt. The
  // rotation is rescaled to keep rotational kinetic energy, which a plain
  // explicit update would inflate.
  Vec3 w_next = w_forced;
  if (w_forced.squaredNorm() > 0.0) {
    const Vec3 momentum = params.inertia_diag.cwiseProduct(w_forced);
    const Vec3 rotated = quat_exp(-w_forced * dt) * momentum;
    w_next = inv_inertia.cwiseProduct(rotated);
    const double e_before = w_forced.dot(params.inertia_diag.cwiseProduct(w_forced));
    const double e_after = w_next.dot(params.inertia_diag.cwiseProduct(w_next));
    if (e_after > 0.0) w_next *= std::sqrt(e_before / e_after);
  }

  // Transport term of a rotating frame, as a norm-preserving rotation.
  const Vec3 v_next = w_next.squaredNorm() > 0.0 ? Vec3(quat_exp(-w_next * dt) * v_forced) : v_forced;

  RigidBodyState& next = out.state;
  next.time = t_next;
  next.linear_velocity = v_next;
  next.angular_velocity = w_next;
  next.position = state.position + state.orientation * v_next * dt;
  next.orientation = (state.orientation * quat_exp(w_next * dt)).normalized();

  require_finite(next.linear_velocity, "linear_velocity", t_next);
  require_finite(next.angular_velocity, "angular_velocity", t_next);
  require_finite(next.position, "position", t_next);
  if (!next.orientation.coeffs().allFinite()) throw IntegrationError("orientation", t_next);

  // Reported in the end-of-step body frame, matching `out.state`.
  const Vec3 specific_force = (total.force - out.wrench.gravity.force) / params.mass;
  out.specific_force = w_next.squaredNorm() > 0.0 ? Vec3(quat_exp(-w_next * dt) * specific_force) : specific_force;
  return out;
}

RigidBodyState step(const RigidBodyState& state, const VehicleParams& params, const ThrusterSet& thrusters,
                    double dt) {
  return step_detailed(state, params, thrusters, dt).state;
}

double calibrate_drag(double thrust_total, double steady_speed) {
  if (!(thrust_total > 0.0)) throw DomainError("calibrate_drag: thrust must be positive");
  if (!(steady_speed > 0.0)) throw DomainError("calibrate_drag: speed must be positive");
  return thrust_total / (steady_speed * steady_speed);
}

double kinetic_energy(const RigidBodyState& state, const VehicleParams& params) {
  const Vec3& w = state.angular_velocity;
  return 0.5 * params.mass * state.linear_velocity.squaredNorm() + 0.5 * w.dot(params.inertia_diag.cwiseProduct(w));
}

}  // namespace loco::dynamics
