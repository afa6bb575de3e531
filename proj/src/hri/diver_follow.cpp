#include "loco/hri/diver_follow.hpp"

#include <stdexcept>

namespace loco::hri {

void DiverFollowGains::validate() const {
  yaw.validate();
  pitch.validate();
  thrust.validate();
  if (!(target_area_fraction > 0.0 && target_area_fraction < 1.0)) {
    throw std::invalid_argument("target area fraction must be in (0, 1)");
  }
  if (!(loss_threshold > 0.0)) throw std::invalid_argument("loss threshold must be positive");
  if (!(search_yaw >= -1.0 && search_yaw <= 1.0)) throw std::invalid_argument("search yaw must be within [-1, 1]");
}

const char* to_string(FollowMode mode) {
  switch (mode) {
    case FollowMode::idle: return "idle";
    case FollowMode::tracking: return "tracking";
    case FollowMode::searching: return "searching";
  }
  return "unknown";
}

std::pair<DiverFollowState, pilot::Command> diver_follow_step(const DiverFollowState& state,
                                                              const std::optional<sensors::Detection>& det,
                                                              const DiverFollowGains& gains, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("diver_follow_step: dt must be positive");
  DiverFollowState s = state;
  s.time += dt;
  if (det) {
    const double w = det->image_size.width;
    const double h = det->image_size.height;
    const double ex = (det->bbox.center_x - w / 2.0) / w;
    const double ey = (det->bbox.center_y - h / 2.0) / h;
    const double ea = gains.target_area_fraction - det->area_fraction();
    // Image x grows to the right and y grows downward; positive yaw turns
    // left and positive pitch raises the nose.
    const double yaw = -pilot::pid_step(gains.yaw, ex, dt, s.yaw);
    const double pitch = -pilot::pid_step(gains.pitch, ey, dt, s.pitch);
    const double thrust = pilot::pid_step(gains.thrust, ea, dt, s.thrust);
    s.mode = FollowMode::tracking;
    s.last_detection = s.time;
    if (ex != 0.0) s.last_seen_side = ex < 0.0 ? 1.0 : -1.0;
    s.last_command = pilot::Command(thrust, pitch, yaw);
    return {s, s.last_command};
  }
  const double age = s.time - s.last_detection.value_or(0.0);
  if (age > gains.loss_threshold) {
    s.mode = FollowMode::searching;
    s.yaw = s.pitch = s.thrust = pilot::PidState{};
    s.last_command = pilot::Command(0.0, 0.0, gains.search_yaw * s.last_seen_side);
  }
  return {s, s.last_command};
}

}  // namespace loco::hri
