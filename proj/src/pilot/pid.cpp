#include "loco/pilot/pid.hpp"

#include <algorithm>
#include <cmath>

namespace loco::pilot {

void PidGains::validate() const {
  if (!(kp >= 0.0 && ki >= 0.0 && kd >= 0.0)) throw std::invalid_argument("PID gains must be non-negative");
  if (!(integral_limit > 0.0 && output_limit > 0.0)) throw std::invalid_argument("PID limits must be positive");
}

double pid_step(const PidGains& gains, double error, double dt, PidState& state) {
  if (!(dt > 0.0)) throw std::invalid_argument("pid_step: dt must be positive");
  state.integral = std::clamp(state.integral + error * dt, -gains.integral_limit, gains.integral_limit);
  const double derivative = state.primed ? (error - state.previous_error) / dt : 0.0;
  state.previous_error = error;
  state.primed = true;
  const double limit = std::min(gains.output_limit, 1.0);
  const double out = gains.kp * error + gains.ki * state.integral + gains.kd * derivative;
  return std::clamp(out, -limit, limit);
}

}  // namespace loco::pilot
