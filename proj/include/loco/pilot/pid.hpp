#pragma once

#include <stdexcept>

namespace loco::pilot {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double integral_limit = 1.0;  // bound on the accumulated error integral
  double output_limit = 1.0;

  /// Throws std::invalid_argument for negative gains or non-positive limits.
  void validate() const;
};

struct PidState {
  double integral = 0.0;
  double previous_error = 0.0;
  bool primed = false;  // false until the first step; derivative is zero then
};

/// One controller update. The output is clamped to
/// [-output_limit, output_limit] and never leaves [-1, 1].
double pid_step(const PidGains& gains, double error, double dt, PidState& state);

}  // namespace loco::pilot
