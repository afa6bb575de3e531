#pragma once

#include "loco/pilot/command.hpp"
#include "loco/pilot/pid.hpp"
#include "loco/sensors/sensors.hpp"

#include <optional>
#include <utility>

namespace loco::hri {

struct DiverFollowGains {
  pilot::PidGains yaw{1.5, 0.1, 0.4, 1.0, 1.0};    // on horizontal offset / image width
  pilot::PidGains pitch{1.5, 0.1, 0.2, 1.0, 1.0};  // on vertical offset / image height
  pilot::PidGains thrust{12.0, 2.0, 0.0, 0.2, 0.6};  // on target minus observed area fraction
  double target_area_fraction = 0.05;
  double loss_threshold = 2.0;  // s without a detection before searching
  double search_yaw = 0.2;

  /// Throws std::invalid_argument for invalid gains or thresholds.
  void validate() const;
};

enum class FollowMode { idle, tracking, searching };
const char* to_string(FollowMode mode);

struct DiverFollowState {
  pilot::PidState yaw;
  pilot::PidState pitch;
  pilot::PidState thrust;
  FollowMode mode = FollowMode::idle;
  double time = 0.0;  // s since the follower started
  std::optional<double> last_detection;
  double last_seen_side = 1.0;  // +1 diver last seen left of centre, -1 right
  pilot::Command last_command;
};

/// One follower update. With a detection: yaw and pitch steer the box toward
/// the image centre and thrust drives its area toward the target. Without
/// one the previous command is held until the loss threshold, after which
/// the follower scans toward the side the diver was last seen on.
std::pair<DiverFollowState, pilot::Command> diver_follow_step(const DiverFollowState& state,
                                                              const std::optional<sensors::Detection>& det,
                                                              const DiverFollowGains& gains, double dt);

}  // namespace loco::hri
