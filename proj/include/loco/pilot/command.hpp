#pragma once

#include "loco/dynamics/types.hpp"

#include <stdexcept>

namespace loco::pilot {

class InvalidCommand : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Normalized motion request. Every component lies in [-1, 1]; positive yaw
// turns nose-left, positive pitch raises the nose.
class Command {
 public:
  Command() = default;
  /// Throws InvalidCommand if any component is outside [-1, 1] or not finite.
  Command(double thrust, double pitch, double yaw, double timestamp = 0.0);

  double thrust() const { return thrust_; }
  double pitch() const { return pitch_; }
  double yaw() const { return yaw_; }
  double timestamp() const { return timestamp_; }

  bool is_zero() const { return thrust_ == 0.0 && pitch_ == 0.0 && yaw_ == 0.0; }
  Command stamped(double timestamp) const;

  friend bool operator==(const Command&, const Command&) = default;

 private:
  double thrust_ = 0.0;
  double pitch_ = 0.0;
  double yaw_ = 0.0;
  double timestamp_ = 0.0;
};

/// left = thrust - yaw, right = thrust + yaw, vertical = pitch, each clamped.
dynamics::ThrusterSet mix_to_thrusters(const Command& cmd);

}  // namespace loco::pilot
