#include "loco/pilot/command.hpp"

#include <cmath>
#include <fmt/format.h>

namespace loco::pilot {

namespace {

double checked(double value, const char* name) {
  if (!std::isfinite(value) || value < -1.0 || value > 1.0) {
    throw InvalidCommand(fmt::format("command {} = {} is outside [-1, 1]", name, value));
  }
  return value;
}

}  // namespace

Command::Command(double thrust, double pitch, double yaw, double timestamp)
    : thrust_(checked(thrust, "thrust")), pitch_(checked(pitch, "pitch")), yaw_(checked(yaw, "yaw")),
      timestamp_(timestamp) {}

Command Command::stamped(double timestamp) const {
  Command c = *this;
  c.timestamp_ = timestamp;
  return c;
}

dynamics::ThrusterSet mix_to_thrusters(const Command& cmd) {
  return dynamics::ThrusterSet(cmd.thrust() - cmd.yaw(), cmd.thrust() + cmd.yaw(), cmd.pitch());
}

}  // namespace loco::pilot
