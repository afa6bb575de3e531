#pragma once

#include "loco/dynamics/vehicle_params.hpp"
#include "loco/hri/diver_follow.hpp"
#include "loco/hri/menu.hpp"
#include "loco/hri/rcvm.hpp"
#include "loco/pilot/primitives.hpp"
#include "loco/power/battery.hpp"
#include "loco/sensors/sensors.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace loco::harness {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The diver leaves each waypoint toward the next at that waypoint's speed
// and stays at the last one.
struct DiverWaypoint {
  Vec3 position = Vec3::Zero();
  double speed = 0.0;  // m/s
};

struct ScenarioEvent {
  enum class Kind { input, primitive, command, follower, rcvm, power_profile, end };
  Kind kind = Kind::end;
  double at = 0.0;
  hri::InputEvent input;
  pilot::PrimitiveRequest primitive;
  pilot::Command command;
  bool follower_on = true;
  std::string rcvm;
  power::ComputeLoad load = power::ComputeLoad::idle;
};
const char* to_string(ScenarioEvent::Kind kind);

struct Scenario {
  std::string name = "scenario";
  std::string source;  // document text the scenario hash is computed over
  dynamics::VehicleParams vehicle = dynamics::default_vehicle_params();
  power::PowerParams power = power::default_power_params();
  dynamics::RigidBodyState initial_state;
  sensors::NoiseSpec noise;
  sensors::PinholeCamera camera;
  sensors::SensorRates rates;
  std::vector<DiverWaypoint> diver_path;
  std::vector<ScenarioEvent> events;
  std::optional<hri::MenuConfig> menu;
  std::map<std::string, hri::RcvmSequence> rcvm;
  pilot::PilotConfig pilot;
  hri::DiverFollowGains follower;
  power::ComputeLoad compute_load = power::ComputeLoad::idle;
  bool power_only = false;  // steps only the power model (endurance fast-forward)
  double duration = 10.0;
  double dt = 0.01;
  double log_rate = 10.0;  // Hz
  std::uint64_t seed = 0;

  /// Throws ScenarioError when an invariant is violated.
  void validate() const;
  /// Diver position at time t, if a diver path is scripted.
  std::optional<Vec3> diver_position(double t) const;
};

/// Sensor noise matching the estimator's default tuning.
sensors::NoiseSpec default_noise();

/// `base_dir` resolves relative menu_file / rcvm_file references.
Scenario parse_scenario(const std::string& text, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

}  // namespace loco::harness
