#pragma once

#include "loco/common/piecewise_linear.hpp"
#include "loco/dynamics/types.hpp"

#include <array>
#include <optional>
#include <string>

namespace YAML {
class Node;
}

namespace loco::power {

enum class Tube { left, right };

struct BatteryPack {
  double capacity = 16.0;  // Ah; two 8 Ah packs in parallel per tube
  double charge = 16.0;    // Ah remaining
  double voltage_full = 12.6;
  double voltage_empty = 9.6;
  Tube tube = Tube::left;

  /// Throws std::invalid_argument unless 0 <= charge <= capacity and
  /// voltage_empty < voltage_full.
  void validate() const;
  double fraction() const { return charge / capacity; }
};

/// Linear between voltage_empty at zero charge and voltage_full at capacity.
double voltage_of_charge(const BatteryPack& pack);

enum class ComputeLoad { idle, average, max };
const char* to_string(ComputeLoad load);
/// Throws std::invalid_argument for unknown names.
ComputeLoad compute_load_from_string(const std::string& name);

namespace defaults {
// Totals reproduce the rated endurance of a full 32 Ah system:
// 18 h 30 min idle, 2 h 20 min average, 30 min at maximum thrust.
inline constexpr double kSystemCapacity = 32.0;
inline constexpr double kIdleTotal = kSystemCapacity / 18.5;
inline constexpr double kAverageTotal = kSystemCapacity / (140.0 / 60.0);
inline constexpr double kMaxTotal = kSystemCapacity / 0.5;
inline constexpr double kComputeIdle = kIdleTotal;
inline constexpr double kComputeAverage = 2.0;
inline constexpr double kComputeMax = 2.5;
// Two rear thrusters at pwm 0.5 on top of average compute.
inline constexpr double kThrusterDrawHalf = (kAverageTotal - kComputeAverage) / 2.0;
// Three thrusters at full pwm on top of maximum compute.
inline constexpr double kThrusterDrawFull = (kMaxTotal - kComputeMax) / 3.0;
inline constexpr double kAlarmVoltage = 9.6;
}  // namespace defaults

struct PowerParams {
  std::array<double, 3> compute_draw{defaults::kComputeIdle, defaults::kComputeAverage, defaults::kComputeMax};
  PiecewiseLinear thruster_draw;  // |pwm| -> A per thruster
  std::array<double, 2> load_share{0.5, 0.5};
  double alarm_voltage = defaults::kAlarmVoltage;

  double compute(ComputeLoad load) const { return compute_draw[static_cast<std::size_t>(load)]; }
  /// Throws std::invalid_argument on negative draws, shares not summing to 1,
  /// or a thruster curve that is not non-decreasing from 0.
  void validate() const;
};

PowerParams default_power_params();
/// Overrides from a YAML mapping; unknown keys are rejected.
PowerParams power_params_from_yaml(const YAML::Node& node, PowerParams base = default_power_params());

struct PowerState {
  std::array<BatteryPack, 2> packs{BatteryPack{16.0, 16.0, 12.6, 9.6, Tube::left},
                                   BatteryPack{16.0, 16.0, 12.6, 9.6, Tube::right}};
  bool alarm_active = false;  // set once a pack reaches alarm_voltage; cleared only by reset_alarm
  bool powered = true;        // false once every pack is empty
  double elapsed = 0.0;       // s of simulated drain
  double last_current = 0.0;  // A drawn over the last step
  std::optional<double> alarm_time;      // elapsed at the first crossing
  std::optional<double> exhausted_time;  // elapsed when the last pack emptied

  double total_charge() const { return packs[0].charge + packs[1].charge; }
  double min_voltage() const;
};

/// Total current for one step: compute load plus every thruster's draw.
double total_current(const PowerParams& params, const dynamics::ThrusterSet& thrusters, ComputeLoad load);

/// Removes current * dt from the packs per their load share (packs already
/// empty hand their share to the others). Crossing and exhaustion instants
/// are interpolated within the step. A powered-off state is returned
/// unchanged apart from elapsed time.
PowerState drain_step(const PowerState& state, const PowerParams& params, const dynamics::ThrusterSet& thrusters,
                      ComputeLoad load, double dt);

/// Clears the latch; the next drain_step re-arms it if a pack is still at or
/// below the threshold.
PowerState reset_alarm(PowerState state);

}  // namespace loco::power
