#pragma once

#include "loco/harness/bridge.hpp"
#include "loco/harness/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace loco::harness {

enum class ExitReason { duration, power_exhausted, stopped, fatal };
const char* to_string(ExitReason reason);

struct RunOptions {
  std::optional<double> dt;             // overrides the scenario step
  std::optional<std::uint64_t> seed;    // overrides the scenario seed
  BridgeChannel* bridge = nullptr;      // frames out, operator input in
  bool realtime = false;                // pace simulated time to the wall clock
};

struct RunSummary {
  ExitReason reason = ExitReason::duration;
  double end_time = 0.0;
  std::size_t steps = 0;
  std::size_t records = 0;
  dynamics::RigidBodyState final_state;
  power::PowerState power;
  std::vector<hri::EmittedAction> actions;  // menu actions in emission order
  std::string diagnostic;                   // set for fatal exits

  int exit_code() const { return reason == ExitReason::fatal ? 1 : 0; }
};

/// Fixed-step loop: inputs, HRI and pilot, mixing, power, dynamics, sensors,
/// estimation, then a log record every 1/log_rate s. Writes the header first.
/// Fatal integration or filter errors end the run with a diagnostic line.
RunSummary run_scenario(const Scenario& scenario, std::ostream& log, const RunOptions& options = {});

}  // namespace loco::harness
