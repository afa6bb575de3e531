#pragma once

#include "loco/dynamics/types.hpp"
#include "loco/pilot/command.hpp"
#include "loco/pilot/pid.hpp"

#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace loco::pilot {

enum class PrimitiveKind { turn_to, move_timed, square, circle, stop };
enum class PrimitiveStatus { succeeded, failed, aborted, cancelled };

const char* to_string(PrimitiveKind kind);
const char* to_string(PrimitiveStatus status);
/// Throws std::invalid_argument for unknown names.
PrimitiveKind primitive_kind_from_string(const std::string& name);

struct PrimitiveRequest {
  PrimitiveKind kind = PrimitiveKind::stop;
  double target_yaw = 0.0;     // turn_to, rad
  double duration = 0.0;       // move_timed, circle, s
  double thrust_level = 0.0;   // move_timed, square, circle
  double side_duration = 0.0;  // square, s
  double yaw_bias = 0.0;       // circle
  double tolerance = deg2rad(5.0);
  double timeout = 60.0;

  /// Throws std::invalid_argument when a parameter is out of range.
  void validate() const;

  static PrimitiveRequest turn_to(double target_yaw, double timeout = 30.0);
  static PrimitiveRequest move_timed(double duration, double thrust_level);
  static PrimitiveRequest square(double side_duration, double thrust_level);
  static PrimitiveRequest circle(double thrust_level, double yaw_bias, double duration);
  static PrimitiveRequest stop();
};

struct PrimitiveResult {
  PrimitiveKind kind = PrimitiveKind::stop;
  PrimitiveStatus status = PrimitiveStatus::succeeded;
  double final_error = 0.0;  // rad; heading error at completion where one is defined
  double elapsed = 0.0;      // s
  std::string reason;
  std::vector<double> corner_turns;  // square: yaw change achieved at each corner, rad
  std::optional<Vec3> start_position;  // ground truth, when supplied
  std::optional<Vec3> end_position;
  std::optional<double> mean_radius;    // circle, m; infinity for a straight run
  std::optional<double> mean_yaw_rate;  // circle, rad/s over the second half

  bool success() const { return status == PrimitiveStatus::succeeded; }
};

class PilotBusy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PilotConfig {
  PidGains turn_gains{2.0, 0.1, 0.5, 1.0, 1.0};  // on heading error / pi
  double hold_time = 1.0;                          // s inside tolerance before success
  double hold_drift = deg2rad(0.5);                // max heading change over the hold window
  double thruster_deadband = 0.06;                 // |pwm| producing no thrust
  double estimator_timeout = 1.0;                  // s without a yaw estimate aborts
  double teleop_timeout = 1.0;                     // s without teleop input zeroes thrusters
  double nominal_dt = 0.01;

  void validate() const;
};

struct PilotInput {
  double time = 0.0;
  std::optional<double> yaw;  // fresh estimate this tick, absent when the estimator is silent
  std::optional<dynamics::RigidBodyState> truth;
};

// Runs at most one primitive at a time and falls back to the latest teleop
// Command (subject to a staleness watchdog) when idle.
class Pilot {
 public:
  explicit Pilot(PilotConfig config = {});

  /// Starts a primitive. A stop request cancels the active primitive. Throws
  /// PilotBusy when another primitive is active, std::invalid_argument for
  /// invalid parameters.
  void request(const PrimitiveRequest& req, double now);
  void cancel(double now, const std::string& reason = "cancelled");
  void teleop(const Command& cmd, double now);

  Command tick(const PilotInput& input);

  bool busy() const { return active_.has_value(); }
  std::optional<PrimitiveKind> active_kind() const;
  std::optional<PrimitiveResult> take_result();
  const PilotConfig& config() const { return config_; }

 private:
  enum class Phase { turning, moving, circling };

  struct Active {
    PrimitiveRequest request;
    double start_time = 0.0;
    double last_tick = 0.0;
    double last_estimate_time = 0.0;
    std::optional<double> yaw;
    Phase phase = Phase::turning;
    double phase_start = 0.0;
    bool first_tick = true;
    double heading_target = 0.0;
    bool heading_hold = false;
    std::optional<double> hold_since;
    double hold_error = 0.0;
    PidState pid;
    std::optional<double> initial_yaw;
    int corner = 0;
    double corner_start_yaw = 0.0;
    double speed_sum = 0.0;
    double rate_sum = 0.0;
    int rate_samples = 0;
    PrimitiveResult result;
  };

  Command primitive_tick(Active& a, const PilotInput& input);
  Command teleop_tick(double now) const;
  std::optional<Command> turn_tick(Active& a, double now, double dt);
  double heading_command(Active& a, double dt);
  void finish(PrimitiveStatus status, double now, const std::string& reason);
  void begin_turn(Active& a, double target, double now);

  PilotConfig config_;
  std::optional<Active> active_;
  std::deque<PrimitiveResult> results_;
  std::optional<Command> teleop_;
  double teleop_time_ = 0.0;
};

}  // namespace loco::pilot
