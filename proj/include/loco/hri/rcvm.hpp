#pragma once

#include "loco/pilot/command.hpp"

#include <map>
#include <string>
#include <vector>

namespace YAML {
class Node;
}

namespace loco::hri {

inline constexpr double kMaxRcvmDuration = 30.0;

struct RcvmStep {
  pilot::Command command;
  double duration = 0.0;  // s
};

// A named motion message: `steps` repeated `loop_count` times, then all
// channels held at zero for `settle` seconds.
struct RcvmSequence {
  std::string name;
  std::vector<RcvmStep> steps;
  int loop_count = 1;
  double settle = 0.5;

  double total_duration() const;
  /// Throws std::invalid_argument: empty steps, non-positive durations,
  /// loop_count < 1, settle <= 0 or a total beyond kMaxRcvmDuration.
  void validate() const;
};

/// "affirmative" (pitch nod), "negative" (yaw shake), "attention" (surge
/// lunge). Throws std::invalid_argument for other names.
RcvmSequence builtin_rcvm(const std::string& name);
std::vector<std::string> builtin_rcvm_names();

/// Parses a `sequences:` mapping of name -> {loop_count, settle, steps}.
std::map<std::string, RcvmSequence> parse_rcvm(const YAML::Node& doc);

enum class RcvmStatus { running, completed, aborted };
const char* to_string(RcvmStatus status);

// Plays a sequence against the simulation clock.
class RcvmPlayer {
 public:
  RcvmPlayer(RcvmSequence seq, double start_time);

  /// The command for time `now`; zero once completed or aborted.
  pilot::Command tick(double now);
  void cancel();

  RcvmStatus status() const { return status_; }
  const RcvmSequence& sequence() const { return seq_; }

 private:
  RcvmSequence seq_;
  double start_;
  RcvmStatus status_ = RcvmStatus::running;
};

/// Commands sampled at `rate_hz` from `start` until completion; the last
/// element is the zero command.
std::vector<pilot::Command> rcvm_execute(const RcvmSequence& seq, double start, double rate_hz);

}  // namespace loco::hri
