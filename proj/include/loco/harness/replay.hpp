#pragma once

#include "loco/harness/bridge.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>

namespace loco::harness {

struct ReplaySummary {
  std::size_t records = 0;
  std::size_t frames = 0;   // state plus menu frames emitted
  std::size_t skipped = 0;  // malformed or truncated lines
  bool header = false;
};

/// Re-emits the state and menu frames a live run published, paced by record
/// time divided by `speed`; speed 0 runs as fast as possible. No simulation
/// is executed. Throws std::invalid_argument for a negative speed.
ReplaySummary replay_log(std::istream& in, double speed, const std::function<void(const OutboundFrame&)>& sink);

}  // namespace loco::harness
