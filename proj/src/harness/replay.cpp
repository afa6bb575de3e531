#include "loco/harness/replay.hpp"

#include "loco/harness/log.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <stdexcept>
#include <thread>

namespace loco::harness {

ReplaySummary replay_log(std::istream& in, double speed, const std::function<void(const OutboundFrame&)>& sink) {
  if (!(speed >= 0.0)) throw std::invalid_argument("replay speed must be non-negative");
  const LogContents log = read_log(in);
  ReplaySummary summary;
  summary.header = !log.header.is_null();
  summary.skipped = log.skipped;
  if (!summary.header) spdlog::warn("replay: log has no header line");

  const auto start = std::chrono::steady_clock::now();
  const double t0 = log.records.empty() ? 0.0 : log.records.front().value("t", 0.0);
  for (const auto& record : log.records) {
    if (speed > 0.0) {
      const double t = record.value("t", t0);
      std::this_thread::sleep_until(start + std::chrono::duration<double>((t - t0) / speed));
    }
    // Live runs publish the menu frame ahead of the state frame it belongs to.
    const auto& hri = record.contains("hri") ? record["hri"] : json();
    if (hri.is_object() && hri.contains("menu_frame")) {
      sink({"menu_frame", hri["menu_frame"]});
      ++summary.frames;
    }
    sink({"state", record});
    ++summary.frames;
    ++summary.records;
  }
  if (summary.skipped > 0) spdlog::warn("replay: {} line(s) skipped", summary.skipped);
  return summary;
}

}  // namespace loco::harness
