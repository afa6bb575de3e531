#pragma once

#include "loco/harness/json_io.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace loco::harness {

inline constexpr int kLogSchemaVersion = 1;

// JSON-lines run log: a header object, then one record per logging tick.
// Lines hold compact JSON with keys in sorted order, so identical runs give
// identical bytes.
class LogWriter {
 public:
  explicit LogWriter(std::ostream& out) : out_(out) {}

  void write(const json& line);
  std::size_t lines() const { return lines_; }

 private:
  std::ostream& out_;
  std::size_t lines_ = 0;
};

json make_log_header(const std::string& scenario, const std::string& scenario_hash, std::uint64_t seed, double dt,
                     double log_rate);

struct LogContents {
  json header;  // null when the first line is not a header
  std::vector<json> records;
  std::vector<json> diagnostics;  // fatal-error lines
  std::size_t skipped = 0;  // malformed or truncated lines
};

/// Tolerant reader: malformed lines are skipped (with a warning) and counted.
LogContents read_log(std::istream& in);
/// Throws std::runtime_error when the file cannot be opened.
LogContents read_log_file(const std::string& path);

/// Dotted path into a record ("truth.pos.2", "power.alarm"); null when absent.
json field_at(const json& record, const std::string& path);

/// One CSV row per record with the requested fields. Strings are quoted,
/// absent values are empty cells. Returns the number of rows written.
std::size_t export_csv(const LogContents& log, const std::vector<std::string>& fields, std::ostream& out);

}  // namespace loco::harness
