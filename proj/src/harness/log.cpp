#include "loco/harness/log.hpp"

#include <spdlog/spdlog.h>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace loco::harness {

namespace {

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + '"';
}

}  // namespace

void LogWriter::write(const json& line) {
  out_ << line.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  ++lines_;
}

json make_log_header(const std::string& scenario, const std::string& scenario_hash, std::uint64_t seed, double dt,
                     double log_rate) {
  return json{{"type", "header"},        {"schema_version", kLogSchemaVersion},
              {"scenario", scenario},    {"scenario_hash", scenario_hash},
              {"seed", seed},            {"dt", dt},
              {"log_rate", log_rate}};
}

LogContents read_log(std::istream& in) {
  LogContents log;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("type")) {
      spdlog::warn("log line {}: malformed, skipped", number);
      ++log.skipped;
      continue;
    }
    if (j["type"] == "header") {
      if (number != 1) {
        spdlog::warn("log line {}: header after the first line, skipped", number);
        ++log.skipped;
        continue;
      }
      if (j.value("schema_version", 0) != kLogSchemaVersion) {
        spdlog::warn("log schema version {} differs from {}", j.value("schema_version", 0), kLogSchemaVersion);
      }
      log.header = std::move(j);
    } else if (j["type"] == "record") {
      log.records.push_back(std::move(j));
    } else if (j["type"] == "diagnostic") {
      log.diagnostics.push_back(std::move(j));
    } else {
      spdlog::warn("log line {}: unknown line type, skipped", number);
      ++log.skipped;
    }
  }
  if (log.skipped > 0) spdlog::warn("{} log line(s) skipped", log.skipped);
  return log;
}

LogContents read_log_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open log '" + path + "'");
  return read_log(in);
}

json field_at(const json& record, const std::string& path) {
  const json* node = &record;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (node->is_object() && node->contains(part)) {
      node = &(*node)[part];
    } else if (node->is_array() && !part.empty() && part.find_first_not_of("0123456789") == std::string::npos &&
               std::stoul(part) < node->size()) {
      node = &(*node)[std::stoul(part)];
    } else {
      return nullptr;
    }
  }
  return *node;
}

std::size_t export_csv(const LogContents& log, const std::vector<std::string>& fields, std::ostream& out) {
  for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
  out << '\n';
  for (const auto& record : log.records) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      const json v = field_at(record, fields[i]);
      if (v.is_null()) continue;
      if (v.is_primitive() && !v.is_string()) {
        out << v.dump();
      } else {
        out << csv_quote(v.is_string() ? v.get<std::string>() : v.dump());
      }
    }
    out << '\n';
  }
  return log.records.size();
}

}  // namespace loco::harness
