#include "loco/hri/rcvm.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

namespace loco::hri {

using pilot::Command;

double RcvmSequence::total_duration() const {
  double loop = 0.0;
  for (const auto& s : steps) loop += s.duration;
  return loop * loop_count + settle;
}

void RcvmSequence::validate() const {
  if (steps.empty()) throw std::invalid_argument(fmt::format("rcvm '{}': no steps", name));
  for (const auto& s : steps) {
    if (!(s.duration > 0.0)) throw std::invalid_argument(fmt::format("rcvm '{}': step durations must be positive", name));
  }
  if (loop_count < 1) throw std::invalid_argument(fmt::format("rcvm '{}': loop_count must be at least 1", name));
  if (!(settle > 0.0)) throw std::invalid_argument(fmt::format("rcvm '{}': settle must be positive", name));
  if (total_duration() > kMaxRcvmDuration) {
    throw std::invalid_argument(
        fmt::format("rcvm '{}': total duration {} s exceeds {} s", name, total_duration(), kMaxRcvmDuration));
  }
}

RcvmSequence builtin_rcvm(const std::string& name) {
  RcvmSequence s;
  s.name = name;
  s.loop_count = 2;
  s.settle = 0.5;
  if (name == "affirmative") {
    s.steps = {{Command(0.0, 0.5, 0.0), 1.0}, {Command(0.0, -0.5, 0.0), 1.0}};
  } else if (name == "negative") {
    s.steps = {{Command(0.0, 0.0, 0.5), 1.0}, {Command(0.0, 0.0, -0.5), 1.0}};
  } else if (name == "attention") {
    s.steps = {{Command(0.4, 0.0, 0.0), 1.0}, {Command(-0.4, 0.0, 0.0), 1.0}};
  } else {
    throw std::invalid_argument(fmt::format("unknown rcvm sequence '{}'", name));
  }
  return s;
}

std::vector<std::string> builtin_rcvm_names() { return {"affirmative", "negative", "attention"}; }

std::map<std::string, RcvmSequence> parse_rcvm(const YAML::Node& doc) {
  const auto seqs = doc["sequences"];
  if (!seqs || !seqs.IsMap()) throw std::invalid_argument("rcvm document needs a 'sequences' mapping");
  std::map<std::string, RcvmSequence> out;
  for (const auto& kv : seqs) {
    RcvmSequence s;
    s.name = kv.first.as<std::string>();
    const auto& body = kv.second;
    if (body["loop_count"]) s.loop_count = body["loop_count"].as<int>();
    if (body["settle"]) s.settle = body["settle"].as<double>();
    for (const auto& step : body["steps"]) {
      const auto get = [&](const char* k) { return step[k] ? step[k].as<double>() : 0.0; };
      try {
        s.steps.push_back({Command(get("thrust"), get("pitch"), get("yaw")), get("duration")});
      } catch (const pilot::InvalidCommand& e) {
        throw std::invalid_argument(fmt::format("rcvm '{}' line {}: {}", s.name, step.Mark().line + 1, e.what()));
      }
    }
    s.validate();
    out.emplace(s.name, std::move(s));
  }
  return out;
}

const char* to_string(RcvmStatus status) {
  switch (status) {
    case RcvmStatus::running: return "running";
    case RcvmStatus::completed: return "completed";
    case RcvmStatus::aborted: return "aborted";
  }
  return "unknown";
}

RcvmPlayer::RcvmPlayer(RcvmSequence seq, double start_time) : seq_(std::move(seq)), start_(start_time) {
  seq_.validate();
}

Command RcvmPlayer::tick(double now) {
  if (status_ != RcvmStatus::running) return Command{};
  double elapsed = now - start_;
  if (elapsed >= seq_.total_duration()) {
    status_ = RcvmStatus::completed;
    return Command{};
  }
  for (int loop = 0; loop < seq_.loop_count; ++loop) {
    for (const auto& step : seq_.steps) {
      if (elapsed < step.duration) return step.command;
      elapsed -= step.duration;
    }
  }
  return Command{};  // settle
}

void RcvmPlayer::cancel() {
  if (status_ == RcvmStatus::running) status_ = RcvmStatus::aborted;
}

std::vector<Command> rcvm_execute(const RcvmSequence& seq, double start, double rate_hz) {
  if (!(rate_hz > 0.0)) throw std::invalid_argument("rcvm_execute: rate must be positive");
  RcvmPlayer player(seq, start);
  std::vector<Command> out;
  for (long i = 0; player.status() == RcvmStatus::running; ++i) {
    const double t = start + static_cast<double>(i) / rate_hz;
    out.push_back(player.tick(t).stamped(t));
  }
  return out;
}

}  // namespace loco::hri
