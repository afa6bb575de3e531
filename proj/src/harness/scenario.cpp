#include "loco/harness/scenario.hpp"

#include "loco/dynamics/rigid_body.hpp"
#include "loco/harness/json_io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>

namespace loco::harness {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(fmt::format("cannot open '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

[[noreturn]] void fail(const YAML::Node& at, const std::string& msg) {
  throw ScenarioError(fmt::format("line {}: {}", at.Mark().line + 1, msg));
}

void reject_unknown(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
  if (!map.IsMap()) fail(map, where + " must be a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, fmt::format("unknown key '{}' in {}", key, where));
  }
}

Vec3 vec3(const YAML::Node& n, const std::string& where) {
  if (!n.IsSequence() || n.size() != 3) fail(n, where + " must be a 3-element sequence");
  return {n[0].as<double>(), n[1].as<double>(), n[2].as<double>()};
}

pilot::PidGains gains(const YAML::Node& n, pilot::PidGains g, const std::string& where) {
  reject_unknown(n, {"kp", "ki", "kd", "integral_limit", "output_limit"}, where);
  if (n["kp"]) g.kp = n["kp"].as<double>();
  if (n["ki"]) g.ki = n["ki"].as<double>();
  if (n["kd"]) g.kd = n["kd"].as<double>();
  if (n["integral_limit"]) g.integral_limit = n["integral_limit"].as<double>();
  if (n["output_limit"]) g.output_limit = n["output_limit"].as<double>();
  return g;
}

sensors::NoiseSpec parse_noise(const YAML::Node& n) {
  if (n.IsScalar()) {
    if (n.Scalar() == "default") return default_noise();
    if (n.Scalar() == "none") return sensors::NoiseSpec{};
    fail(n, fmt::format("unknown noise preset '{}'", n.Scalar()));
  }
  reject_unknown(n, {"preset", "gyro_noise_std", "gyro_bias", "accel_noise_std", "pressure_noise_std",
                     "detection_dropout_prob"},
                 "noise");
  sensors::NoiseSpec s;
  if (n["preset"]) s = parse_noise(n["preset"]);
  if (n["gyro_noise_std"]) s.gyro_noise_std = n["gyro_noise_std"].as<double>();
  if (n["gyro_bias"]) s.gyro_bias = vec3(n["gyro_bias"], "noise.gyro_bias");
  if (n["accel_noise_std"]) s.accel_noise_std = n["accel_noise_std"].as<double>();
  if (n["pressure_noise_std"]) s.pressure_noise_std = n["pressure_noise_std"].as<double>();
  if (n["detection_dropout_prob"]) s.detection_dropout_prob = n["detection_dropout_prob"].as<double>();
  return s;
}

dynamics::RigidBodyState parse_initial_state(const YAML::Node& n) {
  reject_unknown(n, {"position", "rpy_deg", "velocity", "angular_velocity"}, "initial_state");
  dynamics::RigidBodyState s;
  if (n["position"]) s.position = vec3(n["position"], "initial_state.position");
  if (n["rpy_deg"]) {
    const Vec3 rpy = vec3(n["rpy_deg"], "initial_state.rpy_deg");
    s.orientation = quat_from_attitude(deg2rad(rpy.x()), deg2rad(rpy.y()), deg2rad(rpy.z()));
  }
  if (n["velocity"]) s.linear_velocity = vec3(n["velocity"], "initial_state.velocity");
  if (n["angular_velocity"]) s.angular_velocity = vec3(n["angular_velocity"], "initial_state.angular_velocity");
  return s;
}

ScenarioEvent parse_event(const YAML::Node& n) {
  reject_unknown(n, {"at", "input", "primitive", "command", "follower", "rcvm", "power_profile", "end"}, "event");
  if (!n["at"]) fail(n, "event needs 'at'");
  ScenarioEvent e;
  e.at = n["at"].as<double>();
  int kinds = 0;
  try {
    if (const auto in = n["input"]) {
      e.kind = ScenarioEvent::Kind::input;
      e.input = input_from_json(yaml_to_json(in), e.at);
      ++kinds;
    }
    if (const auto p = n["primitive"]) {
      e.kind = ScenarioEvent::Kind::primitive;
      e.primitive = primitive_from_json(yaml_to_json(p));
      ++kinds;
    }
    if (const auto c = n["command"]) {
      e.kind = ScenarioEvent::Kind::command;
      e.command = command_from_json(yaml_to_json(c));
      ++kinds;
    }
  } catch (const ProtocolError& err) {
    fail(n, err.what());
  }
  if (const auto f = n["follower"]) {
    e.kind = ScenarioEvent::Kind::follower;
    const auto v = f.as<std::string>();
    if (v != "start" && v != "stop") fail(f, "follower must be 'start' or 'stop'");
    e.follower_on = v == "start";
    ++kinds;
  }
  if (const auto r = n["rcvm"]) {
    e.kind = ScenarioEvent::Kind::rcvm;
    e.rcvm = r.as<std::string>();
    ++kinds;
  }
  if (const auto p = n["power_profile"]) {
    e.kind = ScenarioEvent::Kind::power_profile;
    try {
      e.load = power::compute_load_from_string(p.as<std::string>());
    } catch (const std::invalid_argument& err) {
      fail(p, err.what());
    }
    ++kinds;
  }
  if (n["end"]) {
    e.kind = ScenarioEvent::Kind::end;
    ++kinds;
  }
  if (kinds != 1) fail(n, "an event needs exactly one action");
  return e;
}

}  // namespace

const char* to_string(ScenarioEvent::Kind kind) {
  switch (kind) {
    case ScenarioEvent::Kind::input: return "input";
    case ScenarioEvent::Kind::primitive: return "primitive";
    case ScenarioEvent::Kind::command: return "command";
    case ScenarioEvent::Kind::follower: return "follower";
    case ScenarioEvent::Kind::rcvm: return "rcvm";
    case ScenarioEvent::Kind::power_profile: return "power_profile";
    case ScenarioEvent::Kind::end: return "end";
  }
  return "unknown";
}

sensors::NoiseSpec default_noise() {
  sensors::NoiseSpec n;
  n.gyro_noise_std = 0.05;    // 0.005 rad/s/sqrt(Hz) at 100 Hz
  n.accel_noise_std = 0.05;   // m/s^2
  n.pressure_noise_std = 50;  // Pa, about 5 mm of water
  n.detection_dropout_prob = 0.05;
  return n;
}

void Scenario::validate() const {
  if (!(duration > 0.0)) throw ScenarioError("duration must be positive");
  const double max_dt = power_only ? 3600.0 : dynamics::kMaxStep;
  if (!(dt > 0.0 && dt <= max_dt)) throw ScenarioError(fmt::format("dt must be in (0, {}]", max_dt));
  if (!(log_rate > 0.0)) throw ScenarioError("log_rate must be positive");
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].at < events[i - 1].at) throw ScenarioError("events must be sorted by time");
  }
  for (const auto& e : events) {
    if (e.at < 0.0) throw ScenarioError("event times must be non-negative");
    if (e.kind == ScenarioEvent::Kind::rcvm && !rcvm.count(e.rcvm)) {
      throw ScenarioError(fmt::format("unknown rcvm sequence '{}'", e.rcvm));
    }
    if (e.kind == ScenarioEvent::Kind::input && !menu) throw ScenarioError("input events need a menu");
  }
  for (const auto& w : diver_path) {
    if (!(w.speed >= 0.0)) throw ScenarioError("diver speeds must be non-negative");
  }
  try {
    vehicle.validate();
    power.validate();
    noise.validate();
    pilot.validate();
    follower.validate();
  } catch (const std::exception& e) {
    throw ScenarioError(e.what());
  }
}

std::optional<Vec3> Scenario::diver_position(double t) const {
  if (diver_path.empty()) return std::nullopt;
  double remaining = t;
  for (std::size_t i = 0; i + 1 < diver_path.size(); ++i) {
    const Vec3 leg = diver_path[i + 1].position - diver_path[i].position;
    const double speed = diver_path[i].speed;
    if (speed <= 0.0) return diver_path[i].position;
    const double leg_time = leg.norm() / speed;
    if (remaining < leg_time) return Vec3(diver_path[i].position + leg.normalized() * speed * remaining);
    remaining -= leg_time;
  }
  return diver_path.back().position;
}

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(fmt::format("line {}: {}", e.mark.line + 1, e.msg));
  }
  reject_unknown(doc, {"name", "vehicle", "power", "initial_state", "noise", "camera", "diver_path", "events",
                       "menu", "menu_file", "rcvm", "rcvm_file", "pilot", "follower", "compute_load", "power_only",
                       "duration", "dt", "log_rate", "seed"},
                 "scenario");
  Scenario s;
  s.source = text;
  const auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path.string() : (std::filesystem::path(base_dir) / path).string();
  };
  try {
    if (doc["name"]) s.name = doc["name"].as<std::string>();
    if (doc["duration"]) s.duration = doc["duration"].as<double>();
    if (doc["dt"]) s.dt = doc["dt"].as<double>();
    if (doc["log_rate"]) s.log_rate = doc["log_rate"].as<double>();
    if (doc["seed"]) s.seed = doc["seed"].as<std::uint64_t>();
    if (doc["power_only"]) s.power_only = doc["power_only"].as<bool>();
    if (doc["compute_load"]) s.compute_load = power::compute_load_from_string(doc["compute_load"].as<std::string>());
    if (doc["vehicle"]) s.vehicle = dynamics::vehicle_params_from_yaml(doc["vehicle"]);
    if (doc["power"]) s.power = power::power_params_from_yaml(doc["power"]);
    if (doc["initial_state"]) s.initial_state = parse_initial_state(doc["initial_state"]);
    if (doc["noise"]) s.noise = parse_noise(doc["noise"]);
    if (const auto c = doc["camera"]) {
      reject_unknown(c, {"focal_px", "width", "height"}, "camera");
      if (c["focal_px"]) s.camera.focal_px = c["focal_px"].as<double>();
      if (c["width"]) s.camera.image.width = c["width"].as<int>();
      if (c["height"]) s.camera.image.height = c["height"].as<int>();
    }
    if (const auto d = doc["diver_path"]) {
      for (const auto& w : d) {
        reject_unknown(w, {"position", "speed"}, "diver_path entry");
        s.diver_path.push_back({vec3(w["position"], "diver_path.position"), w["speed"] ? w["speed"].as<double>() : 0.0});
      }
    }
    if (doc["menu_file"]) s.menu = hri::load_menu(resolve(doc["menu_file"].as<std::string>()));
    if (doc["menu"]) s.menu = hri::parse_menu(YAML::Dump(doc["menu"]));
    for (const auto& name : hri::builtin_rcvm_names()) s.rcvm.emplace(name, hri::builtin_rcvm(name));
    const auto add_rcvm = [&](const YAML::Node& n) {
      for (auto& [name, seq] : hri::parse_rcvm(n)) s.rcvm[name] = seq;
    };
    if (doc["rcvm_file"]) add_rcvm(YAML::LoadFile(resolve(doc["rcvm_file"].as<std::string>())));
    if (doc["rcvm"]) add_rcvm(doc["rcvm"]);
    if (const auto p = doc["pilot"]) {
      reject_unknown(p, {"turn_gains", "hold_time", "estimator_timeout", "teleop_timeout"}, "pilot");
      if (p["turn_gains"]) s.pilot.turn_gains = gains(p["turn_gains"], s.pilot.turn_gains, "pilot.turn_gains");
      if (p["hold_time"]) s.pilot.hold_time = p["hold_time"].as<double>();
      if (p["estimator_timeout"]) s.pilot.estimator_timeout = p["estimator_timeout"].as<double>();
      if (p["teleop_timeout"]) s.pilot.teleop_timeout = p["teleop_timeout"].as<double>();
    }
    if (const auto f = doc["follower"]) {
      reject_unknown(f, {"yaw", "pitch", "thrust", "target_area_fraction", "loss_threshold", "search_yaw"}, "follower");
      if (f["yaw"]) s.follower.yaw = gains(f["yaw"], s.follower.yaw, "follower.yaw");
      if (f["pitch"]) s.follower.pitch = gains(f["pitch"], s.follower.pitch, "follower.pitch");
      if (f["thrust"]) s.follower.thrust = gains(f["thrust"], s.follower.thrust, "follower.thrust");
      if (f["target_area_fraction"]) s.follower.target_area_fraction = f["target_area_fraction"].as<double>();
      if (f["loss_threshold"]) s.follower.loss_threshold = f["loss_threshold"].as<double>();
      if (f["search_yaw"]) s.follower.search_yaw = f["search_yaw"].as<double>();
    }
    if (const auto ev = doc["events"]) {
      if (!ev.IsSequence()) fail(ev, "events must be a sequence");
      for (const auto& e : ev) s.events.push_back(parse_event(e));
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const YAML::Exception& e) {
    throw ScenarioError(fmt::format("line {}: {}", e.mark.line + 1, e.msg));
  } catch (const std::exception& e) {
    throw ScenarioError(e.what());
  }
  s.noise.seed = s.seed;
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  return parse_scenario(read_file(path), std::filesystem::path(path).parent_path().string());
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace loco::harness
