#include "loco/harness/json_io.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fmt/format.h>

namespace loco::harness {

namespace {

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) throw ProtocolError(fmt::format("'{}' must be a number", key));
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ProtocolError(fmt::format("'{}' must be finite", key));
  return d;
}

}  // namespace

json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Sequence: {
      json arr = json::array();
      for (const auto& n : node) arr.push_back(yaml_to_json(n));
      return arr;
    }
    case YAML::NodeType::Map: {
      json obj = json::object();
      for (const auto& kv : node) obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return obj;
    }
    case YAML::NodeType::Scalar:
      break;
  }
  if (node.Tag() == "!") return node.Scalar();  // quoted
  const std::string& s = node.Scalar();
  if (s == "true" || s == "false") return s == "true";
  try {
    std::size_t used = 0;
    const long long i = std::stoll(s, &used);
    if (used == s.size()) return i;
  } catch (const std::exception&) {
  }
  try {
    std::size_t used = 0;
    const double d = std::stod(s, &used);
    if (used == s.size()) return d;
  } catch (const std::exception&) {
  }
  return s;
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json(const Quat& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }

json to_json(const pilot::Command& c) {
  return json{{"thrust", c.thrust()}, {"pitch", c.pitch()}, {"yaw", c.yaw()}};
}

json to_json(const hri::InputEvent& e) {
  json j{{"kind", hri::to_string(e.kind)}};
  if (e.kind == hri::InputEvent::Kind::tag) j["id"] = e.tag_id;
  if (e.kind == hri::InputEvent::Kind::gesture) j["token"] = hri::to_string(e.gesture);
  return j;
}

json to_json(const pilot::PrimitiveResult& r) {
  json j{{"kind", pilot::to_string(r.kind)},
         {"status", pilot::to_string(r.status)},
         {"final_error_deg", rad2deg(r.final_error)},
         {"elapsed", r.elapsed},
         {"reason", r.reason}};
  if (!r.corner_turns.empty()) {
    json corners = json::array();
    for (double c : r.corner_turns) corners.push_back(rad2deg(c));
    j["corner_turns_deg"] = corners;
  }
  if (r.start_position) j["start_position"] = to_json(*r.start_position);
  if (r.end_position) j["end_position"] = to_json(*r.end_position);
  if (r.mean_radius) j["mean_radius"] = std::isfinite(*r.mean_radius) ? json(*r.mean_radius) : json(nullptr);
  if (r.mean_yaw_rate) j["mean_yaw_rate"] = *r.mean_yaw_rate;
  return j;
}

json to_json(const hri::EmittedAction& a) {
  json args = json::object();
  for (const auto& [k, v] : a.action.args) args[k] = v;
  return json{{"node", a.node},
              {"item", a.item},
              {"label", a.label},
              {"kind", hri::to_string(a.action.kind)},
              {"target", a.action.target},
              {"args", args}};
}

pilot::Command command_from_json(const json& j) {
  if (!j.is_object()) throw ProtocolError("command payload must be an object");
  try {
    return pilot::Command(number(j, "thrust", 0.0), number(j, "pitch", 0.0), number(j, "yaw", 0.0));
  } catch (const pilot::InvalidCommand& e) {
    throw ProtocolError(e.what());
  }
}

hri::InputEvent input_from_json(const json& j, double timestamp) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ProtocolError("menu input needs a string 'kind'");
  }
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "tag") {
    if (!j.contains("id") || !j.at("id").is_number_integer()) throw ProtocolError("tag input needs an integer 'id'");
    const int id = j.at("id").get<int>();
    if (id < 0 || id > 9) throw ProtocolError(fmt::format("tag id {} outside 0..9", id));
    return hri::InputEvent::tag(id, timestamp);
  }
  if (kind == "gesture") {
    if (!j.contains("token") || !j.at("token").is_string()) throw ProtocolError("gesture input needs a 'token'");
    try {
      return hri::InputEvent::gesture_event(hri::gesture_from_string(j.at("token").get<std::string>()), timestamp);
    } catch (const std::invalid_argument& e) {
      throw ProtocolError(e.what());
    }
  }
  if (kind == "cancel") return hri::InputEvent::cancel(timestamp);
  throw ProtocolError(fmt::format("unknown menu input kind '{}'", kind));
}

pilot::PrimitiveRequest primitive_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ProtocolError("primitive needs a string 'kind'");
  }
  pilot::PrimitiveRequest r;
  try {
    const auto kind = pilot::primitive_kind_from_string(j.at("kind").get<std::string>());
    const double thrust = number(j, "thrust", 0.0);
    switch (kind) {
      case pilot::PrimitiveKind::turn_to: {
        const double target =
            j.contains("target_deg") ? deg2rad(number(j, "target_deg", 0.0)) : number(j, "target", 0.0);
        r = pilot::PrimitiveRequest::turn_to(target);
        break;
      }
      case pilot::PrimitiveKind::move_timed:
        r = pilot::PrimitiveRequest::move_timed(number(j, "duration", 0.0), thrust);
        break;
      case pilot::PrimitiveKind::square:
        r = pilot::PrimitiveRequest::square(number(j, "side_duration", 0.0), thrust);
        break;
      case pilot::PrimitiveKind::circle:
        r = pilot::PrimitiveRequest::circle(thrust, number(j, "yaw_bias", 0.0), number(j, "duration", 0.0));
        break;
      case pilot::PrimitiveKind::stop:
        r = pilot::PrimitiveRequest::stop();
        break;
    }
    if (j.contains("tolerance_deg")) r.tolerance = deg2rad(number(j, "tolerance_deg", 5.0));
    r.timeout = number(j, "timeout", r.timeout);
    r.validate();
  } catch (const std::invalid_argument& e) {
    throw ProtocolError(e.what());
  }
  return r;
}

}  // namespace loco::harness
