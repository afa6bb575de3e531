#pragma once

#include "loco/common/math.hpp"
#include "loco/hri/menu.hpp"
#include "loco/pilot/primitives.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>

namespace YAML {
class Node;
}

namespace loco::harness {

using json = nlohmann::json;

// Malformed or out-of-range message content.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scalars become numbers or booleans where they parse as such.
json yaml_to_json(const YAML::Node& node);

json to_json(const Vec3& v);
json to_json(const Quat& q);  // [w, x, y, z]
json to_json(const pilot::Command& c);
json to_json(const hri::InputEvent& e);
json to_json(const pilot::PrimitiveResult& r);
json to_json(const hri::EmittedAction& a);

/// {"thrust", "pitch", "yaw"}; missing channels are zero.
pilot::Command command_from_json(const json& j);
/// {"kind": "tag", "id": n} | {"kind": "gesture", "token": "ok"} | {"kind": "cancel"}
hri::InputEvent input_from_json(const json& j, double timestamp);
/// {"kind", "target_deg" | "target", "duration", "thrust", "side_duration",
/// "yaw_bias", "tolerance_deg", "timeout"}
pilot::PrimitiveRequest primitive_from_json(const json& j);

}  // namespace loco::harness
