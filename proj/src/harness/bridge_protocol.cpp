#include "loco/harness/bridge.hpp"

#include <fmt/format.h>

namespace loco::harness {

const char* to_string(InboundMessage::Type type) {
  switch (type) {
    case InboundMessage::Type::command: return "command";
    case InboundMessage::Type::menu_input: return "menu_input";
    case InboundMessage::Type::primitive: return "primitive";
    case InboundMessage::Type::scenario_control: return "scenario_control";
  }
  return "unknown";
}

InboundMessage parse_inbound(const std::string& text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ProtocolError("malformed JSON");
  if (!j.is_object()) throw ProtocolError("message must be a JSON object");
  if (!j.contains("type") || !j["type"].is_string()) throw ProtocolError("message needs a string 'type'");
  InboundMessage msg;
  if (j.contains("seq")) {
    if (!j["seq"].is_number_integer()) throw ProtocolError("'seq' must be an integer");
    msg.seq = j["seq"].get<std::int64_t>();
  }
  const json payload = j.value("payload", json::object());
  const auto type = j["type"].get<std::string>();
  if (type == "command") {
    msg.type = InboundMessage::Type::command;
    msg.command = command_from_json(payload);
  } else if (type == "menu_input") {
    msg.type = InboundMessage::Type::menu_input;
    msg.input = input_from_json(payload, 0.0);
  } else if (type == "primitive") {
    msg.type = InboundMessage::Type::primitive;
    msg.primitive = primitive_from_json(payload);
  } else if (type == "scenario_control") {
    msg.type = InboundMessage::Type::scenario_control;
    if (!payload.is_object() || !payload.contains("action") || !payload["action"].is_string()) {
      throw ProtocolError("scenario_control needs a string 'action'");
    }
    msg.control = payload["action"].get<std::string>();
    if (msg.control != "stop" && msg.control != "pause" && msg.control != "resume") {
      throw ProtocolError(fmt::format("unknown scenario_control action '{}'", msg.control));
    }
  } else {
    throw ProtocolError(fmt::format("unknown message type '{}'", type));
  }
  return msg;
}

std::string encode_frame(const OutboundFrame& frame, std::int64_t seq) {
  const json j{{"type", frame.type}, {"seq", seq}, {"payload", frame.payload}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

OutboundFrame hello_frame() {
  return {"hello", json{{"schema_version", kBridgeSchemaVersion}, {"log_schema_version", 1}, {"server", "loco"}}};
}

OutboundFrame error_frame(const std::string& message, std::optional<std::int64_t> in_reply_to) {
  json p{{"message", message}};
  if (in_reply_to) p["in_reply_to"] = *in_reply_to;
  return {"error", p};
}

OutboundFrame ack_frame(const InboundMessage& msg, bool accepted, const std::string& detail, json extra) {
  json p{{"for", to_string(msg.type)}, {"accepted", accepted}, {"detail", detail}};
  if (msg.seq) p["in_reply_to"] = *msg.seq;
  if (!extra.is_null()) p["result"] = std::move(extra);
  return {"event_ack", p};
}

std::vector<std::string> sample_messages() {
  std::vector<std::string> out;
  std::int64_t seq = 1;
  const auto add = [&](const OutboundFrame& f) { out.push_back(encode_frame(f, seq++)); };
  add(hello_frame());
  add({"state", json{{"type", "record"},
                     {"t", 0.1},
                     {"truth", json::object()},
                     {"est", json::object()},
                     {"cmd", to_json(pilot::Command(0.5, 0.0, 0.0))},
                     {"thrusters", json::array({0.5, 0.5, 0.0})},
                     {"owner", "teleop"},
                     {"power", json::object()},
                     {"hri", json::object()},
                     {"events", json::array()},
                     {"dropped", 0}}});
  add({"menu_frame", json{{"lines", json::array({"Main", "1. Turn", "tag or OK to select"})},
                          {"path", "main"},
                          {"phase", "idle"}}});
  InboundMessage tag;
  tag.type = InboundMessage::Type::menu_input;
  tag.seq = 3;
  add(ack_frame(tag, true, "action fired", json{{"label", "Turn"}}));
  add(error_frame("malformed JSON"));
  out.push_back(R"({"type":"command","seq":1,"payload":{"thrust":0.5,"pitch":0,"yaw":0}})");
  out.push_back(R"({"type":"menu_input","seq":2,"payload":{"kind":"tag","id":1}})");
  out.push_back(R"({"type":"menu_input","seq":3,"payload":{"kind":"gesture","token":"ok"}})");
  out.push_back(R"({"type":"primitive","seq":4,"payload":{"kind":"turn_to","target_deg":90}})");
  out.push_back(R"({"type":"scenario_control","seq":5,"payload":{"action":"pause"}})");
  return out;
}

}  // namespace loco::harness
