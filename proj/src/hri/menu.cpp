#include "loco/hri/menu.hpp"

#include <yaml-cpp/yaml.h>

#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace loco::hri {

namespace {

[[noreturn]] void fail(MenuErrorCode code, const std::string& where, const YAML::Node& at, const std::string& detail) {
  const auto mark = at.Mark();
  throw MenuParseError(code, where, mark.line + 1, mark.column + 1, detail);
}

std::string required_text(const YAML::Node& parent, const char* key, const std::string& where, MenuErrorCode code) {
  const auto n = parent[key];
  if (!n || !n.IsScalar() || n.Scalar().empty()) fail(code, where, n ? n : parent, fmt::format("'{}' is required", key));
  return n.Scalar();
}

double positive_number(const YAML::Node& n, const std::string& where) {
  double v = 0.0;
  try {
    v = n.as<double>();
  } catch (const YAML::Exception&) {
    fail(MenuErrorCode::bad_value, where, n, "expected a number");
  }
  if (!(v > 0.0)) fail(MenuErrorCode::bad_value, where, n, "must be positive");
  return v;
}

ActionKind action_kind_from(const YAML::Node& n, const std::string& where) {
  if (n && n.IsScalar()) {
    for (auto k : {ActionKind::service_call, ActionKind::launch, ActionKind::set_param, ActionKind::submenu,
                   ActionKind::noop}) {
      if (n.Scalar() == to_string(k)) return k;
    }
  }
  fail(MenuErrorCode::unknown_action_kind, where, n,
       fmt::format("unknown action kind '{}'", n && n.IsScalar() ? n.Scalar() : std::string("?")));
}

void reject_unknown(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(MenuErrorCode::bad_value, where, kv.first, fmt::format("unknown key '{}'", key));
  }
}

}  // namespace

const char* to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::service_call: return "service_call";
    case ActionKind::launch: return "launch";
    case ActionKind::set_param: return "set_param";
    case ActionKind::submenu: return "submenu";
    case ActionKind::noop: return "noop";
  }
  return "unknown";
}

const char* to_string(MenuErrorCode code) {
  switch (code) {
    case MenuErrorCode::syntax: return "syntax";
    case MenuErrorCode::too_many_items: return "too_many_items";
    case MenuErrorCode::no_items: return "no_items";
    case MenuErrorCode::cyclic_submenu: return "cyclic_submenu";
    case MenuErrorCode::missing_label: return "missing_label";
    case MenuErrorCode::missing_action: return "missing_action";
    case MenuErrorCode::unknown_action_kind: return "unknown_action_kind";
    case MenuErrorCode::unknown_submenu: return "unknown_submenu";
    case MenuErrorCode::missing_root: return "missing_root";
    case MenuErrorCode::bad_value: return "bad_value";
  }
  return "unknown";
}

MenuParseError::MenuParseError(MenuErrorCode code, std::string where, int line, int column, const std::string& detail)
    : std::runtime_error(fmt::format("{}:{}: {}{}{} [{}]", line, column, where, where.empty() ? "" : ": ", detail,
                                     to_string(code))),
      code_(code), where_(std::move(where)), line_(line), column_(column) {}

const MenuNode& MenuConfig::node(const std::string& id) const {
  const auto it = nodes.find(id);
  if (it == nodes.end()) throw std::out_of_range(fmt::format("no menu '{}'", id));
  return it->second;
}

MenuConfig parse_menu(const std::string& document) {
  YAML::Node doc;
  try {
    doc = YAML::Load(document);
  } catch (const YAML::ParserException& e) {
    throw MenuParseError(MenuErrorCode::syntax, "", e.mark.line + 1, e.mark.column + 1, e.msg);
  }
  if (!doc.IsMap()) throw MenuParseError(MenuErrorCode::syntax, "", 1, 1, "menu document must be a mapping");
  reject_unknown(doc, {"version", "root", "menus", "armed_window", "default_timeout"}, "");

  MenuConfig config;
  if (const auto v = doc["version"]) {
    if (!v.IsScalar() || v.Scalar() != std::to_string(kMenuSchemaVersion)) {
      fail(MenuErrorCode::bad_value, "version", v, fmt::format("unsupported version (expected {})", kMenuSchemaVersion));
    }
  }
  if (const auto w = doc["armed_window"]) config.armed_window = positive_number(w, "armed_window");
  if (const auto t = doc["default_timeout"]) config.default_timeout = positive_number(t, "default_timeout");

  const auto menus = doc["menus"];
  if (!menus || !menus.IsMap() || menus.size() == 0) {
    fail(MenuErrorCode::missing_root, "menus", menus ? menus : doc, "'menus' must be a non-empty mapping");
  }

  // Item locations for diagnostics raised after the first pass.
  std::map<std::pair<std::string, std::size_t>, YAML::Node> item_nodes;
  std::string first;
  for (const auto& kv : menus) {
    const auto id = kv.first.as<std::string>();
    if (first.empty()) first = id;
    const std::string where = "menus." + id;
    const YAML::Node& body = kv.second;
    if (!body.IsMap()) fail(MenuErrorCode::bad_value, where, body, "menu must be a mapping");
    reject_unknown(body, {"label", "items"}, where);
    MenuNode node;
    node.id = id;
    node.label = required_text(body, "label", where, MenuErrorCode::missing_label);
    const auto items = body["items"];
    if (!items || !items.IsSequence() || items.size() == 0) {
      fail(MenuErrorCode::no_items, where, items ? items : body, "menu needs at least one item");
    }
    if (items.size() > kMaxMenuItems) {
      fail(MenuErrorCode::too_many_items, where, items,
           fmt::format("{} items; a menu holds at most {}", items.size(), kMaxMenuItems));
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& it = items[i];
      const std::string iw = fmt::format("{}.items[{}]", where, i + 1);
      if (!it.IsMap()) fail(MenuErrorCode::bad_value, iw, it, "item must be a mapping");
      reject_unknown(it, {"label", "action", "timeout"}, iw);
      MenuItem item;
      item.label = required_text(it, "label", iw, MenuErrorCode::missing_label);
      const auto action = it["action"];
      if (!action || !action.IsMap()) fail(MenuErrorCode::missing_action, iw, action ? action : it, "'action' is required");
      reject_unknown(action, {"kind", "target", "args"}, iw + ".action");
      item.action.kind = action_kind_from(action["kind"], iw + ".action.kind");
      if (const auto target = action["target"]) item.action.target = target.as<std::string>();
      if (item.action.kind != ActionKind::noop && item.action.target.empty()) {
        fail(MenuErrorCode::missing_action, iw + ".action", action, "'target' is required for this kind");
      }
      if (const auto args = action["args"]) {
        if (!args.IsMap()) fail(MenuErrorCode::bad_value, iw + ".action.args", args, "args must be a mapping");
        for (const auto& a : args) item.action.args[a.first.as<std::string>()] = a.second.as<std::string>();
      }
      if (const auto t = it["timeout"]) item.timeout = positive_number(t, iw + ".timeout");
      item_nodes[{id, i}] = it;
      node.items.push_back(std::move(item));
    }
    config.nodes.emplace(id, std::move(node));
  }

  config.root = first;
  if (const auto r = doc["root"]) {
    config.root = r.as<std::string>();
    if (!config.nodes.count(config.root)) {
      fail(MenuErrorCode::missing_root, "root", r, fmt::format("root menu '{}' is not defined", config.root));
    }
  }

  for (const auto& [id, node] : config.nodes) {
    for (std::size_t i = 0; i < node.items.size(); ++i) {
      const auto& a = node.items[i].action;
      if (a.kind == ActionKind::submenu && !config.nodes.count(a.target)) {
        fail(MenuErrorCode::unknown_submenu, fmt::format("menus.{}.items[{}]", id, i + 1), item_nodes[{id, i}],
             fmt::format("submenu '{}' is not defined", a.target));
      }
    }
  }

  // Depth-first search over submenu edges; a grey node reached again closes a cycle.
  enum class Mark { white, grey, black };
  std::map<std::string, Mark> marks;
  std::function<void(const std::string&)> visit = [&](const std::string& id) {
    marks[id] = Mark::grey;
    const auto& node = config.nodes.at(id);
    for (std::size_t i = 0; i < node.items.size(); ++i) {
      const auto& a = node.items[i].action;
      if (a.kind != ActionKind::submenu) continue;
      const Mark m = marks[a.target];
      if (m == Mark::grey) {
        fail(MenuErrorCode::cyclic_submenu, fmt::format("menus.{}.items[{}]", id, i + 1), item_nodes[{id, i}],
             fmt::format("submenu '{}' leads back to itself", a.target));
      }
      if (m == Mark::white) visit(a.target);
    }
    marks[id] = Mark::black;
  };
  for (const auto& [id, node] : config.nodes) {
    if (marks[id] == Mark::white) visit(id);
  }
  return config;
}

MenuConfig load_menu(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open menu file '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_menu(buf.str());
}

const char* to_string(MenuPhase phase) {
  switch (phase) {
    case MenuPhase::idle: return "idle";
    case MenuPhase::armed: return "armed";
    case MenuPhase::executing: return "executing";
  }
  return "unknown";
}

const char* to_string(Gesture g) {
  switch (g) {
    case Gesture::zero: return "zero";
    case Gesture::one: return "one";
    case Gesture::two: return "two";
    case Gesture::three: return "three";
    case Gesture::four: return "four";
    case Gesture::five: return "five";
    case Gesture::ok: return "ok";
  }
  return "unknown";
}

Gesture gesture_from_string(const std::string& token) {
  if (token.size() == 1 && token[0] >= '0' && token[0] <= '5') return static_cast<Gesture>(token[0] - '0');
  for (auto g : {Gesture::zero, Gesture::one, Gesture::two, Gesture::three, Gesture::four, Gesture::five, Gesture::ok}) {
    if (token == to_string(g)) return g;
  }
  throw std::invalid_argument(fmt::format("unknown gesture '{}'", token));
}

const char* to_string(InputEvent::Kind kind) {
  switch (kind) {
    case InputEvent::Kind::tag: return "tag";
    case InputEvent::Kind::gesture: return "gesture";
    case InputEvent::Kind::cancel: return "cancel";
  }
  return "unknown";
}

InputEvent InputEvent::tag(int id, double t) {
  InputEvent e;
  e.kind = Kind::tag;
  e.tag_id = id;
  e.timestamp = t;
  e.validate();
  return e;
}

InputEvent InputEvent::gesture_event(Gesture g, double t) {
  InputEvent e;
  e.kind = Kind::gesture;
  e.gesture = g;
  e.timestamp = t;
  return e;
}

InputEvent InputEvent::cancel(double t) {
  InputEvent e;
  e.kind = Kind::cancel;
  e.timestamp = t;
  return e;
}

void InputEvent::validate() const {
  if (kind == Kind::tag && (tag_id < 0 || tag_id > 9)) {
    throw std::invalid_argument(fmt::format("tag id {} outside 0..9", tag_id));
  }
}

std::string MenuState::path_string() const {
  std::string out;
  for (const auto& p : path) {
    if (!out.empty()) out += '/';
    out += p;
  }
  return out;
}

MenuState initial_menu_state(const MenuConfig& config) {
  MenuState s;
  s.path = {config.root};
  return s;
}

namespace {

MenuStepResult select(const MenuState& state, const MenuConfig& config, int n, double t) {
  MenuStepResult r{state, std::nullopt, std::nullopt};
  const MenuNode& node = config.node(state.current());
  if (n == 0) {
    if (r.state.path.size() > 1) {
      r.state.path.pop_back();
    } else {
      r.warning = "already at the top menu";
    }
    r.state.phase = MenuPhase::idle;
    return r;
  }
  if (n < 1 || static_cast<std::size_t>(n) > node.items.size()) {
    r.warning = fmt::format("item {} out of range; menu '{}' has {} items", n, node.id, node.items.size());
    return r;
  }
  const MenuItem& item = node.items[static_cast<std::size_t>(n - 1)];
  if (item.action.kind == ActionKind::submenu) {
    r.state.path.push_back(item.action.target);
    r.state.phase = MenuPhase::idle;
    return r;
  }
  EmittedAction a{node.id, n, item.label, item.action, t};
  r.state.phase = MenuPhase::executing;
  r.state.pending = a;
  r.state.executing_since = t;
  r.action = a;
  return r;
}

}  // namespace

MenuStepResult menu_step(const MenuState& state, const MenuConfig& config, const InputEvent& event) {
  MenuStepResult r{state, std::nullopt, std::nullopt};
  const double t = event.timestamp;
  if (event.kind == InputEvent::Kind::cancel) {
    r.state.phase = MenuPhase::idle;
    r.state.pending.reset();
    return r;
  }
  if (state.phase == MenuPhase::executing) {
    r.warning = "input ignored while an action is executing";
    return r;
  }
  if (event.kind == InputEvent::Kind::tag) {
    if (event.tag_id < 0 || event.tag_id > 9) {
      r.warning = fmt::format("tag id {} outside 0..9", event.tag_id);
      return r;
    }
    return select(state, config, event.tag_id, t);
  }
  if (event.gesture == Gesture::ok) {
    r.state.phase = MenuPhase::armed;
    r.state.armed_at = t;
    return r;
  }
  if (state.phase != MenuPhase::armed) {
    r.warning = "digit gesture ignored: selection not armed";
    return r;
  }
  if (t - state.armed_at > config.armed_window) {
    r.state.phase = MenuPhase::idle;
    r.warning = "digit gesture ignored: armed window expired";
    return r;
  }
  return select(state, config, static_cast<int>(event.gesture), t);
}

MenuStepResult menu_tick(const MenuState& state, const MenuConfig& config, double now) {
  MenuStepResult r{state, std::nullopt, std::nullopt};
  if (state.phase == MenuPhase::armed && now - state.armed_at > config.armed_window) {
    r.state.phase = MenuPhase::idle;
    r.warning = "armed window expired";
  } else if (state.phase == MenuPhase::executing && state.pending) {
    const auto& node = config.node(state.pending->node);
    const auto& item = node.items.at(static_cast<std::size_t>(state.pending->item - 1));
    const double limit = item.timeout.value_or(config.default_timeout);
    if (now - state.executing_since > limit) {
      r.state.phase = MenuPhase::idle;
      r.state.pending.reset();
      r.warning = fmt::format("action '{}' timed out", item.label);
    }
  }
  return r;
}

MenuState menu_complete(const MenuState& state) {
  MenuState s = state;
  if (s.phase == MenuPhase::executing) {
    s.phase = MenuPhase::idle;
    s.pending.reset();
  }
  return s;
}

std::string truncate_utf8(const std::string& text, std::size_t max_codepoints) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto byte = static_cast<unsigned char>(text[i]);
    if ((byte & 0xC0) != 0x80) {
      if (count == max_codepoints) return text.substr(0, i);
      ++count;
    }
  }
  return text;
}

std::vector<std::string> render_menu(const MenuState& state, const MenuConfig& config) {
  const MenuNode& node = config.node(state.current());
  std::vector<std::string> lines;
  lines.push_back(node.label);
  for (std::size_t i = 0; i < node.items.size(); ++i) lines.push_back(fmt::format("{}. {}", i + 1, node.items[i].label));
  switch (state.phase) {
    case MenuPhase::idle:
      lines.push_back(state.path.size() > 1 ? "0. back" : "tag or OK to select");
      break;
    case MenuPhase::armed:
      lines.push_back(">> ARMED: show digit");
      break;
    case MenuPhase::executing:
      lines.push_back("* " + (state.pending ? state.pending->label : std::string()));
      break;
  }
  for (auto& l : lines) l = truncate_utf8(l, kDisplayColumns);
  if (lines.size() > kDisplayLines) lines.resize(kDisplayLines);
  return lines;
}

}  // namespace loco::hri
