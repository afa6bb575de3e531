#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace loco::hri {

inline constexpr std::size_t kMaxMenuItems = 5;
inline constexpr std::size_t kDisplayLines = 8;
inline constexpr std::size_t kDisplayColumns = 21;
inline constexpr int kMenuSchemaVersion = 1;

enum class ActionKind { service_call, launch, set_param, submenu, noop };
const char* to_string(ActionKind kind);

struct MenuAction {
  ActionKind kind = ActionKind::noop;
  std::string target;  // callable name, or menu id for submenu
  std::map<std::string, std::string> args;

  friend bool operator==(const MenuAction&, const MenuAction&) = default;
};

struct MenuItem {
  std::string label;
  MenuAction action;
  std::optional<double> timeout;  // s the action may run before the menu returns to idle
};

struct MenuNode {
  std::string id;
  std::string label;
  std::vector<MenuItem> items;  // 1..kMaxMenuItems
};

struct MenuConfig {
  std::string root;
  std::map<std::string, MenuNode> nodes;
  double armed_window = 5.0;      // s an Ok gesture stays valid
  double default_timeout = 30.0;  // s for actions without their own timeout

  /// Throws std::out_of_range for unknown ids.
  const MenuNode& node(const std::string& id) const;
};

enum class MenuErrorCode { syntax, too_many_items, no_items, cyclic_submenu, missing_label, missing_action,
                           unknown_action_kind, unknown_submenu, missing_root, bad_value };
const char* to_string(MenuErrorCode code);

// Parse failure pinned to a document location (1-based line and column).
class MenuParseError : public std::runtime_error {
 public:
  MenuParseError(MenuErrorCode code, std::string where, int line, int column, const std::string& detail);

  MenuErrorCode code() const { return code_; }
  const std::string& where() const { return where_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  MenuErrorCode code_;
  std::string where_;
  int line_;
  int column_;
};

/// Parses and validates a menu document. Throws MenuParseError.
MenuConfig parse_menu(const std::string& document);
MenuConfig load_menu(const std::string& path);

enum class MenuPhase { idle, armed, executing };
const char* to_string(MenuPhase phase);

enum class Gesture { zero, one, two, three, four, five, ok };
const char* to_string(Gesture g);
/// Accepts the names above or the digits 0-5. Throws std::invalid_argument
/// for anything else.
Gesture gesture_from_string(const std::string& token);

struct InputEvent {
  enum class Kind { tag, gesture, cancel };
  Kind kind = Kind::cancel;
  int tag_id = 0;  // 0..9
  Gesture gesture = Gesture::ok;
  double timestamp = 0.0;

  static InputEvent tag(int id, double t);
  static InputEvent gesture_event(Gesture g, double t);
  static InputEvent cancel(double t);
  /// Throws std::invalid_argument for a tag id outside 0..9.
  void validate() const;
};
const char* to_string(InputEvent::Kind kind);

struct EmittedAction {
  std::string node;
  int item = 0;  // 1-based
  std::string label;
  MenuAction action;
  double timestamp = 0.0;
};

struct MenuState {
  std::vector<std::string> path;  // root first
  MenuPhase phase = MenuPhase::idle;
  double armed_at = 0.0;
  std::optional<EmittedAction> pending;  // set exactly when executing
  double executing_since = 0.0;

  const std::string& current() const { return path.back(); }
  std::string path_string() const;
};

MenuState initial_menu_state(const MenuConfig& config);

struct MenuStepResult {
  MenuState state;
  std::optional<EmittedAction> action;
  std::optional<std::string> warning;
};

/// Pure transition function of the selection protocol. Tag n selects at once;
/// a gesture digit needs a preceding Ok inside the armed window. Tag or digit
/// 0 returns to the parent menu. Out-of-range selections are ignored with a
/// warning.
MenuStepResult menu_step(const MenuState& state, const MenuConfig& config, const InputEvent& event);

/// Time-driven transitions: armed-window expiry and action timeout.
MenuStepResult menu_tick(const MenuState& state, const MenuConfig& config, double now);

/// Marks the pending action finished; executing returns to idle.
MenuState menu_complete(const MenuState& state);

/// At most kDisplayLines lines of at most kDisplayColumns code points.
std::vector<std::string> render_menu(const MenuState& state, const MenuConfig& config);

/// Truncates UTF-8 text to `max_codepoints` code points.
std::string truncate_utf8(const std::string& text, std::size_t max_codepoints);

}  // namespace loco::hri
