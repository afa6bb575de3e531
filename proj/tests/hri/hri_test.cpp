#include "loco/dynamics/rigid_body.hpp"
#include "loco/hri/diver_follow.hpp"
#include "loco/hri/menu.hpp"
#include "loco/hri/rcvm.hpp"

#include <gtest/gtest.h>
#include <yaml-cpp/yaml.h>

#include <random>
#include <sstream>

using namespace loco;
using namespace loco::hri;
using loco::pilot::Command;

namespace {

const char* kMenu = R"(
version: 1
root: main
menus:
  main:
    label: LoCO
    items:
      - label: Turn left
        action: {kind: service_call, target: turn_to, args: {yaw_deg: "90"}}
      - label: Nod
        action: {kind: service_call, target: rcvm, args: {name: affirmative}}
      - label: Tools
        action: {kind: submenu, target: tools}
  tools:
    label: Tools
    items:
      - label: Square
        action: {kind: launch, target: square}
        timeout: 3
      - label: Deeper
        action: {kind: submenu, target: deeper}
  deeper:
    label: Deeper
    items:
      - label: Nothing
        action: {kind: noop}
)";

MenuConfig config() { return parse_menu(kMenu); }

std::string items_yaml(int n) {
  std::ostringstream s;
  s << "menus:\n  main:\n    label: M\n    items:\n";
  for (int i = 0; i < n; ++i) s << "      - {label: I" << i << ", action: {kind: noop}}\n";
  return s.str();
}

MenuErrorCode parse_error(const std::string& doc) {
  try {
    parse_menu(doc);
  } catch (const MenuParseError& e) {
    EXPECT_GT(e.line(), 0);
    return e.code();
  }
  ADD_FAILURE() << "document parsed";
  return MenuErrorCode::syntax;
}

MenuStepResult feed(MenuState& s, const MenuConfig& c, const InputEvent& e) {
  auto r = menu_step(s, c, e);
  s = r.state;
  return r;
}

}  // namespace

TEST(MenuParse, MinimalSingleNode) {
  const auto c = parse_menu("menus:\n  only:\n    label: One\n    items:\n      - {label: A, action: {kind: noop}}\n");
  EXPECT_EQ(c.root, "only");
  ASSERT_EQ(c.nodes.size(), 1u);
  EXPECT_EQ(c.node("only").items.at(0).action.kind, ActionKind::noop);
}

TEST(MenuParse, FiveItemLimit) {
  EXPECT_NO_THROW(parse_menu(items_yaml(5)));
  try {
    parse_menu(items_yaml(6));
    FAIL() << "six items accepted";
  } catch (const MenuParseError& e) {
    EXPECT_EQ(e.code(), MenuErrorCode::too_many_items);
    EXPECT_NE(std::string(e.what()).find("at most 5"), std::string::npos);
    EXPECT_EQ(e.where(), "menus.main");
    EXPECT_EQ(e.line(), 5);
  }
}

TEST(MenuParse, DistinctLocatedErrors) {
  EXPECT_EQ(parse_error(items_yaml(0)), MenuErrorCode::no_items);
  EXPECT_EQ(parse_error("menus:\n  m:\n    items:\n      - {label: A, action: {kind: noop}}\n"),
            MenuErrorCode::missing_label);
  EXPECT_EQ(parse_error("menus:\n  m:\n    label: M\n    items:\n      - {label: A}\n"), MenuErrorCode::missing_action);
  EXPECT_EQ(parse_error("menus:\n  m:\n    label: M\n    items:\n      - {action: {kind: noop}}\n"),
            MenuErrorCode::missing_label);
  EXPECT_EQ(parse_error("menus:\n  m:\n    label: M\n    items:\n      - {label: A, action: {kind: teleport, target: x}}\n"),
            MenuErrorCode::unknown_action_kind);
  EXPECT_EQ(parse_error("menus:\n  m:\n    label: M\n    items:\n      - {label: A, action: {kind: submenu, target: nope}}\n"),
            MenuErrorCode::unknown_submenu);
  EXPECT_EQ(parse_error("menus: [\n"), MenuErrorCode::syntax);
  EXPECT_EQ(parse_error("root: x\n" + items_yaml(1)), MenuErrorCode::missing_root);
}

TEST(MenuParse, CyclicSubmenuRejected) {
  const std::string doc = R"(menus:
  a:
    label: A
    items:
      - {label: to b, action: {kind: submenu, target: b}}
  b:
    label: B
    items:
      - {label: to a, action: {kind: submenu, target: a}}
)";
  try {
    parse_menu(doc);
    FAIL() << "cycle accepted";
  } catch (const MenuParseError& e) {
    EXPECT_EQ(e.code(), MenuErrorCode::cyclic_submenu);
    EXPECT_EQ(e.line(), 9);
  }
}

TEST(MenuParse, NestedSubmenusNavigable) {
  const auto c = config();
  auto s = initial_menu_state(c);
  feed(s, c, InputEvent::tag(3, 0.0));
  EXPECT_EQ(s.current(), "tools");
  feed(s, c, InputEvent::tag(2, 0.1));
  EXPECT_EQ(s.path_string(), "main/tools/deeper");
  feed(s, c, InputEvent::tag(0, 0.2));
  EXPECT_EQ(s.current(), "tools");
}

TEST(MenuProtocol, TagSelectsImmediately) {
  const auto c = config();
  auto s = initial_menu_state(c);
  const auto r = feed(s, c, InputEvent::tag(2, 1.0));
  ASSERT_TRUE(r.action);
  EXPECT_EQ(r.action->item, 2);
  EXPECT_EQ(r.action->action.target, "rcvm");
  EXPECT_EQ(s.phase, MenuPhase::executing);
}

TEST(MenuProtocol, DigitWithoutOkIsIgnored) {
  const auto c = config();
  auto s = initial_menu_state(c);
  const auto r = feed(s, c, InputEvent::gesture_event(Gesture::two, 1.0));
  EXPECT_FALSE(r.action);
  EXPECT_TRUE(r.warning);
  EXPECT_EQ(s.phase, MenuPhase::idle);
}

TEST(MenuProtocol, OkThenDigitSelects) {
  const auto c = config();
  auto s = initial_menu_state(c);
  feed(s, c, InputEvent::gesture_event(Gesture::ok, 1.0));
  EXPECT_EQ(s.phase, MenuPhase::armed);
  const auto r = feed(s, c, InputEvent::gesture_event(Gesture::two, 2.0));
  ASSERT_TRUE(r.action);
  EXPECT_EQ(r.action->item, 2);
}

TEST(MenuProtocol, ArmedWindowExpires) {
  const auto c = config();
  auto s = initial_menu_state(c);
  feed(s, c, InputEvent::gesture_event(Gesture::ok, 1.0));
  const auto r = feed(s, c, InputEvent::gesture_event(Gesture::one, 6.5));
  EXPECT_FALSE(r.action);
  EXPECT_EQ(s.phase, MenuPhase::idle);
  feed(s, c, InputEvent::gesture_event(Gesture::ok, 7.0));
  s = menu_tick(s, c, 12.01).state;
  EXPECT_EQ(s.phase, MenuPhase::idle);
}

TEST(MenuProtocol, OutOfRangeIgnoredCancelAndCompletion) {
  const auto c = config();
  auto s = initial_menu_state(c);
  auto r = feed(s, c, InputEvent::tag(4, 0.0));
  EXPECT_FALSE(r.action);
  EXPECT_TRUE(r.warning);
  feed(s, c, InputEvent::gesture_event(Gesture::ok, 0.5));
  r = feed(s, c, InputEvent::gesture_event(Gesture::five, 0.6));
  EXPECT_FALSE(r.action);
  EXPECT_EQ(s.phase, MenuPhase::armed);
  feed(s, c, InputEvent::cancel(0.7));
  EXPECT_EQ(s.phase, MenuPhase::idle);
  feed(s, c, InputEvent::tag(1, 1.0));
  EXPECT_EQ(s.phase, MenuPhase::executing);
  r = feed(s, c, InputEvent::tag(2, 1.1));
  EXPECT_FALSE(r.action);
  s = menu_complete(s);
  EXPECT_EQ(s.phase, MenuPhase::idle);
  EXPECT_FALSE(s.pending);
  EXPECT_THROW(InputEvent::tag(10, 0.0), std::invalid_argument);
}

TEST(MenuProtocol, ExecutingTimesOut) {
  const auto c = config();
  auto s = initial_menu_state(c);
  feed(s, c, InputEvent::tag(3, 0.0));
  feed(s, c, InputEvent::tag(1, 1.0));
  EXPECT_EQ(s.phase, MenuPhase::executing);
  EXPECT_EQ(menu_tick(s, c, 3.9).state.phase, MenuPhase::executing);
  EXPECT_EQ(menu_tick(s, c, 4.01).state.phase, MenuPhase::idle);
}

namespace {

// Random event streams over the closed input alphabet.
std::vector<InputEvent> random_events(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> kind(0, 9);
  std::uniform_int_distribution<int> tag(0, 9);
  std::uniform_int_distribution<int> gesture(0, 6);
  std::uniform_real_distribution<double> gap(0.0, 4.0);
  std::vector<InputEvent> out;
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    t += gap(rng);
    const int k = kind(rng);
    if (k < 3) {
      out.push_back(InputEvent::tag(tag(rng), t));
    } else if (k < 9) {
      out.push_back(InputEvent::gesture_event(static_cast<Gesture>(gesture(rng)), t));
    } else {
      out.push_back(InputEvent::cancel(t));
    }
  }
  return out;
}

std::string run_log(const MenuConfig& c, const std::vector<InputEvent>& events) {
  std::ostringstream log;
  auto s = initial_menu_state(c);
  for (const auto& e : events) {
    s = menu_tick(s, c, e.timestamp).state;
    const auto r = menu_step(s, c, e);
    s = r.state;
    if (r.action) {
      log << r.action->timestamp << ' ' << r.action->node << ' ' << r.action->item << '\n';
      s = menu_complete(s);
    }
    log << s.path_string() << ' ' << to_string(s.phase) << '\n';
  }
  return log.str();
}

}  // namespace

TEST(MenuProperties, ReplayIsDeterministic) {
  const auto c = config();
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto events = random_events(rng, 60);
    EXPECT_EQ(run_log(c, events), run_log(c, events));
  }
}

TEST(MenuProperties, DigitNeverFiresWithoutOkInWindow) {
  const auto c = config();
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    auto s = initial_menu_state(c);
    bool ok_seen = false;
    double ok_at = 0.0;
    for (const auto& e : random_events(rng, 40)) {
      const auto before = s;
      const auto r = menu_step(s, c, e);
      if (r.action && e.kind == InputEvent::Kind::gesture) {
        ASSERT_EQ(before.phase, MenuPhase::armed);
        ASSERT_TRUE(ok_seen);
        ASSERT_LE(e.timestamp - ok_at, c.armed_window);
      }
      if (e.kind == InputEvent::Kind::gesture && e.gesture == Gesture::ok && before.phase != MenuPhase::executing) {
        ok_seen = true;
        ok_at = e.timestamp;
      }
      s = r.action ? menu_complete(r.state) : r.state;
      if (s.phase != MenuPhase::armed) ok_seen = false;
    }
  }
}

TEST(MenuRender, ListsItemsAndPhase) {
  const auto c = config();
  auto s = initial_menu_state(c);
  auto frame = render_menu(s, c);
  ASSERT_GE(frame.size(), 4u);
  EXPECT_EQ(frame[0], "LoCO");
  EXPECT_EQ(frame[1], "1. Turn left");
  EXPECT_EQ(frame[3], "3. Tools");
  s = menu_step(s, c, InputEvent::gesture_event(Gesture::ok, 0.0)).state;
  frame = render_menu(s, c);
  EXPECT_EQ(frame.back(), ">> ARMED: show digit");
  EXPECT_EQ(render_menu(s, c), frame);
}

TEST(MenuRender, ClipsLongLabelsByCodepoint) {
  const auto c = parse_menu(
      "menus:\n  m:\n    label: \"\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9"
      "\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9\"\n"
      "    items:\n      - {label: a very long label that never fits the display, action: {kind: noop}}\n");
  const auto frame = render_menu(initial_menu_state(c), c);
  EXPECT_LE(frame.size(), kDisplayLines);
  EXPECT_EQ(frame[0].size(), 2 * kDisplayColumns);  // 21 two-byte code points
  EXPECT_EQ(frame[1], "1. a very long label ");
  EXPECT_EQ(truncate_utf8("abc", 5), "abc");
}

TEST(Rcvm, AffirmativeShapeAndZeroTail) {
  const auto seq = builtin_rcvm("affirmative");
  EXPECT_DOUBLE_EQ(seq.total_duration(), 4.5);
  const auto cmds = rcvm_execute(seq, 0.0, 100.0);
  ASSERT_FALSE(cmds.empty());
  EXPECT_TRUE(cmds.back().is_zero());
  EXPECT_DOUBLE_EQ(cmds[0].pitch(), 0.5);
  EXPECT_DOUBLE_EQ(cmds[150].pitch(), -0.5);
  EXPECT_DOUBLE_EQ(cmds[250].pitch(), 0.5);
  EXPECT_TRUE(cmds[420].is_zero());
  for (const auto& c : cmds) {
    EXPECT_EQ(c.thrust(), 0.0);
    EXPECT_EQ(c.yaw(), 0.0);
  }
}

TEST(Rcvm, SingleZeroStepEmitsOnlyZero) {
  RcvmSequence s;
  s.name = "rest";
  s.steps = {{Command(), 0.5}};
  for (const auto& c : rcvm_execute(s, 0.0, 100.0)) EXPECT_TRUE(c.is_zero());
}

TEST(Rcvm, CancelGivesZeroAndAborted) {
  RcvmPlayer p(builtin_rcvm("negative"), 0.0);
  EXPECT_FALSE(p.tick(0.5).is_zero());
  p.cancel();
  EXPECT_EQ(p.status(), RcvmStatus::aborted);
  EXPECT_TRUE(p.tick(0.6).is_zero());
}

TEST(Rcvm, ValidationAndYaml) {
  RcvmSequence s;
  s.name = "long";
  s.steps = {{Command(0, 0.5, 0), 10.0}};
  s.loop_count = 3;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.loop_count = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  EXPECT_THROW(builtin_rcvm("wave"), std::invalid_argument);
  const auto parsed = parse_rcvm(YAML::Load(R"(
sequences:
  bob:
    loop_count: 3
    steps:
      - {pitch: 0.3, duration: 0.5}
      - {pitch: -0.3, duration: 0.5}
)"));
  ASSERT_EQ(parsed.count("bob"), 1u);
  EXPECT_EQ(parsed.at("bob").loop_count, 3);
  EXPECT_DOUBLE_EQ(parsed.at("bob").total_duration(), 3.5);
  EXPECT_THROW(parse_rcvm(YAML::Load("sequences: {x: {steps: [{pitch: 2, duration: 1}]}}")), std::invalid_argument);
}

TEST(Rcvm, NodAndShakeInSimulation) {
  const auto params = dynamics::default_vehicle_params();
  for (const auto& [name, axis] : {std::pair<std::string, int>{"affirmative", 1}, {"negative", 2}}) {
    dynamics::RigidBodyState s;
    RcvmPlayer player(builtin_rcvm(name), 0.0);
    int alternations = 0;
    double last_sign = 0.0;
    double peak = 0.0;
    Command last;
    while (s.time < 10.0) {
      last = player.tick(s.time);
      s = dynamics::step(s, params, pilot::mix_to_thrusters(last), 0.01);
      // Pitch angle for the nod; world yaw rate for the shake.
      const double v = axis == 1 ? attitude_of(s.orientation).pitch : (s.orientation * s.angular_velocity).z();
      if (axis == 1) peak = std::max(peak, std::abs(rad2deg(v)));
      if (std::abs(v) > (axis == 1 ? deg2rad(1.0) : 0.05)) {
        const double sign = v > 0 ? 1.0 : -1.0;
        if (last_sign != 0.0 && sign != last_sign) ++alternations;
        last_sign = sign;
      }
    }
    EXPECT_GE(alternations, 2) << name;
    EXPECT_TRUE(last.is_zero());
    if (axis == 1) {
      EXPECT_GE(peak, 10.0);
      EXPECT_LT(std::abs(rad2deg(attitude_of(s.orientation).pitch)), 5.0);
    }
  }
}

TEST(DiverFollow, CenteredAtTargetIsNearZero) {
  DiverFollowGains g;
  sensors::Detection d;
  const double side = std::sqrt(g.target_area_fraction * d.image_size.area());
  d.bbox = {400.0, 300.0, side, side};
  const auto [s, c] = diver_follow_step(DiverFollowState{}, d, g, 0.1);
  EXPECT_NEAR(c.thrust(), 0.0, 1e-9);
  EXPECT_NEAR(c.yaw(), 0.0, 1e-12);
  EXPECT_NEAR(c.pitch(), 0.0, 1e-12);
  EXPECT_EQ(s.mode, FollowMode::tracking);
}

TEST(DiverFollow, SignsSteerTowardDiver) {
  DiverFollowGains g;
  sensors::Detection d;
  const double full = g.target_area_fraction * d.image_size.area();
  d.bbox = {200.0, 150.0, std::sqrt(full / 2), std::sqrt(full / 2)};  // up-left, half the target area
  const auto [s, c] = diver_follow_step(DiverFollowState{}, d, g, 0.1);
  EXPECT_GT(c.yaw(), 0.0);
  EXPECT_GT(c.pitch(), 0.0);
  EXPECT_GT(c.thrust(), 0.0);
  EXPECT_EQ(s.last_seen_side, 1.0);
}

TEST(DiverFollow, LeftDetectionTurnsVehicleTowardDiver) {
  // End-to-end sign chain: detection -> command -> mix -> dynamics -> bearing.
  const auto params = dynamics::default_vehicle_params();
  const sensors::PinholeCamera cam;
  sensors::DiverTarget diver;
  diver.position = Vec3(4.0, 1.5, 0.0);
  dynamics::RigidBodyState s;
  DiverFollowState f;
  const auto bearing = [&] {
    const Vec3 rel = s.orientation.conjugate() * (diver.position - s.position);
    return std::atan2(rel.y(), rel.x());
  };
  const double initial = bearing();
  for (int i = 0; i < 200; ++i) {
    const auto det = sensors::project_diver(s, diver, cam);
    auto [next, cmd] = diver_follow_step(f, det, DiverFollowGains{}, 0.01);
    f = next;
    s = dynamics::step(s, params, pilot::mix_to_thrusters(cmd), 0.01);
  }
  EXPECT_GT(initial, 0.0);
  EXPECT_LT(std::abs(bearing()), initial);
}

TEST(DiverFollow, LossHoldsThenSearches) {
  DiverFollowGains g;
  DiverFollowState s;
  sensors::Detection d;
  d.bbox = {600.0, 300.0, 50.0, 100.0};  // right of centre
  s = diver_follow_step(s, d, g, 0.1).first;
  const Command held = s.last_command;
  for (int i = 0; i < 19; ++i) {
    auto [n, c] = diver_follow_step(s, std::nullopt, g, 0.1);
    s = n;
    EXPECT_EQ(c, held);
    EXPECT_EQ(s.mode, FollowMode::tracking);
  }
  s = diver_follow_step(s, std::nullopt, g, 0.1).first;
  auto [n, c] = diver_follow_step(s, std::nullopt, g, 0.1);
  EXPECT_EQ(n.mode, FollowMode::searching);
  EXPECT_DOUBLE_EQ(c.yaw(), -0.2);
  EXPECT_DOUBLE_EQ(c.thrust(), 0.0);
  EXPECT_THROW(diver_follow_step(s, std::nullopt, g, 0.0), std::invalid_argument);
}

namespace {

struct FollowStats {
  double centred = 0.0;
  double area_ok = 0.0;
};

// Diver swims a straight line at 0.3 m/s; follower runs on 10 Hz detections.
FollowStats follow_run(double duration) {
  const auto params = dynamics::default_vehicle_params();
  const sensors::PinholeCamera cam;
  const DiverFollowGains gains;
  sensors::DiverTarget diver;
  const Vec3 start(4.0, 1.0, -0.3);
  const Vec3 velocity = Vec3(0.3, 0.1, 0.0).normalized() * 0.3;
  dynamics::RigidBodyState s;
  DiverFollowState f;
  Command cmd;
  int frames = 0, centred = 0, area_ok = 0;
  for (int i = 0; s.time < duration; ++i) {
    diver.position = start + velocity * s.time;
    if (i % 10 == 0) {
      const auto det = sensors::project_diver(s, diver, cam);
      auto [next, c] = diver_follow_step(f, det, gains, 0.1);
      f = next;
      cmd = c;
      if (s.time >= 30.0) {
        ++frames;
        if (det && std::abs(det->bbox.center_x - 400.0) <= 0.1 * 800.0) ++centred;
        if (det && std::abs(det->area_fraction() / gains.target_area_fraction - 1.0) <= 0.3) ++area_ok;
      }
    }
    s = dynamics::step(s, params, pilot::mix_to_thrusters(cmd), 0.01);
  }
  return {static_cast<double>(centred) / frames, static_cast<double>(area_ok) / frames};
}

}  // namespace

TEST(DiverFollow, ClosedLoopKeepsDiverCentredAndAtRange) {
  const auto stats = follow_run(120.0);
  EXPECT_GE(stats.centred, 0.9);
  EXPECT_GE(stats.area_ok, 0.9);
}
