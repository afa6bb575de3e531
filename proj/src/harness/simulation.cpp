#include "loco/harness/simulation.hpp"

#include "loco/dynamics/rigid_body.hpp"
#include "loco/estimation/attitude_ekf.hpp"
#include "loco/estimation/odometry.hpp"
#include "loco/harness/log.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <thread>

namespace loco::harness {

namespace {

enum class Owner { none, teleop, primitive, rcvm, follower };

const char* to_string(Owner o) {
  switch (o) {
    case Owner::none: return "none";
    case Owner::teleop: return "teleop";
    case Owner::primitive: return "primitive";
    case Owner::rcvm: return "rcvm";
    case Owner::follower: return "follower";
  }
  return "unknown";
}

std::size_t steps_per(double period, double dt) {
  return static_cast<std::size_t>(std::max<long long>(1, std::llround(period / dt)));
}

json rpy_deg(const Quat& q) {
  const Attitude a = attitude_of(q);
  return json::array({rad2deg(a.roll), rad2deg(a.pitch), rad2deg(a.yaw)});
}

json args_to_json(const std::map<std::string, std::string>& args) {
  json j = json::object();
  for (const auto& [k, v] : args) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      j[k] = used == v.size() ? json(d) : json(v);
    } catch (const std::exception&) {
      j[k] = v;
    }
  }
  return j;
}

class Simulation {
 public:
  Simulation(const Scenario& sc, std::ostream& out, const RunOptions& opt)
      : sc_(sc),
        opt_(opt),
        dt_(opt.dt.value_or(sc.dt)),
        seed_(opt.seed.value_or(sc.seed)),
        writer_(out),
        pilot_(sc.pilot),
        load_(sc.compute_load) {
    Scenario check = sc_;
    check.dt = dt_;
    check.validate();
    noise_ = sc_.noise;
    noise_.seed = seed_;
    truth_ = sc_.initial_state;
    est_ = estimation::initial_estimate(truth_.orientation, tuning_, truth_.time);
    odom_.position = truth_.position;
    odom_.yaw = attitude_of(truth_.orientation).yaw;
    if (sc_.menu) menu_ = hri::initial_menu_state(*sc_.menu);
    record_every_ = steps_per(1.0 / sc_.log_rate, dt_);
    pressure_every_ = steps_per(1.0 / sc_.rates.pressure_hz, dt_);
    camera_every_ = steps_per(1.0 / sc_.rates.detection_hz, dt_);
    total_steps_ = static_cast<std::size_t>(std::llround(sc_.duration / dt_));
  }

  RunSummary run() {
    writer_.write(make_log_header(sc_.name, fnv1a_hex(sc_.source), seed_, dt_, sc_.log_rate));
    const auto wall_start = std::chrono::steady_clock::now();
    while (step_ < total_steps_ && !done_) {
      if (opt_.realtime) {
        std::this_thread::sleep_until(wall_start + std::chrono::duration<double>(now()));
      }
      try {
        tick();
      } catch (const std::exception& e) {
        summary_.reason = ExitReason::fatal;
        summary_.diagnostic = e.what();
        writer_.write(json{{"type", "diagnostic"}, {"t", now()}, {"error", e.what()}, {"events", events_}});
        spdlog::error("run aborted at t={:.3f}: {}", now(), e.what());
        done_ = true;
      }
    }
    summary_.end_time = now();
    summary_.steps = step_;
    summary_.records = records_;
    summary_.final_state = truth_;
    summary_.power = power_;
    return std::move(summary_);
  }

 private:
  double now() const { return static_cast<double>(step_) * dt_; }

  void event(json e) {
    if (!e.contains("t")) e["t"] = now();
    events_.push_back(std::move(e));
  }

  // Input handling ---------------------------------------------------------

  void fire_scenario_events() {
    while (next_event_ < sc_.events.size() && sc_.events[next_event_].at <= now() + 0.5 * dt_) {
      const ScenarioEvent& e = sc_.events[next_event_++];
      json fired{{"type", "scenario_event"}, {"kind", to_string(e.kind)}};
      switch (e.kind) {
        case ScenarioEvent::Kind::input: {
          hri::InputEvent in = e.input;
          in.timestamp = now();
          fired["input"] = to_json(in);
          event(fired);
          menu_input(in);
          break;
        }
        case ScenarioEvent::Kind::primitive:
          event(fired);
          start_primitive(e.primitive);
          break;
        case ScenarioEvent::Kind::command:
          fired["command"] = to_json(e.command);
          event(fired);
          set_owner(Owner::teleop);
          scripted_ = e.command;
          break;
        case ScenarioEvent::Kind::follower:
          fired["on"] = e.follower_on;
          event(fired);
          if (e.follower_on) {
            start_follower();
          } else if (owner_ == Owner::follower) {
            set_owner(Owner::none);
          }
          break;
        case ScenarioEvent::Kind::rcvm:
          fired["name"] = e.rcvm;
          event(fired);
          start_rcvm(e.rcvm);
          break;
        case ScenarioEvent::Kind::power_profile:
          fired["load"] = power::to_string(e.load);
          event(fired);
          load_ = e.load;
          break;
        case ScenarioEvent::Kind::end:
          event(fired);
          summary_.reason = ExitReason::stopped;
          stop_after_tick_ = true;
          break;
      }
    }
  }

  void reply(const OutboundFrame& frame) {
    if (opt_.bridge) opt_.bridge->publish(frame);
  }

  void handle_bridge_message(const InboundMessage& msg) {
    switch (msg.type) {
      case InboundMessage::Type::command:
        if (owner_ != Owner::teleop) set_owner(Owner::teleop);
        scripted_.reset();
        pilot_.teleop(msg.command, now());
        break;
      case InboundMessage::Type::menu_input: {
        hri::InputEvent in = msg.input;
        in.timestamp = now();
        event(json{{"type", "bridge_input"}, {"input", to_json(in)}});
        const auto result = menu_input(in);
        if (!sc_.menu) {
          reply(ack_frame(msg, false, "no menu configured"));
        } else if (result.action) {
          reply(ack_frame(msg, true, "action fired", to_json(*result.action)));
        } else {
          reply(ack_frame(msg, true, result.warning.value_or("no action")));
        }
        break;
      }
      case InboundMessage::Type::primitive: {
        const auto error = start_primitive(msg.primitive);
        reply(ack_frame(msg, !error, error.value_or("started")));
        break;
      }
      case InboundMessage::Type::scenario_control:
        event(json{{"type", "scenario_control"}, {"action", msg.control}});
        if (msg.control == "stop") {
          summary_.reason = ExitReason::stopped;
          stop_after_tick_ = true;
        }
        reply(ack_frame(msg, true, msg.control));
        break;
    }
  }

  void drain_bridge() {
    if (!opt_.bridge) return;
    for (auto& msg : opt_.bridge->drain_inbound()) {
      if (msg.type == InboundMessage::Type::scenario_control && msg.control != "stop") {
        paused_ = msg.control == "pause";
        reply(ack_frame(msg, true, msg.control));
        continue;
      }
      handle_bridge_message(msg);
    }
    // Paused: only scenario_control is serviced; other traffic waits in the queue.
    while (paused_ && !stop_after_tick_) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
      std::vector<InboundMessage> held;
      for (auto& msg : opt_.bridge->drain_inbound()) {
        if (msg.type != InboundMessage::Type::scenario_control) {
          held.push_back(std::move(msg));
          continue;
        }
        if (msg.control == "stop") {
          handle_bridge_message(msg);
        } else {
          paused_ = msg.control == "pause";
          reply(ack_frame(msg, true, msg.control));
        }
      }
      for (auto& msg : held) opt_.bridge->submit(std::move(msg));
    }
  }

  hri::MenuStepResult menu_input(const hri::InputEvent& in) {
    if (!sc_.menu) return {};
    auto result = hri::menu_step(menu_, *sc_.menu, in);
    menu_ = result.state;
    if (result.warning) event(json{{"type", "menu_warning"}, {"message", *result.warning}});
    if (result.action) {
      event(json{{"type", "menu_action"}, {"action", to_json(*result.action)}});
      summary_.actions.push_back(*result.action);
      dispatch(*result.action);
    }
    return result;
  }

  void complete_menu_action() {
    if (sc_.menu && menu_.phase == hri::MenuPhase::executing) {
      menu_ = hri::menu_complete(menu_);
      event(json{{"type", "menu_complete"}});
    }
    menu_owner_.reset();
  }

  void dispatch(const hri::EmittedAction& a) {
    const auto& act = a.action;
    std::optional<std::string> error;
    std::optional<Owner> started;
    switch (act.kind) {
      case hri::ActionKind::service_call:
        if (act.target == "rcvm") {
          const auto it = act.args.find("name");
          error = start_rcvm(it == act.args.end() ? std::string() : it->second);
          started = Owner::rcvm;
        } else {
          json req = args_to_json(act.args);
          req["kind"] = act.target;
          try {
            error = start_primitive(primitive_from_json(req));
            started = Owner::primitive;
          } catch (const ProtocolError& e) {
            error = e.what();
          }
        }
        break;
      case hri::ActionKind::launch:
        if (act.target == "diver_follow") {
          start_follower();
          started = Owner::follower;
        } else {
          error = "no launchable named '" + act.target + "'";
        }
        break;
      case hri::ActionKind::set_param:
        if (act.target == "compute_load" && act.args.count("value")) {
          try {
            load_ = power::compute_load_from_string(act.args.at("value"));
          } catch (const std::invalid_argument& e) {
            error = e.what();
          }
        } else {
          error = "unknown parameter '" + act.target + "'";
        }
        break;
      case hri::ActionKind::submenu:
      case hri::ActionKind::noop:
        break;
    }
    if (error) event(json{{"type", "action_failed"}, {"target", act.target}, {"reason", *error}});
    // Long-running actions hold the menu in executing until they finish; the
    // rest complete at once.
    if (!error && started && owner_ == *started && (*started != Owner::primitive || pilot_.busy())) {
      menu_owner_ = *started;
    } else {
      complete_menu_action();
    }
  }

  // Ownership ---------------------------------------------------------------

  void set_owner(Owner next) {
    if (next == owner_ && next != Owner::rcvm && next != Owner::follower) return;
    const Owner prev = owner_;
    switch (prev) {
      case Owner::primitive:
        if (pilot_.busy()) pilot_.cancel(now(), "preempted");
        collect_results();
        break;
      case Owner::rcvm:
        if (rcvm_ && rcvm_->status() == hri::RcvmStatus::running) {
          rcvm_->cancel();
          event(json{{"type", "rcvm"}, {"name", rcvm_->sequence().name}, {"status", "aborted"}});
        }
        rcvm_.reset();
        break;
      case Owner::follower:
        follower_.reset();
        break;
      case Owner::teleop:
      case Owner::none:
        break;
    }
    scripted_.reset();
    pilot_.teleop(pilot::Command{}, now());
    owner_ = next;
    if (prev != next) event(json{{"type", "owner"}, {"from", to_string(prev)}, {"to", to_string(next)}});
    if (menu_owner_ && *menu_owner_ == prev) complete_menu_action();
  }

  std::optional<std::string> start_primitive(const pilot::PrimitiveRequest& req) {
    try {
      req.validate();
    } catch (const std::invalid_argument& e) {
      event(json{{"type", "primitive_rejected"}, {"kind", pilot::to_string(req.kind)}, {"reason", e.what()}});
      return std::string(e.what());
    }
    if (req.kind == pilot::PrimitiveKind::stop) {
      set_owner(Owner::none);
      pilot_.request(req, now());
      collect_results();
      return std::nullopt;
    }
    if (pilot_.busy()) {
      event(json{{"type", "primitive_rejected"}, {"kind", pilot::to_string(req.kind)}, {"reason", "busy"}});
      return std::string("busy");
    }
    set_owner(Owner::primitive);
    pilot_.request(req, now());
    event(json{{"type", "primitive_started"}, {"kind", pilot::to_string(req.kind)}});
    return std::nullopt;
  }

  std::optional<std::string> start_rcvm(const std::string& name) {
    const auto it = sc_.rcvm.find(name);
    if (it == sc_.rcvm.end()) return "unknown rcvm sequence '" + name + "'";
    set_owner(Owner::rcvm);
    rcvm_.emplace(it->second, now());
    event(json{{"type", "rcvm"}, {"name", name}, {"status", "started"}});
    return std::nullopt;
  }

  void start_follower() {
    set_owner(Owner::follower);
    follower_.emplace();
    follower_cmd_ = pilot::Command{};
    event(json{{"type", "follower"}, {"status", "started"}});
  }

  void collect_results() {
    while (auto r = pilot_.take_result()) {
      event(json{{"type", "primitive_result"}, {"result", to_json(*r)}});
      if (owner_ == Owner::primitive && !pilot_.busy()) {
        owner_ = Owner::none;
        event(json{{"type", "owner"}, {"from", "primitive"}, {"to", "none"}});
        if (menu_owner_ == Owner::primitive) complete_menu_action();
      }
    }
  }

  // Main step ----------------------------------------------------------------

  pilot::Command command_for_tick() {
    if (owner_ == Owner::teleop && scripted_) pilot_.teleop(*scripted_, now());
    pilot::PilotInput in;
    in.time = now();
    in.yaw = est_.attitude().yaw;
    in.truth = truth_;
    const pilot::Command from_pilot = pilot_.tick(in);
    collect_results();

    switch (owner_) {
      case Owner::teleop:
      case Owner::primitive:
        return from_pilot;
      case Owner::rcvm: {
        const pilot::Command c = rcvm_->tick(now());
        if (rcvm_->status() != hri::RcvmStatus::running) {
          event(json{{"type", "rcvm"}, {"name", rcvm_->sequence().name}, {"status", hri::to_string(rcvm_->status())}});
          rcvm_.reset();
          set_owner(Owner::none);
        }
        return c;
      }
      case Owner::follower:
        return follower_cmd_;
      case Owner::none:
        break;
    }
    return pilot::Command{};
  }

  void camera_tick() {
    const auto diver = sc_.diver_position(now());
    detection_.reset();
    if (diver) {
      sensors::DiverTarget target;
      target.position = *diver;
      detection_ = sensors::project_diver(truth_, target, sc_.camera, noise_, camera_rng_);
    }
    if (follower_) {
      auto [next, cmd] = hri::diver_follow_step(*follower_, detection_, sc_.follower,
                                                static_cast<double>(camera_every_) * dt_);
      if (next.mode != follower_->mode) {
        event(json{{"type", "follower"}, {"status", hri::to_string(next.mode)}});
      }
      *follower_ = next;
      follower_cmd_ = cmd;
    }
  }

  void power_tick(const dynamics::ThrusterSet& thrusters) {
    const bool was_alarm = power_.alarm_active;
    const bool was_powered = power_.powered;
    power_ = power::drain_step(power_, sc_.power, thrusters, load_, dt_);
    if (!was_alarm && power_.alarm_active) {
      event(json{{"type", "low_voltage_alarm"},
                 {"t", power_.alarm_time.value_or(now())},
                 {"threshold", sc_.power.alarm_voltage}});
    }
    if (was_powered && !power_.powered) {
      event(json{{"type", "power_exhausted"}, {"t", power_.exhausted_time.value_or(now())}});
      summary_.reason = ExitReason::power_exhausted;
      stop_after_tick_ = true;
    }
  }

  void tick() {
    const bool camera_frame = !sc_.power_only && step_ % camera_every_ == 0;
    fire_scenario_events();
    drain_bridge();

    pilot::Command cmd;
    if (sc_.power_only) {
      cmd = owner_ == Owner::teleop && scripted_ ? *scripted_ : pilot::Command{};
    } else {
      if (sc_.menu) {
        const auto timed = hri::menu_tick(menu_, *sc_.menu, now());
        if (timed.state.phase != menu_.phase) event(json{{"type", "menu_timeout"}});
        menu_ = timed.state;
        if (menu_owner_ && menu_.phase != hri::MenuPhase::executing) menu_owner_.reset();
      }
      if (camera_frame) camera_tick();
      cmd = command_for_tick();
    }
    command_ = power_.powered ? cmd : pilot::Command{};
    thrusters_ = pilot::mix_to_thrusters(command_);
    power_tick(thrusters_);

    if (!sc_.power_only) {
      const auto r = dynamics::step_detailed(truth_, sc_.vehicle, thrusters_, dt_);
      truth_ = r.state;
      const auto imu = sensors::sample_imu(truth_, r.specific_force, noise_, imu_rng_);
      est_ = estimation::ekf_predict(est_, imu, dt_, tuning_);
      motion_.propagate(thrusters_, sc_.vehicle, imu.angular_velocity - est_.gyro_bias, dt_);
      est_ = estimation::ekf_update_accel(est_, imu, tuning_, motion_.linear_acceleration()).estimate;
      odom_ = estimation::dead_reckon_step(odom_, thrusters_, sc_.vehicle, est_.attitude().yaw, dt_);
      if ((step_ + 1) % pressure_every_ == 0) {
        const auto p = sensors::sample_pressure(truth_, sc_.vehicle.fluid_density, noise_, pressure_rng_, sc_.vehicle.gravity);
        depth_.update(sensors::depth_from_pressure(p, sc_.vehicle.fluid_density, sc_.vehicle.gravity), truth_.time);
      }
    }

    ++step_;
    if (step_ % record_every_ == 0 || stop_after_tick_ || step_ == total_steps_) write_record();
    if (stop_after_tick_) done_ = true;
  }

  json menu_frame() const {
    if (!sc_.menu) return nullptr;
    return json{{"lines", hri::render_menu(menu_, *sc_.menu)},
                {"path", menu_.path_string()},
                {"phase", hri::to_string(menu_.phase)}};
  }

  void write_record() {
    json r{{"type", "record"},
           {"t", now()},
           {"cmd", to_json(command_)},
           {"owner", to_string(owner_)},
           {"thrusters", json::array({thrusters_.left(), thrusters_.right(), thrusters_.vertical()})},
           {"power",
            {{"voltage", json::array({power::voltage_of_charge(power_.packs[0]),
                                      power::voltage_of_charge(power_.packs[1])})},
             {"charge", json::array({power_.packs[0].charge, power_.packs[1].charge})},
             {"current", power_.last_current},
             {"alarm", power_.alarm_active},
             {"powered", power_.powered},
             {"load", power::to_string(load_)}}},
           {"events", std::move(events_)}};
    events_ = json::array();
    if (!sc_.power_only) {
      r["truth"] = {{"pos", to_json(truth_.position)},
                    {"quat", to_json(truth_.orientation)},
                    {"vel", to_json(truth_.linear_velocity)},
                    {"omega", to_json(truth_.angular_velocity)},
                    {"rpy_deg", rpy_deg(truth_.orientation)},
                    {"depth", truth_.depth()}};
      r["est"] = {{"quat", to_json(est_.orientation)},
                  {"rpy_deg", rpy_deg(est_.orientation)},
                  {"bias", to_json(est_.gyro_bias)},
                  {"cov_trace", est_.covariance.trace()},
                  {"psd", estimation::is_symmetric_psd(est_.covariance, tuning_.psd_tolerance)},
                  {"vel", to_json(motion_.velocity())},
                  {"odom",
                   {{"pos", json::array({odom_.position.x(), odom_.position.y()})},
                    {"yaw_deg", rad2deg(odom_.yaw)},
                    {"speed", odom_.velocity.x()}}},
                  {"depth", depth_.value() ? json(*depth_.value()) : json(nullptr)}};
      json bbox = nullptr;
      if (detection_) {
        bbox = {{"cx", detection_->bbox.center_x},
                {"cy", detection_->bbox.center_y},
                {"w", detection_->bbox.width},
                {"h", detection_->bbox.height},
                {"image", json::array({detection_->image_size.width, detection_->image_size.height})},
                {"area_fraction", detection_->area_fraction()}};
      }
      const auto primitive = pilot_.active_kind();
      r["hri"] = {{"menu", sc_.menu ? json(menu_.path_string()) : json(nullptr)},
                  {"phase", sc_.menu ? json(hri::to_string(menu_.phase)) : json(nullptr)},
                  {"follow", hri::to_string(follower_ ? follower_->mode : hri::FollowMode::idle)},
                  {"bbox", bbox},
                  {"primitive", primitive ? json(pilot::to_string(*primitive)) : json(nullptr)},
                  {"rcvm", rcvm_ ? json(rcvm_->sequence().name) : json(nullptr)}};
      const auto diver = sc_.diver_position(now());
      r["diver"] = diver ? to_json(*diver) : json(nullptr);
      json frame = menu_frame();
      if (!frame.is_null() && frame != last_menu_frame_) {
        r["hri"]["menu_frame"] = frame;
        last_menu_frame_ = frame;
        reply({"menu_frame", frame});
      }
    }
    reply({"state", r});
    writer_.write(r);
    ++records_;
  }

  const Scenario& sc_;
  RunOptions opt_;
  double dt_;
  std::uint64_t seed_;
  LogWriter writer_;
  RunSummary summary_;

  sensors::NoiseSpec noise_;
  sensors::RngStream imu_rng_{seed(), 1};
  sensors::RngStream pressure_rng_{seed(), 2};
  sensors::RngStream camera_rng_{seed(), 3};
  estimation::EkfTuning tuning_;

  dynamics::RigidBodyState truth_;
  estimation::OrientationEstimate est_;
  estimation::MotionModel motion_;
  estimation::DepthFilter depth_;
  estimation::OdometryEstimate odom_;

  pilot::Pilot pilot_;
  Owner owner_ = Owner::none;
  std::optional<pilot::Command> scripted_;
  std::optional<hri::RcvmPlayer> rcvm_;
  std::optional<hri::DiverFollowState> follower_;
  pilot::Command follower_cmd_;
  std::optional<sensors::Detection> detection_;
  hri::MenuState menu_;
  std::optional<Owner> menu_owner_;
  json last_menu_frame_;

  power::PowerState power_;
  power::ComputeLoad load_;
  pilot::Command command_;
  dynamics::ThrusterSet thrusters_;

  std::size_t step_ = 0;
  std::size_t total_steps_ = 0;
  std::size_t record_every_ = 1;
  std::size_t pressure_every_ = 1;
  std::size_t camera_every_ = 1;
  std::size_t next_event_ = 0;
  std::size_t records_ = 0;
  json events_ = json::array();
  bool paused_ = false;
  bool stop_after_tick_ = false;
  bool done_ = false;

  std::uint64_t seed() const { return seed_; }
};

}  // namespace

const char* to_string(ExitReason reason) {
  switch (reason) {
    case ExitReason::duration: return "duration";
    case ExitReason::power_exhausted: return "power_exhausted";
    case ExitReason::stopped: return "stopped";
    case ExitReason::fatal: return "fatal";
  }
  return "unknown";
}

RunSummary run_scenario(const Scenario& scenario, std::ostream& log, const RunOptions& options) {
  Simulation sim(scenario, log, options);
  return sim.run();
}

}  // namespace loco::harness
