#include "loco/pilot/primitives.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace loco::pilot {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool in_unit(double v) { return std::isfinite(v) && v >= -1.0 && v <= 1.0; }

}  // namespace

const char* to_string(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::turn_to: return "turn_to";
    case PrimitiveKind::move_timed: return "move_timed";
    case PrimitiveKind::square: return "square";
    case PrimitiveKind::circle: return "circle";
    case PrimitiveKind::stop: return "stop";
  }
  return "unknown";
}

const char* to_string(PrimitiveStatus status) {
  switch (status) {
    case PrimitiveStatus::succeeded: return "succeeded";
    case PrimitiveStatus::failed: return "failed";
    case PrimitiveStatus::aborted: return "aborted";
    case PrimitiveStatus::cancelled: return "cancelled";
  }
  return "unknown";
}

PrimitiveKind primitive_kind_from_string(const std::string& name) {
  for (auto k : {PrimitiveKind::turn_to, PrimitiveKind::move_timed, PrimitiveKind::square, PrimitiveKind::circle,
                 PrimitiveKind::stop}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument(fmt::format("unknown primitive '{}'", name));
}

void PrimitiveRequest::validate() const {
  require(timeout > 0.0, "primitive timeout must be positive");
  require(tolerance > 0.0, "primitive tolerance must be positive");
  switch (kind) {
    case PrimitiveKind::turn_to:
      require(std::isfinite(target_yaw), "turn_to target must be finite");
      break;
    case PrimitiveKind::move_timed:
      require(duration > 0.0, "move_timed duration must be positive");
      require(in_unit(thrust_level), "move_timed thrust must be within [-1, 1]");
      break;
    case PrimitiveKind::square:
      require(side_duration > 0.0, "square side duration must be positive");
      require(in_unit(thrust_level), "square thrust must be within [-1, 1]");
      break;
    case PrimitiveKind::circle:
      require(duration > 0.0, "circle duration must be positive");
      require(in_unit(thrust_level), "circle thrust must be within [-1, 1]");
      require(in_unit(yaw_bias), "circle yaw bias must be within [-1, 1]");
      break;
    case PrimitiveKind::stop:
      break;
  }
}

PrimitiveRequest PrimitiveRequest::turn_to(double target_yaw, double timeout) {
  PrimitiveRequest r;
  r.kind = PrimitiveKind::turn_to;
  r.target_yaw = target_yaw;
  r.timeout = timeout;
  return r;
}

PrimitiveRequest PrimitiveRequest::move_timed(double duration, double thrust_level) {
  PrimitiveRequest r;
  r.kind = PrimitiveKind::move_timed;
  r.duration = duration;
  r.thrust_level = thrust_level;
  r.timeout = duration + 1.0;
  return r;
}

PrimitiveRequest PrimitiveRequest::square(double side_duration, double thrust_level) {
  PrimitiveRequest r;
  r.kind = PrimitiveKind::square;
  r.side_duration = side_duration;
  r.thrust_level = thrust_level;
  r.timeout = 4.0 * (side_duration + 30.0);
  return r;
}

PrimitiveRequest PrimitiveRequest::circle(double thrust_level, double yaw_bias, double duration) {
  PrimitiveRequest r;
  r.kind = PrimitiveKind::circle;
  r.thrust_level = thrust_level;
  r.yaw_bias = yaw_bias;
  r.duration = duration;
  r.timeout = duration + 1.0;
  return r;
}

PrimitiveRequest PrimitiveRequest::stop() { return PrimitiveRequest{}; }

void PilotConfig::validate() const {
  turn_gains.validate();
  require(hold_time >= 0.0, "hold_time must be non-negative");
  require(estimator_timeout > 0.0, "estimator_timeout must be positive");
  require(teleop_timeout > 0.0, "teleop_timeout must be positive");
  require(nominal_dt > 0.0, "nominal_dt must be positive");
  require(hold_drift > 0.0, "hold_drift must be positive");
  require(thruster_deadband >= 0.0 && thruster_deadband < 1.0, "thruster_deadband must be in [0, 1)");
}

Pilot::Pilot(PilotConfig config) : config_(config) { config_.validate(); }

void Pilot::request(const PrimitiveRequest& req, double now) {
  req.validate();
  if (req.kind == PrimitiveKind::stop) {
    cancel(now, "stop requested");
    PrimitiveResult r;
    r.kind = PrimitiveKind::stop;
    results_.push_back(r);
    return;
  }
  if (active_) {
    throw PilotBusy(fmt::format("primitive {} is active; {} rejected", to_string(active_->request.kind),
                                to_string(req.kind)));
  }
  Active a;
  a.request = req;
  a.start_time = now;
  a.last_tick = now;
  a.last_estimate_time = now;
  a.phase_start = now;
  a.phase = req.kind == PrimitiveKind::turn_to ? Phase::turning
            : req.kind == PrimitiveKind::circle ? Phase::circling
                                                : Phase::moving;
  a.heading_target = req.target_yaw;
  a.result.kind = req.kind;
  active_ = a;
}

void Pilot::cancel(double now, const std::string& reason) {
  if (active_) finish(PrimitiveStatus::cancelled, now, reason);
}

void Pilot::teleop(const Command& cmd, double now) {
  teleop_ = cmd;
  teleop_time_ = now;
}

std::optional<PrimitiveKind> Pilot::active_kind() const {
  if (!active_) return std::nullopt;
  return active_->request.kind;
}

std::optional<PrimitiveResult> Pilot::take_result() {
  if (results_.empty()) return std::nullopt;
  PrimitiveResult r = results_.front();
  results_.pop_front();
  return r;
}

Command Pilot::tick(const PilotInput& input) {
  const Command cmd = active_ ? primitive_tick(*active_, input) : teleop_tick(input.time);
  return cmd.stamped(input.time);
}

Command Pilot::teleop_tick(double now) const {
  if (teleop_ && now - teleop_time_ <= config_.teleop_timeout) return *teleop_;
  return Command{};
}

void Pilot::finish(PrimitiveStatus status, double now, const std::string& reason) {
  PrimitiveResult r = active_->result;
  r.status = status;
  r.elapsed = now - active_->start_time;
  r.reason = reason;
  results_.push_back(r);
  active_.reset();
}

void Pilot::begin_turn(Active& a, double target, double now) {
  a.phase = Phase::turning;
  a.phase_start = now;
  a.heading_target = wrap_angle(target);
  a.first_tick = true;
  a.hold_since.reset();
  a.pid = PidState{};
}

double Pilot::heading_command(Active& a, double dt) {
  const double error = wrap_angle(a.heading_target - *a.yaw);
  a.result.final_error = error;
  return pid_step(config_.turn_gains, error / kPi, dt, a.pid);
}

std::optional<Command> Pilot::turn_tick(Active& a, double now, double dt) {
  const double error = wrap_angle(a.heading_target - *a.yaw);
  a.result.final_error = error;
  const bool inside = std::abs(error) < a.request.tolerance;
  if (a.first_tick) {
    a.first_tick = false;
    if (inside) return std::nullopt;
  }
  if (inside) {
    if (!a.hold_since) {
      a.hold_since = now;
      a.hold_error = error;
    }
    if (now - *a.hold_since >= config_.hold_time) {
      if (std::abs(error - a.hold_error) <= config_.hold_drift) return std::nullopt;
      // Still rotating: restart the hold window.
      a.hold_since = now;
      a.hold_error = error;
    }
  } else {
    a.hold_since.reset();
  }
  // Pure rotation: lift the command past the thruster dead-band so small
  // corrections still produce torque.
  const double u = heading_command(a, dt);
  const double db = config_.thruster_deadband;
  const double lifted = std::abs(u) < 1e-3 ? 0.0 : std::copysign(db + (1.0 - db) * std::abs(u), u);
  return Command(0.0, 0.0, lifted);
}

Command Pilot::primitive_tick(Active& a, const PilotInput& in) {
  const double now = in.time;
  if (in.yaw) {
    a.yaw = wrap_angle(*in.yaw);
    a.last_estimate_time = now;
    if (!a.initial_yaw) a.initial_yaw = a.yaw;
  }
  if (in.truth) {
    if (!a.result.start_position) a.result.start_position = in.truth->position;
    a.result.end_position = in.truth->position;
  }
  double dt = now - a.last_tick;
  if (!(dt > 0.0)) dt = config_.nominal_dt;
  a.last_tick = now;
  const double elapsed = now - a.start_time;
  const PrimitiveRequest& req = a.request;

  const bool needs_estimate = req.kind == PrimitiveKind::turn_to || req.kind == PrimitiveKind::square;
  if (needs_estimate && now - a.last_estimate_time > config_.estimator_timeout) {
    finish(PrimitiveStatus::aborted, now, "estimator silent");
    return Command{};
  }
  if (elapsed > req.timeout) {
    finish(PrimitiveStatus::failed, now, "timeout");
    return Command{};
  }

  switch (req.kind) {
    case PrimitiveKind::turn_to: {
      if (!a.yaw) return Command{};
      const auto cmd = turn_tick(a, now, dt);
      if (cmd) return *cmd;
      finish(PrimitiveStatus::succeeded, now, "within tolerance");
      return Command{};
    }
    case PrimitiveKind::move_timed: {
      if (elapsed >= req.duration) {
        finish(PrimitiveStatus::succeeded, now, "duration elapsed");
        return Command{};
      }
      if (a.yaw && !a.heading_hold) {
        a.heading_hold = true;
        a.heading_target = *a.yaw;
      }
      return Command(req.thrust_level, 0.0, a.heading_hold && a.yaw ? heading_command(a, dt) : 0.0);
    }
    case PrimitiveKind::square: {
      if (!a.initial_yaw) return Command{};
      if (!a.heading_hold) {
        a.heading_hold = true;
        a.heading_target = *a.initial_yaw;
        a.phase_start = now;
      }
      if (a.phase == Phase::moving) {
        if (now - a.phase_start < req.side_duration) {
          return Command(req.thrust_level, 0.0, heading_command(a, dt));
        }
        a.corner_start_yaw = *a.yaw;
        begin_turn(a, *a.initial_yaw + (a.corner + 1) * (kPi / 2.0), now);
      }
      const auto cmd = turn_tick(a, now, dt);
      if (cmd) return *cmd;
      a.result.corner_turns.push_back(wrap_angle(*a.yaw - a.corner_start_yaw));
      ++a.corner;
      if (a.corner == 4) {
        a.result.final_error = wrap_angle(*a.yaw - *a.initial_yaw);
        finish(PrimitiveStatus::succeeded, now, "four corners");
        return Command{};
      }
      a.phase = Phase::moving;
      a.phase_start = now;
      a.pid = PidState{};
      return Command(req.thrust_level, 0.0, 0.0);
    }
    case PrimitiveKind::circle: {
      if (in.truth && elapsed >= req.duration / 2.0) {
        const auto& s = *in.truth;
        const Vec3 v_world = s.orientation * s.linear_velocity;
        a.speed_sum += v_world.head<2>().norm();
        a.rate_sum += (s.orientation * s.angular_velocity).z();
        ++a.rate_samples;
      }
      if (elapsed >= req.duration) {
        if (a.rate_samples > 0) {
          const double speed = a.speed_sum / a.rate_samples;
          const double rate = a.rate_sum / a.rate_samples;
          a.result.mean_yaw_rate = rate;
          a.result.mean_radius =
              std::abs(rate) > 1e-9 ? speed / std::abs(rate) : std::numeric_limits<double>::infinity();
        }
        finish(PrimitiveStatus::succeeded, now, "duration elapsed");
        return Command{};
      }
      return Command(req.thrust_level, 0.0, req.yaw_bias);
    }
    case PrimitiveKind::stop:
      break;
  }
  return Command{};
}

}  // namespace loco::pilot
