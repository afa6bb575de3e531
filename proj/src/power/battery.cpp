#include "loco/power/battery.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <set>
#include <stdexcept>

namespace loco::power {

namespace {

constexpr double kSecondsPerHour = 3600.0;

// Charge at which a pack's voltage reaches the alarm threshold.
double alarm_charge(const BatteryPack& pack, double alarm_voltage) {
  return pack.capacity * (alarm_voltage - pack.voltage_empty) / (pack.voltage_full - pack.voltage_empty);
}

}  // namespace

void BatteryPack::validate() const {
  if (!(capacity > 0.0)) throw std::invalid_argument("battery capacity must be positive");
  if (!(charge >= 0.0 && charge <= capacity)) throw std::invalid_argument("battery charge must be within [0, capacity]");
  if (!(voltage_empty < voltage_full)) throw std::invalid_argument("battery voltage_empty must be below voltage_full");
}

double voltage_of_charge(const BatteryPack& pack) {
  return pack.voltage_empty + (pack.voltage_full - pack.voltage_empty) * pack.fraction();
}

const char* to_string(ComputeLoad load) {
  switch (load) {
    case ComputeLoad::idle: return "idle";
    case ComputeLoad::average: return "average";
    case ComputeLoad::max: return "max";
  }
  return "unknown";
}

ComputeLoad compute_load_from_string(const std::string& name) {
  for (auto l : {ComputeLoad::idle, ComputeLoad::average, ComputeLoad::max}) {
    if (name == to_string(l)) return l;
  }
  throw std::invalid_argument(fmt::format("unknown compute load '{}'", name));
}

void PowerParams::validate() const {
  for (double d : compute_draw) {
    if (!(d >= 0.0)) throw std::invalid_argument("compute draw must be non-negative");
  }
  if (thruster_draw.empty()) throw std::invalid_argument("thruster draw curve missing");
  if (!thruster_draw.non_decreasing() || thruster_draw(0.0) != 0.0) {
    throw std::invalid_argument("thruster draw curve must start at 0 A and be non-decreasing");
  }
  if (!(load_share[0] >= 0.0 && load_share[1] >= 0.0 && std::abs(load_share[0] + load_share[1] - 1.0) < 1e-9)) {
    throw std::invalid_argument("tube load shares must be non-negative and sum to 1");
  }
}

PowerParams default_power_params() {
  PowerParams p;
  p.thruster_draw = PiecewiseLinear({{0.0, 0.0},
                                     {0.06, 0.0},
                                     {0.25, 1.6},
                                     {0.5, defaults::kThrusterDrawHalf},
                                     {0.75, 12.0},
                                     {1.0, defaults::kThrusterDrawFull}});
  return p;
}

PowerParams power_params_from_yaml(const YAML::Node& node, PowerParams base) {
  if (!node.IsMap()) throw std::invalid_argument("power parameters must be a mapping");
  static const std::set<std::string> allowed{"compute_draw", "thruster_draw", "load_share", "alarm_voltage"};
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw std::invalid_argument(fmt::format("unknown key '{}' in power", key));
  }
  if (const auto c = node["compute_draw"]) {
    for (auto l : {ComputeLoad::idle, ComputeLoad::average, ComputeLoad::max}) {
      if (c[to_string(l)]) base.compute_draw[static_cast<std::size_t>(l)] = c[to_string(l)].as<double>();
    }
  }
  if (const auto t = node["thruster_draw"]) {
    std::vector<Knot> knots;
    for (const auto& k : t) {
      if (!k.IsSequence() || k.size() != 2) throw std::invalid_argument("power.thruster_draw entries must be [pwm, amps]");
      knots.push_back({k[0].as<double>(), k[1].as<double>()});
    }
    base.thruster_draw = PiecewiseLinear(std::move(knots));
  }
  if (const auto s = node["load_share"]) {
    if (!s.IsSequence() || s.size() != 2) throw std::invalid_argument("power.load_share must be [left, right]");
    base.load_share = {s[0].as<double>(), s[1].as<double>()};
  }
  if (node["alarm_voltage"]) base.alarm_voltage = node["alarm_voltage"].as<double>();
  base.validate();
  return base;
}

double PowerState::min_voltage() const {
  return std::min(voltage_of_charge(packs[0]), voltage_of_charge(packs[1]));
}

double total_current(const PowerParams& params, const dynamics::ThrusterSet& thrusters, ComputeLoad load) {
  double amps = params.compute(load);
  for (double pwm : thrusters.values()) amps += params.thruster_draw(std::abs(pwm));
  return amps;
}

PowerState drain_step(const PowerState& state, const PowerParams& params, const dynamics::ThrusterSet& thrusters,
                      ComputeLoad load, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("drain_step: dt must be positive");
  PowerState out = state;
  const double end = state.elapsed + dt;
  if (!state.powered) {
    out.elapsed = end;
    out.last_current = 0.0;
    return out;
  }
  const double current = total_current(params, thrusters, load);
  out.last_current = current;

  // Advance event to event: a pack reaching the alarm charge or emptying.
  while (out.elapsed < end) {
    std::array<double, 2> rate{0.0, 0.0};  // Ah per second
    double active_share = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      if (out.packs[i].charge > 0.0) active_share += params.load_share[i];
    }
    if (active_share <= 0.0) {
      // Every pack with a nonzero share is empty.
      out.powered = false;
      if (!out.exhausted_time) out.exhausted_time = out.elapsed;
      break;
    }
    if (current <= 0.0) break;
    for (std::size_t i = 0; i < 2; ++i) {
      if (out.packs[i].charge > 0.0) rate[i] = current * params.load_share[i] / active_share / kSecondsPerHour;
    }
    double span = end - out.elapsed;
    int event_pack = -1;
    bool event_is_empty = false;
    for (std::size_t i = 0; i < 2; ++i) {
      if (rate[i] <= 0.0) continue;
      const double to_empty = out.packs[i].charge / rate[i];
      if (to_empty <= span) {
        span = to_empty;
        event_pack = static_cast<int>(i);
        event_is_empty = true;
      }
      const double threshold = alarm_charge(out.packs[i], params.alarm_voltage);
      if (!out.alarm_active && out.packs[i].charge > threshold && threshold > 0.0) {
        const double to_alarm = (out.packs[i].charge - threshold) / rate[i];
        if (to_alarm < span) {
          span = to_alarm;
          event_pack = static_cast<int>(i);
          event_is_empty = false;
        }
      }
    }
    for (std::size_t i = 0; i < 2; ++i) {
      out.packs[i].charge = std::max(out.packs[i].charge - rate[i] * span, 0.0);
    }
    out.elapsed += span;
    if (event_pack >= 0) {
      auto& pack = out.packs[static_cast<std::size_t>(event_pack)];
      if (event_is_empty) {
        pack.charge = 0.0;
      } else {
        pack.charge = alarm_charge(pack, params.alarm_voltage);
      }
    }
    if (!out.alarm_active && out.min_voltage() <= params.alarm_voltage) {
      out.alarm_active = true;
      out.alarm_time = out.elapsed;
    }
    if (event_pack < 0) break;
  }
  if (out.powered && out.total_charge() <= 0.0) {
    out.powered = false;
    if (!out.exhausted_time) out.exhausted_time = out.elapsed;
  }
  out.elapsed = end;
  return out;
}

PowerState reset_alarm(PowerState state) {
  state.alarm_active = false;
  state.alarm_time.reset();
  return state;
}

}  // namespace loco::power
