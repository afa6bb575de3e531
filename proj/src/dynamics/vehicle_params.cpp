#include "loco/dynamics/vehicle_params.hpp"

#include "loco/dynamics/rigid_body.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <set>

namespace loco::dynamics {

ThrustCurve::ThrustCurve(std::vector<Knot> knots) {
  try {
    table_ = PiecewiseLinear(std::move(knots));
  } catch (const std::invalid_argument& e) {
    throw DomainError(std::string("thrust curve: ") + e.what());
  }
  if (!table_.non_decreasing()) throw DomainError("thrust curve must be non-decreasing");
  if (table_(0.0) != 0.0) throw DomainError("thrust curve must map pwm 0 to 0 N");
}

ThrustCurve ThrustCurve::symmetric(double deadband, const std::vector<Knot>& forward_knots) {
  if (!(deadband >= 0.0 && deadband < 1.0)) throw DomainError("thrust dead-band must be in [0, 1)");
  std::vector<Knot> knots;
  for (auto it = forward_knots.rbegin(); it != forward_knots.rend(); ++it) {
    if (it->x > deadband) knots.push_back({-it->x, -it->y});
  }
  if (deadband > 0.0) {
    knots.push_back({-deadband, 0.0});
    knots.push_back({deadband, 0.0});
  } else {
    knots.push_back({0.0, 0.0});
  }
  for (const Knot& k : forward_knots) {
    if (k.x > deadband) knots.push_back(k);
  }
  return ThrustCurve(std::move(knots));
}

double thrust_from_pwm(const ThrustCurve& curve, double pwm) {
  if (!(pwm >= -1.0 && pwm <= 1.0)) {
    throw DomainError("pwm " + std::to_string(pwm) + " outside [-1, 1]");
  }
  return curve.table()(pwm);
}

void VehicleParams::validate() const {
  if (!(mass > 0.0)) throw DomainError("mass must be positive");
  for (int i = 0; i < 3; ++i) {
    if (!(inertia_diag[i] > 0.0)) throw DomainError("inertia entries must be positive");
  }
  if (!(fluid_density > 0.0)) throw DomainError("fluid_density must be positive");
  if (!(displaced_volume >= 0.0)) throw DomainError("displaced_volume must be non-negative");
  if (!(gravity > 0.0)) throw DomainError("gravity must be positive");
  if (thrust_curve.table().empty()) throw DomainError("thrust curve missing");
  const Vec3 expected_axes[kThrusterCount] = {Vec3::UnitX(), Vec3::UnitX(), Vec3::UnitZ()};
  for (std::size_t i = 0; i < kThrusterCount; ++i) {
    if ((thrusters[i].axis - expected_axes[i]).norm() > 1e-9) {
      throw DomainError("thruster " + std::to_string(i) + " axis must be body " + (i < 2 ? "+x" : "+z"));
    }
  }
  const Vec3 drag_lin = drag.linear();
  const Vec3 drag_ang = drag.angular();
  if ((drag_lin.array() < 0.0).any() || (drag_ang.array() < 0.0).any()) {
    throw DomainError("drag coefficients must be non-negative");
  }
}

VehicleParams default_vehicle_params() {
  using namespace defaults;
  VehicleParams p;
  p.mass = kMass;
  // Uniform-density box over the hull envelope.
  const double l2 = kLength * kLength;
  const double w2 = kWidth * kWidth;
  const double h2 = kHeight * kHeight;
  p.inertia_diag = Vec3(kMass * (w2 + h2) / 12.0, kMass * (l2 + h2) / 12.0, kMass * (l2 + w2) / 12.0);
  p.fluid_density = 1000.0;
  p.displaced_volume = p.mass / p.fluid_density;
  p.com_offset = Vec3(0.0, 0.0, -kComDrop);

  p.thrusters[0] = {Vec3(kRearLongitudinalOffset, kRearLateralOffset, 0.0), Vec3::UnitX()};
  p.thrusters[1] = {Vec3(kRearLongitudinalOffset, -kRearLateralOffset, 0.0), Vec3::UnitX()};
  p.thrusters[2] = {Vec3(kVerticalLongitudinalOffset, 0.0, 0.0), Vec3::UnitZ()};

  p.thrust_curve = ThrustCurve::symmetric(
      kThrustDeadband, {{kThrustDeadband, 0.0}, {0.25, 3.0}, {0.5, 9.5}, {0.75, 16.5}, {1.0, kMaxForwardThrust}});

  const double surge = calibrate_drag(2.0 * kMaxForwardThrust, kMaxSpeed);
  p.drag.surge = surge;
  // Not measured on the vehicle: lateral and vertical are assumed twice surge,
  // yaw is sized for the target differential-thrust turn rate.
  p.drag.sway = 2.0 * surge;
  p.drag.heave = 2.0 * surge;
  const double max_yaw_torque = 2.0 * kRearLateralOffset * kMaxForwardThrust;
  p.drag.yaw = max_yaw_torque / (kMaxYawRate * kMaxYawRate);
  p.drag.roll = 3.0;
  p.drag.pitch = 3.0;
  return p;
}

namespace {

Vec3 read_vec3(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence() || n.size() != 3) throw DomainError(key + " must be a 3-element sequence");
  return {n[0].as<double>(), n[1].as<double>(), n[2].as<double>()};
}

std::vector<Knot> read_knots(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) throw DomainError(key + " must be a sequence of [pwm, newtons] pairs");
  std::vector<Knot> knots;
  for (const auto& k : n) {
    if (!k.IsSequence() || k.size() != 2) throw DomainError(key + " entries must be [pwm, newtons]");
    knots.push_back({k[0].as<double>(), k[1].as<double>()});
  }
  return knots;
}

void reject_unknown(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw DomainError("unknown key '" + key + "' in " + where);
  }
}

}  // namespace

VehicleParams vehicle_params_from_yaml(const YAML::Node& node, VehicleParams base) {
  if (!node || node.IsNull()) return base;
  if (!node.IsMap()) throw DomainError("vehicle parameters must be a mapping");
  reject_unknown(node,
                 {"mass", "inertia_diag", "displaced_volume", "com_offset", "fluid_density", "gravity", "thrusters",
                  "thrust_curve", "drag", "environment"},
                 "vehicle");
  VehicleParams p = std::move(base);
  try {
    if (node["mass"]) p.mass = node["mass"].as<double>();
    if (node["inertia_diag"]) p.inertia_diag = read_vec3(node["inertia_diag"], "inertia_diag");
    if (node["com_offset"]) p.com_offset = read_vec3(node["com_offset"], "com_offset");
    if (node["fluid_density"]) p.fluid_density = node["fluid_density"].as<double>();
    if (node["gravity"]) p.gravity = node["gravity"].as<double>();

    // Ballasted neutral unless a volume is given explicitly.
    if (node["displaced_volume"]) {
      p.displaced_volume = node["displaced_volume"].as<double>();
    } else if (node["mass"] || node["fluid_density"]) {
      p.displaced_volume = p.mass / p.fluid_density;
    }

    if (const auto t = node["thrusters"]) {
      reject_unknown(t, {"left", "right", "vertical"}, "thrusters");
      const char* names[kThrusterCount] = {"left", "right", "vertical"};
      for (std::size_t i = 0; i < kThrusterCount; ++i) {
        if (const auto m = t[names[i]]) {
          reject_unknown(m, {"position", "axis"}, std::string("thrusters.") + names[i]);
          if (m["position"]) p.thrusters[i].position = read_vec3(m["position"], "position");
          if (m["axis"]) p.thrusters[i].axis = read_vec3(m["axis"], "axis").normalized();
        }
      }
    }

    if (const auto c = node["thrust_curve"]) {
      reject_unknown(c, {"deadband", "forward", "knots"}, "thrust_curve");
      if (c["knots"]) {
        p.thrust_curve = ThrustCurve(read_knots(c["knots"], "thrust_curve.knots"));
      } else if (c["forward"]) {
        const double deadband = c["deadband"] ? c["deadband"].as<double>() : defaults::kThrustDeadband;
        p.thrust_curve = ThrustCurve::symmetric(deadband, read_knots(c["forward"], "thrust_curve.forward"));
      } else {
        throw DomainError("thrust_curve needs 'knots' or 'forward'");
      }
    }

    if (const auto d = node["drag"]) {
      reject_unknown(d, {"surge", "sway", "heave", "roll", "pitch", "yaw"}, "drag");
      if (d["surge"]) p.drag.surge = d["surge"].as<double>();
      if (d["sway"]) p.drag.sway = d["sway"].as<double>();
      if (d["heave"]) p.drag.heave = d["heave"].as<double>();
      if (d["roll"]) p.drag.roll = d["roll"].as<double>();
      if (d["pitch"]) p.drag.pitch = d["pitch"].as<double>();
      if (d["yaw"]) p.drag.yaw = d["yaw"].as<double>();
    }

    if (const auto e = node["environment"]) {
      reject_unknown(e, {"current"}, "environment");
      if (e["current"]) p.environment.current_world = read_vec3(e["current"], "environment.current");
    }
  } catch (const YAML::Exception& e) {
    throw DomainError(std::string("vehicle parameters: ") + e.what());
  }
  p.validate();
  return p;
}

VehicleParams load_vehicle_params(const std::string& path) {
  try {
    return vehicle_params_from_yaml(YAML::LoadFile(path));
  } catch (const YAML::Exception& e) {
    throw DomainError("cannot load " + path + ": " + e.what());
  }
}

}  // namespace loco::dynamics
