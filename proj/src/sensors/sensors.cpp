#include "loco/sensors/sensors.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>

namespace loco::sensors {

namespace {
constexpr double kNearPlane = 0.05;
}

void NoiseSpec::validate() const {
  if (gyro_noise_std < 0.0 || accel_noise_std < 0.0 || pressure_noise_std < 0.0) {
    throw std::invalid_argument("noise standard deviations must be non-negative");
  }
  if (!(detection_dropout_prob >= 0.0 && detection_dropout_prob <= 1.0)) {
    throw std::invalid_argument("detection_dropout_prob must be in [0, 1]");
  }
  if (!gyro_bias.allFinite()) throw std::invalid_argument("gyro_bias must be finite");
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

double RngStream::gaussian(double stddev) {
  ++draws_;
  const double z = normal_(engine_);
  return stddev * z;
}

Vec3 RngStream::gaussian3(double stddev) {
  const double x = gaussian(stddev);
  const double y = gaussian(stddev);
  const double z = gaussian(stddev);
  return {x, y, z};
}

bool RngStream::bernoulli(double p) {
  ++draws_;
  return uniform_(engine_) < p;
}

Vec3 static_specific_force(const dynamics::RigidBodyState& state, double gravity) {
  return state.orientation.conjugate() * Vec3(0.0, 0.0, gravity);
}

ImuSample sample_imu(const dynamics::RigidBodyState& state, const Vec3& specific_force, const NoiseSpec& noise,
                     RngStream& rng) {
  ImuSample s;
  s.timestamp = state.time;
  // Draw unconditionally so the stream position does not depend on the noise level.
  const Vec3 gyro_noise = rng.gaussian3(noise.gyro_noise_std);
  const Vec3 accel_noise = rng.gaussian3(noise.accel_noise_std);
  s.angular_velocity = state.angular_velocity + noise.gyro_bias + gyro_noise;
  s.linear_acceleration = specific_force + accel_noise;
  return s;
}

ImuSample sample_imu(const dynamics::RigidBodyState& state, const NoiseSpec& noise, RngStream& rng) {
  return sample_imu(state, static_specific_force(state), noise, rng);
}

double pressure_at_depth(double depth, double fluid_density, double gravity, double atmospheric) {
  return atmospheric + fluid_density * gravity * depth;
}

PressureSample sample_pressure(const dynamics::RigidBodyState& state, double fluid_density, const NoiseSpec& noise,
                               RngStream& rng, double gravity) {
  PressureSample s;
  s.timestamp = state.time;
  s.pressure = pressure_at_depth(state.depth(), fluid_density, gravity) + rng.gaussian(noise.pressure_noise_std);
  return s;
}

double depth_from_pressure(const PressureSample& sample, double fluid_density, double gravity, double atmospheric) {
  if (!(fluid_density > 0.0)) throw std::invalid_argument("fluid_density must be positive");
  return (sample.pressure - atmospheric) / (fluid_density * gravity);
}

std::optional<Detection> project_diver(const dynamics::RigidBodyState& state, const DiverTarget& diver,
                                       const PinholeCamera& camera) {
  if (!(camera.focal_px > 0.0)) throw std::invalid_argument("camera focal_px must be positive");
  const Quat world_to_body = state.orientation.conjugate();
  const Vec3 rel_world = diver.position - state.position;

  // The diver is a vertical rectangle facing the camera: its horizontal
  // edge is perpendicular to the horizontal line of sight.
  Vec3 across(-rel_world.y(), rel_world.x(), 0.0);
  if (across.norm() < 1e-9) return std::nullopt;
  across.normalize();
  const Vec3 half_w = 0.5 * diver.width * across;
  const Vec3 half_h(0.0, 0.0, 0.5 * diver.height);

  const double cx = 0.5 * camera.image.width;
  const double cy = 0.5 * camera.image.height;
  double u_min = std::numeric_limits<double>::infinity();
  double u_max = -u_min;
  double v_min = u_min;
  double v_max = -u_min;
  const std::array<Vec3, 4> corners = {rel_world + half_w + half_h, rel_world + half_w - half_h,
                                       rel_world - half_w + half_h, rel_world - half_w - half_h};
  for (const Vec3& c : corners) {
    const Vec3 b = world_to_body * c;
    if (b.x() < kNearPlane) return std::nullopt;
    // Image u grows to the right (body -y), v grows downward (body -z).
    const double u = cx - camera.focal_px * b.y() / b.x();
    const double v = cy - camera.focal_px * b.z() / b.x();
    u_min = std::min(u_min, u);
    u_max = std::max(u_max, u);
    v_min = std::min(v_min, v);
    v_max = std::max(v_max, v);
  }

  u_min = std::clamp(u_min, 0.0, static_cast<double>(camera.image.width));
  u_max = std::clamp(u_max, 0.0, static_cast<double>(camera.image.width));
  v_min = std::clamp(v_min, 0.0, static_cast<double>(camera.image.height));
  v_max = std::clamp(v_max, 0.0, static_cast<double>(camera.image.height));
  if (!(u_max > u_min) || !(v_max > v_min)) return std::nullopt;

  Detection d;
  d.image_size = camera.image;
  d.timestamp = state.time;
  d.bbox.center_x = 0.5 * (u_min + u_max);
  d.bbox.center_y = 0.5 * (v_min + v_max);
  d.bbox.width = u_max - u_min;
  d.bbox.height = v_max - v_min;
  d.confidence = 1.0;
  return d;
}

std::optional<Detection> project_diver(const dynamics::RigidBodyState& state, const DiverTarget& diver,
                                       const PinholeCamera& camera, const NoiseSpec& noise, RngStream& rng) {
  const bool dropped = rng.bernoulli(noise.detection_dropout_prob);
  auto d = project_diver(state, diver, camera);
  if (dropped) return std::nullopt;
  return d;
}

}  // namespace loco::sensors
