#pragma once

#include "loco/dynamics/types.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace loco::sensors {

inline constexpr double kAtmosphericPressure = 101325.0;

struct ImuSample {
  Vec3 angular_velocity = Vec3::Zero();     // rad/s, body frame
  Vec3 linear_acceleration = Vec3::Zero();  // specific force, m/s^2, body frame
  double timestamp = 0.0;
};

struct PressureSample {
  double pressure = kAtmosphericPressure;  // Pa, absolute
  double timestamp = 0.0;
};

struct BoundingBox {
  double center_x = 0.0;
  double center_y = 0.0;
  double width = 0.0;
  double height = 0.0;

  double area() const { return width * height; }
};

struct ImageSize {
  int width = 800;
  int height = 600;

  double area() const { return static_cast<double>(width) * height; }
};

struct Detection {
  BoundingBox bbox;
  ImageSize image_size;
  double confidence = 1.0;
  double timestamp = 0.0;

  double area_fraction() const { return bbox.area() / image_size.area(); }
};

struct NoiseSpec {
  double gyro_noise_std = 0.0;
  Vec3 gyro_bias = Vec3::Zero();
  double accel_noise_std = 0.0;
  double pressure_noise_std = 0.0;
  double detection_dropout_prob = 0.0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on negative std or dropout outside [0, 1].
  void validate() const;
};

// Forward-looking pinhole camera at the body origin, optical axis along body +x.
struct PinholeCamera {
  double focal_px = 400.0;
  ImageSize image;
};

struct DiverTarget {
  Vec3 position = Vec3::Zero();  // world frame, centre of the diver
  double height = 1.7;
  double width = 0.6;
};

struct SensorRates {
  double imu_hz = 100.0;
  double pressure_hz = 10.0;
  double detection_hz = 10.0;
};

// Independent, seeded random stream. Two streams built from the same
// (seed, stream id) produce the same draws.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  double gaussian(double stddev);
  Vec3 gaussian3(double stddev);
  bool bernoulli(double p);
  std::uint64_t draws() const { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::uint64_t draws_ = 0;
};

/// Specific force an accelerometer reads when the vehicle is not accelerating.
Vec3 static_specific_force(const dynamics::RigidBodyState& state, double gravity = kStandardGravity);

ImuSample sample_imu(const dynamics::RigidBodyState& state, const Vec3& specific_force, const NoiseSpec& noise,
                     RngStream& rng);
ImuSample sample_imu(const dynamics::RigidBodyState& state, const NoiseSpec& noise, RngStream& rng);

double pressure_at_depth(double depth, double fluid_density, double gravity = kStandardGravity,
                         double atmospheric = kAtmosphericPressure);
PressureSample sample_pressure(const dynamics::RigidBodyState& state, double fluid_density, const NoiseSpec& noise,
                               RngStream& rng, double gravity = kStandardGravity);
double depth_from_pressure(const PressureSample& sample, double fluid_density, double gravity = kStandardGravity,
                           double atmospheric = kAtmosphericPressure);

/// Noise-free projection; nullopt when the diver is behind the camera or off-image.
std::optional<Detection> project_diver(const dynamics::RigidBodyState& state, const DiverTarget& diver,
                                       const PinholeCamera& camera);
/// As above, with detector dropout drawn from `rng`.
std::optional<Detection> project_diver(const dynamics::RigidBodyState& state, const DiverTarget& diver,
                                       const PinholeCamera& camera, const NoiseSpec& noise, RngStream& rng);

}  // namespace loco::sensors
