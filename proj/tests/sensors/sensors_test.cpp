#include "loco/sensors/sensors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace loco;
using namespace loco::sensors;
using loco::dynamics::RigidBodyState;

namespace {

const PinholeCamera kCamera{400.0, {800, 600}};

DiverTarget diver_at(const Vec3& p) {
  DiverTarget d;
  d.position = p;
  return d;
}

}  // namespace

TEST(Imu, LevelAtRestReadsGravityReaction) {
  RngStream rng(1, 0);
  const auto s = sample_imu(RigidBodyState{}, NoiseSpec{}, rng);
  EXPECT_NEAR((s.angular_velocity - Vec3::Zero()).norm(), 0.0, 1e-15);
  EXPECT_NEAR((s.linear_acceleration - Vec3(0.0, 0.0, kStandardGravity)).norm(), 0.0, 1e-12);
}

TEST(Imu, QuarterTurnAboutBodyYPutsGravityOnMinusX) {
  RngStream rng(1, 0);
  RigidBodyState s;
  // +90 deg about body +y (left): the nose points down.
  s.orientation = Quat(Eigen::AngleAxisd(kPi / 2.0, Vec3::UnitY()));
  const auto imu = sample_imu(s, NoiseSpec{}, rng);
  EXPECT_NEAR(imu.linear_acceleration.x(), -kStandardGravity, 1e-12);
  EXPECT_NEAR(imu.linear_acceleration.y(), 0.0, 1e-12);
  EXPECT_NEAR(imu.linear_acceleration.z(), 0.0, 1e-12);
}

TEST(Imu, NoseUpPutsGravityReactionOnPlusX) {
  RngStream rng(1, 0);
  RigidBodyState s;
  s.orientation = quat_from_attitude(0.0, kPi / 2.0, 0.0);
  const auto imu = sample_imu(s, NoiseSpec{}, rng);
  EXPECT_NEAR(imu.linear_acceleration.x(), kStandardGravity, 1e-12);
  EXPECT_NEAR(imu.linear_acceleration.norm(), kStandardGravity, 1e-12);
}

TEST(Imu, YawRatePassesThrough) {
  RngStream rng(1, 0);
  RigidBodyState s;
  s.angular_velocity = Vec3(0.0, 0.0, 0.1);
  const auto imu = sample_imu(s, NoiseSpec{}, rng);
  EXPECT_EQ(imu.angular_velocity, Vec3(0.0, 0.0, 0.1));
}

TEST(Imu, BiasAndNoiseStatistics) {
  NoiseSpec noise;
  noise.gyro_noise_std = 0.01;
  noise.gyro_bias = Vec3(0.02, -0.01, 0.0);
  RngStream rng(5, 0);
  Vec3 mean = Vec3::Zero();
  const int n = 20000;
  for (int i = 0; i < n; ++i) mean += sample_imu(RigidBodyState{}, noise, rng).angular_velocity;
  mean /= n;
  EXPECT_NEAR(mean.x(), 0.02, 5 * 0.01 / std::sqrt(n));
  EXPECT_NEAR(mean.y(), -0.01, 5 * 0.01 / std::sqrt(n));
}

TEST(Pressure, SurfaceIsZeroDepth) {
  EXPECT_DOUBLE_EQ(depth_from_pressure({101325.0, 0.0}, 1000.0), 0.0);
}

TEST(Pressure, HydrostaticTenMetres) {
  // 101325 + 1000 * 9.80665 * 10
  EXPECT_DOUBLE_EQ(pressure_at_depth(10.0, 1000.0), 199391.5);
  EXPECT_NEAR(depth_from_pressure({199391.5, 0.0}, 1000.0), 10.0, 1e-12);
}

TEST(Pressure, SeawaterHundredMetresWithinNoise) {
  NoiseSpec noise;
  noise.pressure_noise_std = 50.0;
  RngStream rng(9, 1);
  RigidBodyState s;
  s.position.z() = -100.0;
  const double bound = 4.0 * noise.pressure_noise_std / (1025.0 * kStandardGravity);
  for (int i = 0; i < 1000; ++i) {
    const auto p = sample_pressure(s, 1025.0, noise, rng);
    ASSERT_NEAR(depth_from_pressure(p, 1025.0), 100.0, bound);
  }
}

TEST(Pressure, NoiseFreeRoundTripIsIdentityOnDepth) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> depth(0.0, 100.0);
  std::uniform_real_distribution<double> density(990.0, 1030.0);
  RngStream rng(0, 0);
  for (int i = 0; i < 1000; ++i) {
    RigidBodyState s;
    s.position.z() = -depth(gen);
    const double rho = density(gen);
    const auto p = sample_pressure(s, rho, NoiseSpec{}, rng);
    ASSERT_NEAR(depth_from_pressure(p, rho), s.depth(), 1e-9);
  }
}

TEST(ProjectDiver, DeadAheadThreeMetres) {
  const auto d = project_diver(RigidBodyState{}, diver_at({3.0, 0.0, 0.0}), kCamera);
  ASSERT_TRUE(d.has_value());
  EXPECT_NEAR(d->bbox.center_x, 400.0, 1e-9);
  EXPECT_NEAR(d->bbox.center_y, 300.0, 1e-9);
  EXPECT_NEAR(d->bbox.width, 400.0 * 0.6 / 3.0, 1e-9);
  EXPECT_NEAR(d->bbox.height, 400.0 * 1.7 / 3.0, 1e-9);
}

TEST(ProjectDiver, HalfDistanceDoublesWidth) {
  const auto d = project_diver(RigidBodyState{}, diver_at({1.5, 0.0, 0.0}), kCamera);
  ASSERT_TRUE(d.has_value());
  EXPECT_NEAR(d->bbox.width, 160.0, 1e-9);
}

TEST(ProjectDiver, BehindIsCulled) {
  EXPECT_FALSE(project_diver(RigidBodyState{}, diver_at({-3.0, 0.0, 0.0}), kCamera).has_value());
}

TEST(ProjectDiver, DiverToTheLeftAppearsLeftOfCentre) {
  const auto d = project_diver(RigidBodyState{}, diver_at({3.0, 0.5, 0.0}), kCamera);
  ASSERT_TRUE(d.has_value());
  EXPECT_LT(d->bbox.center_x, 400.0);
}

TEST(ProjectDiver, ClippedToImageBounds) {
  const auto d = project_diver(RigidBodyState{}, diver_at({0.6, 0.0, 0.0}), kCamera);
  ASSERT_TRUE(d.has_value());
  EXPECT_GE(d->bbox.center_y - d->bbox.height / 2.0, 0.0);
  EXPECT_LE(d->bbox.center_y + d->bbox.height / 2.0, 600.0);
  EXPECT_GT(d->bbox.width, 0.0);
}

TEST(ProjectDiver, WidthStrictlyDecreasesWithDistance) {
  double previous = std::numeric_limits<double>::infinity();
  const Vec3 bearing = Vec3(1.0, 0.3, -0.1).normalized();
  for (double dist = 1.5; dist < 20.0; dist += 0.25) {
    const auto d = project_diver(RigidBodyState{}, diver_at(dist * bearing), kCamera);
    ASSERT_TRUE(d.has_value());
    ASSERT_LT(d->bbox.width, previous);
    previous = d->bbox.width;
  }
}

TEST(ProjectDiver, DropoutFires) {
  NoiseSpec noise;
  noise.detection_dropout_prob = 1.0;
  RngStream rng(2, 2);
  EXPECT_FALSE(project_diver(RigidBodyState{}, diver_at({3.0, 0.0, 0.0}), kCamera, noise, rng).has_value());
  noise.detection_dropout_prob = 0.0;
  EXPECT_TRUE(project_diver(RigidBodyState{}, diver_at({3.0, 0.0, 0.0}), kCamera, noise, rng).has_value());
}

TEST(RngStream, FixedSeedGivesIdenticalStreams) {
  NoiseSpec noise;
  noise.gyro_noise_std = 0.1;
  noise.accel_noise_std = 0.2;
  RngStream a(123, 4);
  RngStream b(123, 4);
  RngStream c(123, 5);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto sa = sample_imu(RigidBodyState{}, noise, a);
    const auto sb = sample_imu(RigidBodyState{}, noise, b);
    const auto sc = sample_imu(RigidBodyState{}, noise, c);
    ASSERT_EQ(sa.angular_velocity, sb.angular_velocity);
    ASSERT_EQ(sa.linear_acceleration, sb.linear_acceleration);
    differs = differs || sa.angular_velocity != sc.angular_velocity;
  }
  EXPECT_TRUE(differs);
}

TEST(NoiseSpec, Validation) {
  NoiseSpec n;
  EXPECT_NO_THROW(n.validate());
  n.gyro_noise_std = -1.0;
  EXPECT_THROW(n.validate(), std::invalid_argument);
  n = NoiseSpec{};
  n.detection_dropout_prob = 1.5;
  EXPECT_THROW(n.validate(), std::invalid_argument);
}
