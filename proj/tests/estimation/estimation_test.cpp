#include "loco/dynamics/rigid_body.hpp"
#include "loco/estimation/attitude_ekf.hpp"
#include "loco/estimation/odometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace loco;
using namespace loco::estimation;
using loco::dynamics::RigidBodyState;
using loco::dynamics::ThrusterSet;
using loco::sensors::ImuSample;

namespace {

ImuSample imu(const Vec3& gyro, const Vec3& accel, double t) {
  ImuSample s;
  s.angular_velocity = gyro;
  s.linear_acceleration = accel;
  s.timestamp = t;
  return s;
}

const Vec3 kLevelAccel(0.0, 0.0, kStandardGravity);

// Yaw sweep with an overlaid pitch nod, as raw thruster commands.
ThrusterSet maneuver(double t) {
  const double yaw = (std::fmod(t, 8.0) < 4.0) ? 0.6 : -0.6;
  const double pitch = (std::fmod(t, 2.0) < 1.0) ? 0.5 : -0.5;
  const double thrust = 0.3;
  return ThrusterSet(thrust - yaw, thrust + yaw, pitch);
}

struct TrackingStats {
  double max_error = 0.0;
  double rms_tilt = 0.0;
  bool psd = true;
};

TrackingStats track(const sensors::NoiseSpec& noise, double duration, std::uint64_t seed = 1) {
  const auto params = dynamics::default_vehicle_params();
  const double dt = 0.01;
  RigidBodyState truth;
  EkfTuning tuning;
  auto est = initial_estimate(truth.orientation, tuning);
  sensors::RngStream rng(seed, 0);
  MotionModel model;
  TrackingStats stats;
  double tilt_sq = 0.0;
  const int steps = static_cast<int>(duration / dt);
  for (int i = 0; i < steps; ++i) {
    const ThrusterSet u = maneuver(truth.time);
    const auto result = dynamics::step_detailed(truth, params, u, dt);
    truth = result.state;
    const auto sample = sensors::sample_imu(truth, result.specific_force, noise, rng);
    est = ekf_predict(est, sample, dt, tuning);
    model.propagate(u, params, sample.angular_velocity - est.gyro_bias, dt);
    est = ekf_update_accel(est, sample, tuning, model.linear_acceleration()).estimate;
    stats.max_error = std::max(stats.max_error, attitude_error(est.orientation, truth.orientation));
    const double tilt = tilt_error(est.orientation, truth.orientation);
    tilt_sq += tilt * tilt;
    stats.psd = stats.psd && is_symmetric_psd(est.covariance, 1e-9);
  }
  stats.rms_tilt = std::sqrt(tilt_sq / steps);
  return stats;
}

}  // namespace

TEST(EkfPredict, ZeroRateKeepsOrientationAndGrowsCovariance) {
  const auto est = initial_estimate(Quat::Identity());
  const auto next = ekf_predict(est, imu(Vec3::Zero(), kLevelAccel, 0.01), 0.01);
  EXPECT_NEAR(attitude_error(next.orientation, est.orientation), 0.0, 1e-15);
  EXPECT_GT(next.covariance.trace(), est.covariance.trace());
  EXPECT_TRUE(is_symmetric_psd(next.covariance, 1e-12));
}

TEST(EkfPredict, ConstantYawRateIntegratesExactly) {
  auto est = initial_estimate(Quat::Identity());
  for (int i = 1; i <= 1000; ++i) est = ekf_predict(est, imu({0.0, 0.0, 0.1}, kLevelAccel, i * 0.01), 0.01);
  EXPECT_NEAR(est.attitude().yaw, 1.0, 1e-6);
}

TEST(EkfPredict, BiasCancelsInput) {
  auto est = initial_estimate(Quat::Identity());
  est.gyro_bias = Vec3(0.0, 0.0, 0.1);
  for (int i = 1; i <= 100; ++i) est = ekf_predict(est, imu({0.0, 0.0, 0.1}, kLevelAccel, i * 0.01), 0.01);
  EXPECT_NEAR(attitude_error(est.orientation, Quat::Identity()), 0.0, 1e-12);
}

TEST(EkfPredict, RejectsNonPositiveDt) {
  const auto est = initial_estimate(Quat::Identity());
  EXPECT_THROW(ekf_predict(est, imu(Vec3::Zero(), kLevelAccel, 0.0), 0.0), std::invalid_argument);
}

TEST(EkfPredict, NonFiniteCovarianceIsDivergence) {
  auto est = initial_estimate(Quat::Identity());
  est.covariance(0, 0) = std::nan("");
  EXPECT_THROW(ekf_predict(est, imu(Vec3::Zero(), kLevelAccel, 0.01), 0.01), FilterDivergence);
}

TEST(EkfUpdate, ConsistentMeasurementLeavesEstimate) {
  const auto est = initial_estimate(Quat::Identity());
  const auto out = ekf_update_accel(est, imu(Vec3::Zero(), kLevelAccel, 0.0));
  EXPECT_FALSE(out.gated);
  EXPECT_NEAR(attitude_error(out.estimate.orientation, Quat::Identity()), 0.0, 1e-15);
  // Covariance does not grow in the measured (roll/pitch) subspace.
  EXPECT_LE(out.estimate.covariance(0, 0), est.covariance(0, 0));
  EXPECT_LE(out.estimate.covariance(1, 1), est.covariance(1, 1));
}

TEST(EkfUpdate, RollErrorConvergesWithinFiveSeconds) {
  const Quat truth = Quat::Identity();
  auto est = initial_estimate(quat_from_attitude(deg2rad(10.0), 0.0, 0.0));
  est.covariance.topLeftCorner<3, 3>().diagonal().setConstant(std::pow(deg2rad(10.0), 2));
  const Vec3 accel = sensors::static_specific_force(RigidBodyState{});
  for (int i = 1; i <= 500; ++i) {
    const auto sample = imu(Vec3::Zero(), accel, i * 0.01);
    est = ekf_predict(est, sample, 0.01);
    est = ekf_update_accel(est, sample).estimate;
  }
  EXPECT_LT(rad2deg(std::abs(est.attitude().roll)), 0.5);
  EXPECT_LT(rad2deg(tilt_error(est.orientation, truth)), 0.5);
}

TEST(EkfUpdate, YawIsNotCorrected) {
  auto est = initial_estimate(quat_from_attitude(0.0, 0.0, 0.7));
  const auto out = ekf_update_accel(est, imu(Vec3::Zero(), kLevelAccel, 0.0));
  EXPECT_NEAR(out.estimate.attitude().yaw, 0.7, 1e-9);
}

TEST(EkfUpdate, LargeAccelIsGated) {
  const auto est = initial_estimate(quat_from_attitude(0.1, 0.0, 0.0));
  const auto out = ekf_update_accel(est, imu(Vec3::Zero(), {0.0, 0.0, 3.0 * kStandardGravity}, 0.0));
  EXPECT_TRUE(out.gated);
  EXPECT_EQ(out.estimate.orientation.coeffs(), est.orientation.coeffs());
  EXPECT_EQ(out.estimate.covariance, est.covariance);
}

TEST(EkfProperties, CovarianceStaysPsdUnderRandomInterleavings) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> rate(-2.0, 2.0);
  std::uniform_real_distribution<double> acc(-12.0, 12.0);
  std::uniform_real_distribution<double> dt(0.001, 0.05);
  std::bernoulli_distribution do_update(0.5);
  auto est = initial_estimate(Quat::Identity());
  double t = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double h = dt(rng);
    t += h;
    const auto sample = imu({rate(rng), rate(rng), rate(rng)}, {acc(rng), acc(rng), acc(rng)}, t);
    if (do_update(rng)) {
      est = ekf_update_accel(est, sample).estimate;
    } else {
      est = ekf_predict(est, sample, h);
    }
    ASSERT_TRUE(is_symmetric_psd(est.covariance, 1e-9)) << "iteration " << i;
    ASSERT_NEAR(est.orientation.norm(), 1.0, 1e-12);
  }
}

TEST(EkfProperties, RollPitchBiasIsObservable) {
  const Vec3 bias(0.01, 0.01, 0.0);
  auto est = initial_estimate(Quat::Identity());
  const Vec3 accel = sensors::static_specific_force(RigidBodyState{});
  for (int i = 1; i <= 12000; ++i) {
    const auto sample = imu(bias, accel, i * 0.01);
    est = ekf_predict(est, sample, 0.01);
    est = ekf_update_accel(est, sample).estimate;
  }
  EXPECT_NEAR(est.gyro_bias.x(), 0.01, 0.001);
  EXPECT_NEAR(est.gyro_bias.y(), 0.01, 0.001);
}

TEST(EkfProperties, NoiseFreeManeuverTracking) {
  const auto stats = track(sensors::NoiseSpec{}, 60.0);
  EXPECT_LT(rad2deg(stats.max_error), 0.5);
  EXPECT_TRUE(stats.psd);
}

TEST(EkfProperties, DefaultNoiseRollPitchRms) {
  sensors::NoiseSpec noise;
  noise.gyro_noise_std = 0.005 * std::sqrt(100.0);
  noise.accel_noise_std = 0.05;
  const auto stats = track(noise, 60.0, 4);
  EXPECT_LT(rad2deg(stats.rms_tilt), 2.0);
  EXPECT_TRUE(stats.psd);
}

TEST(DeadReckoning, ZeroPwmFromRestStaysPut) {
  const auto params = dynamics::default_vehicle_params();
  OdometryEstimate odom;
  for (int i = 0; i < 100; ++i) odom = dead_reckon_step(odom, ThrusterSet{}, params, 0.0, 0.01);
  EXPECT_EQ(odom.position, Vec3::Zero());
}

TEST(DeadReckoning, MatchesGroundTruthSpeedAtFullThrust) {
  const auto params = dynamics::default_vehicle_params();
  const ThrusterSet full(1.0, 1.0, 0.0);
  OdometryEstimate odom;
  RigidBodyState truth;
  for (int i = 0; i < 6000; ++i) {
    truth = dynamics::step(truth, params, full, 0.01);
    odom = dead_reckon_step(odom, full, params, 0.0, 0.01);
  }
  EXPECT_NEAR(odom.velocity.x(), truth.linear_velocity.norm(), 0.02 * truth.linear_velocity.norm());
  EXPECT_NEAR(odom.position.x(), truth.position.x(), 0.01 * truth.position.x());
}

TEST(DeadReckoning, HeadingRotatesTrackIntoWorld) {
  auto params = dynamics::default_vehicle_params();
  params.drag.surge = 0.0;
  OdometryEstimate odom;
  odom.velocity = Vec3(1.0, 0.0, 0.0);
  // Nose-left quarter turn from north points west, which is world +y.
  const auto left = dead_reckon_step(odom, ThrusterSet{}, params, kPi / 2.0, 1.0);
  EXPECT_NEAR(left.position.x(), 0.0, 1e-12);
  EXPECT_NEAR(left.position.y(), 1.0, 1e-12);
  const auto right = dead_reckon_step(odom, ThrusterSet{}, params, -kPi / 2.0, 1.0);
  EXPECT_NEAR(right.position.y(), -1.0, 1e-12);
}

TEST(DeadReckoning, StaysFiniteOverLongRuns) {
  const auto params = dynamics::default_vehicle_params();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pwm(-1.0, 1.0);
  OdometryEstimate odom;
  for (int i = 0; i < 100000; ++i) {
    odom = dead_reckon_step(odom, ThrusterSet(pwm(rng), pwm(rng), 0.0), params, pwm(rng) * kPi, 0.01);
    ASSERT_TRUE(odom.position.allFinite());
  }
}

TEST(DepthFilter, ConvergesToStepInput) {
  DepthFilter f(1.0);
  EXPECT_EQ(f.update(0.0, 0.0), 0.0);
  double v = 0.0;
  for (int i = 1; i <= 50; ++i) v = f.update(5.0, i * 0.1);
  EXPECT_NEAR(v, 5.0, 1e-6);
  DepthFilter g(1.0);
  g.update(0.0, 0.0);
  // One time constant (1 / 2 pi s) in small steps reaches ~63 %.
  double w = 0.0;
  const double tau = 1.0 / (2.0 * kPi);
  for (int i = 1; i <= 1000; ++i) w = g.update(1.0, i * tau / 1000.0);
  EXPECT_NEAR(w, 1.0 - std::exp(-1.0), 1e-3);
}

TEST(MotionModel, TracksTruthVelocityUnderTurningThrust) {
  const auto params = dynamics::default_vehicle_params();
  RigidBodyState truth;
  MotionModel model;
  const ThrusterSet u(0.2, 0.6, 0.0);
  Vec3 true_linear = Vec3::Zero();
  for (int i = 0; i < 2000; ++i) {
    const auto result = dynamics::step_detailed(truth, params, u, 0.01);
    truth = result.state;
    true_linear = result.specific_force - sensors::static_specific_force(truth);
    model.propagate(u, params, truth.angular_velocity, 0.01);
  }
  EXPECT_LT((model.velocity() - truth.linear_velocity).norm(), 0.01 * truth.linear_velocity.norm());
  // Steady turn: the residual is the centripetal term, which the model reproduces.
  EXPECT_GT(true_linear.norm(), 0.1);
  EXPECT_LT((model.linear_acceleration() - true_linear).norm(), 0.05 * true_linear.norm());
}

TEST(MotionModel, RejectsNonPositiveDt) {
  MotionModel model;
  EXPECT_THROW(model.propagate(ThrusterSet{}, dynamics::default_vehicle_params(), Vec3::Zero(), 0.0),
               std::invalid_argument);
}
