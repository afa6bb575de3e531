#include "loco/power/battery.hpp"

#include <gtest/gtest.h>
#include <yaml-cpp/yaml.h>

#include <random>

using namespace loco;
using namespace loco::power;
using loco::dynamics::ThrusterSet;

namespace {

const ThrusterSet kIdle(0, 0, 0);
const ThrusterSet kAverage(0.5, 0.5, 0);
const ThrusterSet kMax(1, 1, 1);

// Drains until power-off and returns the interpolated exhaustion instant.
double exhaustion_time(const ThrusterSet& u, ComputeLoad load, double dt = 1.0) {
  const auto params = default_power_params();
  PowerState s;
  while (s.powered) s = drain_step(s, params, u, load, dt);
  return *s.exhausted_time;
}

}  // namespace

TEST(Voltage, LinearBetweenEndpoints) {
  BatteryPack p;
  EXPECT_DOUBLE_EQ(voltage_of_charge(p), 12.6);
  p.charge = 0.0;
  EXPECT_DOUBLE_EQ(voltage_of_charge(p), 9.6);
  p.charge = 8.0;
  EXPECT_NEAR(voltage_of_charge(p), 11.1, 1e-12);
}

TEST(Voltage, PackValidation) {
  BatteryPack p;
  p.charge = 17.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.charge = 1.0;
  p.voltage_empty = 13.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Profiles, CalibratedTotals) {
  const auto params = default_power_params();
  EXPECT_NEAR(total_current(params, kIdle, ComputeLoad::idle), 1.7297, 1e-4);
  EXPECT_NEAR(total_current(params, kAverage, ComputeLoad::average), 13.714, 1e-3);
  EXPECT_NEAR(total_current(params, kMax, ComputeLoad::max), 64.0, 1e-9);
}

TEST(Drain, IdleExhaustsAtEighteenHoursThirty) {
  // Oracle: 32 Ah / 1.72973 A.
  const double expected = 32.0 / (32.0 / 18.5) * 3600.0;
  EXPECT_NEAR(exhaustion_time(kIdle, ComputeLoad::idle), expected, 1.0);
  EXPECT_NEAR(expected, 18.5 * 3600.0, 1e-6);
}

TEST(Drain, AverageExhaustsAtTwoHoursTwenty) {
  EXPECT_NEAR(exhaustion_time(kAverage, ComputeLoad::average), (2 * 60 + 20) * 60.0, 60.0);
}

TEST(Drain, MaxThrustExhaustsAtThirtyMinutes) {
  EXPECT_NEAR(exhaustion_time(kMax, ComputeLoad::max), 30 * 60.0, 1.0);
}

TEST(Drain, ExhaustionInstantIndependentOfStep) {
  const double fine = exhaustion_time(kMax, ComputeLoad::max, 0.01);
  const double coarse = exhaustion_time(kMax, ComputeLoad::max, 7.0);
  EXPECT_NEAR(fine, coarse, 1e-6);
}

TEST(Drain, AlarmFiresAtTheCrossing) {
  const auto params = default_power_params();
  PowerState s;
  double previous_voltage = s.min_voltage();
  while (s.powered) {
    const auto next = drain_step(s, params, kMax, ComputeLoad::max, 1.0);
    if (!s.alarm_active) {
      // Alarm off strictly above the threshold, on at the step that reaches it.
      EXPECT_GT(previous_voltage, 9.6);
      EXPECT_EQ(next.alarm_active, next.min_voltage() <= 9.6);
    }
    previous_voltage = next.min_voltage();
    s = next;
  }
  ASSERT_TRUE(s.alarm_time);
  EXPECT_DOUBLE_EQ(*s.alarm_time, *s.exhausted_time);
}

TEST(Drain, AlarmAtCustomThresholdInterpolated) {
  auto params = default_power_params();
  params.alarm_voltage = 10.35;  // a quarter of the voltage span, so a quarter charge
  PowerState s;
  while (!s.alarm_active) s = drain_step(s, params, kMax, ComputeLoad::max, 5.0);
  // Oracle: three quarters of 32 Ah at 64 A.
  EXPECT_NEAR(*s.alarm_time, 0.75 * 32.0 / 64.0 * 3600.0, 1e-6);
  EXPECT_TRUE(s.powered);
}

TEST(Drain, AlarmLatchesUntilReset) {
  auto params = default_power_params();
  params.alarm_voltage = 12.0;
  PowerState s;
  while (!s.alarm_active) s = drain_step(s, params, kMax, ComputeLoad::max, 1.0);
  // Recharge above the threshold: the latch holds.
  for (auto& p : s.packs) p.charge = p.capacity;
  s = drain_step(s, params, kIdle, ComputeLoad::idle, 1.0);
  EXPECT_TRUE(s.alarm_active);
  s = reset_alarm(s);
  EXPECT_FALSE(s.alarm_active);
  s = drain_step(s, params, kIdle, ComputeLoad::idle, 1.0);
  EXPECT_FALSE(s.alarm_active);
}

TEST(Drain, ChargeNonIncreasingUnderRandomCommands) {
  const auto params = default_power_params();
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pwm(-1.0, 1.0);
  std::uniform_real_distribution<double> dt(0.001, 30.0);
  std::uniform_int_distribution<int> load(0, 2);
  PowerState s;
  for (int i = 0; i < 20000 && s.powered; ++i) {
    const auto next =
        drain_step(s, params, ThrusterSet(pwm(rng), pwm(rng), pwm(rng)), static_cast<ComputeLoad>(load(rng)), dt(rng));
    for (std::size_t k = 0; k < 2; ++k) {
      ASSERT_LE(next.packs[k].charge, s.packs[k].charge);
      ASSERT_GE(next.packs[k].charge, 0.0);
    }
    ASSERT_EQ(next.alarm_active, next.min_voltage() <= params.alarm_voltage);
    s = next;
  }
  EXPECT_FALSE(s.powered);
}

TEST(Drain, PoweredOffDrawsNothing) {
  const auto params = default_power_params();
  PowerState s;
  for (auto& p : s.packs) p.charge = 0.0;
  s = drain_step(s, params, kMax, ComputeLoad::max, 1.0);
  EXPECT_FALSE(s.powered);
  EXPECT_EQ(*s.exhausted_time, 0.0);
  s = drain_step(s, params, kMax, ComputeLoad::max, 1.0);
  EXPECT_EQ(s.last_current, 0.0);
  EXPECT_EQ(s.elapsed, 2.0);
}

TEST(Drain, UnevenShareHandsOverToRemainingTube) {
  auto params = default_power_params();
  params.load_share = {0.75, 0.25};
  PowerState s;
  bool left_empty_first = false;
  while (s.powered) {
    s = drain_step(s, params, kMax, ComputeLoad::max, 1.0);
    if (s.packs[0].charge == 0.0 && s.packs[1].charge > 1.0) left_empty_first = true;
  }
  EXPECT_TRUE(left_empty_first);
  // Total energy is unchanged by the split.
  EXPECT_NEAR(*s.exhausted_time, 1800.0, 1e-6);
}

TEST(Drain, RejectsNonPositiveDt) {
  EXPECT_THROW(drain_step(PowerState{}, default_power_params(), kIdle, ComputeLoad::idle, 0.0), std::invalid_argument);
}

TEST(PowerYaml, OverridesAndRejectsUnknownKeys) {
  const auto p = power_params_from_yaml(YAML::Load("{compute_draw: {idle: 1.0}, load_share: [0.6, 0.4]}"));
  EXPECT_DOUBLE_EQ(p.compute(ComputeLoad::idle), 1.0);
  EXPECT_DOUBLE_EQ(p.compute(ComputeLoad::max), defaults::kComputeMax);
  EXPECT_DOUBLE_EQ(p.load_share[0], 0.6);
  EXPECT_THROW(power_params_from_yaml(YAML::Load("{voltage: 3}")), std::invalid_argument);
  EXPECT_THROW(power_params_from_yaml(YAML::Load("{load_share: [0.6, 0.6]}")), std::invalid_argument);
  EXPECT_THROW(power_params_from_yaml(YAML::Load("{thruster_draw: [[0, 1], [1, 2]]}")), std::invalid_argument);
  EXPECT_EQ(compute_load_from_string("average"), ComputeLoad::average);
  EXPECT_THROW(compute_load_from_string("turbo"), std::invalid_argument);
}
