// Copyright 2026 The Vendguard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "vendguard/error.hpp"
#include "vendguard/sim/bundle.hpp"
#include "vendguard/sim/fleet_sim.hpp"

using namespace vendguard;
using namespace vendguard::sim;

namespace {

SimConfig small_config(int machines = 2, int days = 3) {
  SimConfig c;
  c.machine_count = machines;
  c.horizon = days * kSecondsPerDay;
  c.seed = 7;
  return c;
}

SimConfig quiet_config() {
  SimConfig c = small_config(1, 4);
  c.temperature.noise_std = 0.0;
  c.vibration.noise_std = 0.0;
  c.current.noise_std = 0.0;
  c.glitch_probability = 0.0;
  c.quantize = false;
  c.scenario_rate = 0.0;
  return c;
}

}  // namespace

TEST(FleetSim, FrameCountIsHorizonOverCadence) {
  SimConfig c = small_config(1, 30);
  const auto fleet = simulate_fleet(c);
  ASSERT_EQ(fleet.machines.size(), 1u);
  EXPECT_EQ(fleet.machines[0].size(), 259200u);
}

TEST(FleetSim, RejectsBadConfigs) {
  SimConfig c = small_config();
  c.machine_count = 0;
  EXPECT_THROW(c.validate(), Error);
  c = small_config();
  c.horizon = 1000 * 10 + 5;
  EXPECT_THROW(c.validate(), Error);
  c = small_config();
  c.horizon = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(FleetSim, DeterministicAndIndependentOfThreads) {
  SimConfig c = small_config(3, 10);
  const auto a = simulate_fleet(c, 1);
  const auto b = simulate_fleet(c, 3);
  ASSERT_EQ(a.machines.size(), b.machines.size());
  for (std::size_t m = 0; m < a.machines.size(); ++m) {
    EXPECT_EQ(a.machines[m].frames(), b.machines[m].frames());
  }
  EXPECT_EQ(a.events, b.events);
}

TEST(FleetSim, AddingMachinesKeepsExistingOnes) {
  SimConfig c = small_config(2, 5);
  const auto two = simulate_fleet(c);
  c.machine_count = 4;
  const auto four = simulate_fleet(c);
  EXPECT_EQ(two.machines[1].frames(), four.machines[1].frames());
}

TEST(FleetSim, EveryFailurePrecededByRampAndFollowedByBlackout) {
  SimConfig c = small_config(4, 90);
  for (int m = 0; m < c.machine_count; ++m) {
    const auto sim = simulate_machine(c, m);
    for (const FaultEvent& e : sim.events) {
      const auto& s = sim.series;
      const auto fail_idx = static_cast<std::size_t>((e.failure_time - s.start) / s.cadence);
      const std::size_t hour = 360;
      const std::vector<double>& ch =
          e.cause == FaultKind::kHeaterFailure ? s.temperature : s.vibration;
      double early = 0, late = 0;
      for (std::size_t i = 0; i < hour; ++i) {
        early += ch[fail_idx - 8640 + i];
        late += ch[fail_idx - hour + i];
      }
      EXPECT_GT(late, early) << e.machine_id << " at " << e.failure_time;
      EXPECT_TRUE(std::isnan(s.temperature[fail_idx + 1]));
      EXPECT_TRUE(std::isnan(s.interactions[fail_idx + 1]));
      EXPECT_EQ(e.repair_time - e.failure_time, c.repair_duration);
    }
  }
}

TEST(InjectFault, ZeroSeverityIsIdentity) {
  const auto base = simulate_machine(quiet_config(), 0).series;
  FaultScenario s{FaultKind::kHeaterFailure, base.start + 3600, 7200, 0.0};
  EXPECT_EQ(inject_fault(base, s).frames(), base.frames());
}

TEST(InjectFault, DropoutBlanksOnlyItsChannel) {
  const auto base = simulate_machine(quiet_config(), 0).series;
  FaultScenario s;
  s.kind = FaultKind::kSensorDropout;
  s.onset_time = base.start + 1000;
  s.ramp_duration = 100 * base.cadence;
  s.channel = Channel::kVibration;
  s.hard_failure = false;
  const auto out = inject_fault(base, s);
  std::size_t missing_vib = 0, missing_other = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    missing_vib += std::isnan(out.vibration[i]);
    missing_other += std::isnan(out.temperature[i]) + std::isnan(out.current[i]) + std::isnan(out.interactions[i]);
  }
  EXPECT_EQ(missing_vib, 100u);
  EXPECT_EQ(missing_other, 0u);
}

TEST(InjectFault, HeaterRampMatchesClosedForm) {
  const SimConfig c = quiet_config();
  const auto base = simulate_machine(c, 0).series;
  const double severity = 1.3;
  const std::int64_t d = 6 * kSecondsPerHour;
  FaultScenario s{FaultKind::kHeaterFailure, base.start + 7200, d, severity};
  const auto out = inject_fault(base, s);
  const auto end_idx = static_cast<std::size_t>((s.onset_time + d - base.start) / base.cadence);
  EXPECT_NEAR(out.temperature[end_idx] - base.temperature[end_idx], severity * 12.0, 1e-9);
  const auto mid_idx = static_cast<std::size_t>((s.onset_time + d / 4 - base.start) / base.cadence);
  EXPECT_NEAR(out.temperature[mid_idx] - base.temperature[mid_idx], severity * 12.0 * 0.25, 1e-9);
  EXPECT_EQ(out.temperature[end_idx + 1], base.temperature[end_idx + 1]);
  // Noise-free trend is non-decreasing inside the ramp.
  const auto on_idx = static_cast<std::size_t>((s.onset_time - base.start) / base.cadence);
  for (std::size_t i = on_idx + 1; i <= end_idx; ++i) EXPECT_GE(out.temperature[i], out.temperature[i - 1]);
}

TEST(InjectFault, OutOfBoundsRejected) {
  const auto base = simulate_machine(quiet_config(), 0).series;
  FaultScenario s{FaultKind::kHeaterFailure, base.start + 4 * kSecondsPerDay - 10, 3600, 1.0};
  EXPECT_THROW(inject_fault(base, s), Error);
}

TEST(FleetSim, ReturnsToBaselineAfterRepair) {
  SimConfig c = quiet_config();
  const Timestamp onset = c.start_time + kSecondsPerDay;
  FaultScenario s{FaultKind::kMotorImbalance, onset, c.ramp_duration, 1.5};
  const auto sim = simulate_machine(c, 0, {s});
  ASSERT_EQ(sim.events.size(), 1u);
  const auto& series = sim.series;
  const auto after = static_cast<std::size_t>((sim.events[0].repair_time - series.start) / series.cadence);
  const double nominal = series.vibration[0];
  for (std::size_t i = after; i < series.size(); ++i) ASSERT_EQ(series.vibration[i], nominal);
}

TEST(Bundle, WriteReadRoundTripAndFingerprint) {
  vg_test::TempDir dir("bundle");
  SimConfig c = small_config(2, 2);
  c.scenario_rate = 30.0;
  c.min_gap = 3600;
  c.warmup = 3600;
  c.ramp_duration = 6 * kSecondsPerHour;
  const auto manifest = generate_benchmark(c, dir.path());
  ASSERT_EQ(manifest.machines.size(), 2u);
  const auto again = read_manifest(dir.path());
  EXPECT_EQ(again.fingerprint, c.fingerprint());
  EXPECT_EQ(SimConfig::from_json(again.config.to_json()).fingerprint(), again.fingerprint);
  const auto fleet = simulate_fleet(c);
  EXPECT_EQ(read_events(dir.path()), fleet.events);
  for (std::size_t m = 0; m < 2; ++m) {
    const auto series = read_machine(dir.path(), again, again.machines[m]);
    EXPECT_EQ(series.frames(), fleet.machines[m].frames());
  }
}

TEST(Bundle, NoScenariosNoEvents) {
  vg_test::TempDir dir("bundle0");
  SimConfig c = small_config(1, 1);
  c.scenario_rate = 0.0;
  generate_benchmark(c, dir.path());
  EXPECT_TRUE(read_events(dir.path()).empty());
}

TEST(Bundle, DefaultConfigIsTwentyMachinesSixMonths) {
  const SimConfig c = default_benchmark_config();
  EXPECT_EQ(c.machine_count, 20);
  EXPECT_EQ(c.horizon, 180 * kSecondsPerDay);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.cadence, 10);
}

TEST(Bundle, MissingDirectoryCarriesPath) {
  try {
    read_manifest("/nonexistent/vg_bundle");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/vg_bundle"), std::string::npos);
  }
}
