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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vendguard/types.hpp"

namespace vendguard::sim {

struct FaultScenario {
  FaultKind kind = FaultKind::kHeaterFailure;
  Timestamp onset_time = 0;
  // Degradation length before hard failure; for SensorDropout the dropout
  // duration.
  std::int64_t ramp_duration = 0;
  double severity = 1.0;
  // Channel blanked by SensorDropout; ignored by the other kinds.
  Channel channel = Channel::kVibration;
  // Whether the machine goes down at onset + ramp_duration. SensorDropout
  // never fails.
  bool hard_failure = true;

  bool operator==(const FaultScenario&) const = default;
};

struct ChannelBaseline {
  double mean = 0.0;
  double noise_std = 0.0;
};

// Per-kind trend amplitudes at severity 1.
struct FaultProfile {
  double heater_ramp_celsius = 12.0;
  double motor_ramp_vibration = 0.6;
  // Imbalance adds a tone to the vibration channel that grows with the ramp.
  double motor_tone_amplitude = 0.3;
  double motor_tone_period_s = 50.0;
};

struct SimConfig {
  int machine_count = 1;
  std::int64_t horizon = 30 * kSecondsPerDay;
  std::int64_t cadence = 10;
  std::uint64_t seed = 42;
  Timestamp start_time = 1704067200;  // 2024-01-01T00:00:00Z

  // Arrival rate of fault scenarios, per machine per 30 days.
  double scenario_rate = 2.2;
  // Share of scenarios that are sensor dropouts; the rest split evenly between
  // heater failure and motor imbalance.
  double dropout_share = 0.2;
  // Share of heater/motor scenarios that ramp but never fail.
  double benign_share = 0.0;
  std::int64_t ramp_duration = 24 * kSecondsPerHour;
  double severity_min = 0.8;
  double severity_max = 1.6;
  std::int64_t dropout_min = 1 * kSecondsPerHour;
  std::int64_t dropout_max = 6 * kSecondsPerHour;
  // Nominal time from hard failure to completed repair (dispatch + repair).
  std::int64_t repair_duration = 6 * kSecondsPerHour + 30 * kSecondsPerMinute;
  std::int64_t warmup = 1 * kSecondsPerDay;
  std::int64_t min_gap = 2 * kSecondsPerDay;

  ChannelBaseline temperature{42.0, 0.4};
  ChannelBaseline vibration{0.2, 0.03};
  ChannelBaseline current{1.2, 0.05};
  // Machine-specific offset drawn uniformly in +/- this many noise stds.
  double machine_offset_stds = 0.6;
  // Poisson dispense rates per frame; day is 07:00-22:00 UTC.
  double interactions_day_rate = 0.03;
  double interactions_night_rate = 0.004;
  // Single-sample false triggers, per frame and channel, sized in noise stds.
  double glitch_probability = 2e-5;
  double glitch_stds = 15.0;
  // Round readings to sensor resolution (0.01 C, 0.001 m/s^2, 0.001 A).
  bool quantize = true;

  FaultProfile profile;

  // Validates the invariants; throws vendguard::Error.
  void validate() const;
  std::int64_t frames_per_machine() const { return horizon / cadence; }
  // Canonical JSON of every field; stable across runs.
  std::string to_json() const;
  static SimConfig from_json(const std::string& text);
  std::string fingerprint() const;
};

std::string machine_name(int index);

// inject_fault: returns `series` with the scenario applied. Outside
// [onset, onset + ramp] the series is untouched. Heater failure adds
// severity * heater_ramp * (t - onset) / ramp to temperature; motor imbalance
// adds the same linear shape to vibration plus a tone whose amplitude grows
// with it; sensor dropout blanks `channel` on [onset, onset + ramp).
MachineSeries inject_fault(MachineSeries series, const FaultScenario& scenario,
                           const FaultProfile& profile = {});

struct MachineSimulation {
  MachineSeries series;
  std::vector<FaultScenario> scenarios;
  std::vector<FaultEvent> events;
};

// Deterministic in (config, index). The scenario schedule and the sensor
// noise come from separate substreams seeded from seed ^ index, so adding
// machines never reshuffles existing ones.
MachineSimulation simulate_machine(const SimConfig& config, int index);

// As simulate_machine but with an explicit scenario list instead of the
// random schedule.
MachineSimulation simulate_machine(const SimConfig& config, int index,
                                   const std::vector<FaultScenario>& scenarios);

struct FleetSimulation {
  std::vector<MachineSeries> machines;
  std::vector<FaultEvent> events;  // sorted by (machine_id, failure_time)
};

// `threads` <= 1 runs serially; the output does not depend on it.
FleetSimulation simulate_fleet(const SimConfig& config, int threads = 1);

}  // namespace vendguard::sim
