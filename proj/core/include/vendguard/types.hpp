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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vendguard {

using MachineId = std::string;
// Seconds since the Unix epoch.
using Timestamp = std::int64_t;

inline constexpr std::int64_t kSecondsPerMinute = 60;
inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;

enum class FaultKind { kHeaterFailure, kMotorImbalance, kSensorDropout };

enum class Channel { kTemperature, kVibration, kCurrent, kInteractions };

std::string_view to_string(FaultKind kind);
FaultKind fault_kind_from_string(std::string_view name);
std::string_view to_string(Channel channel);
Channel channel_from_string(std::string_view name);

// One timestamped reading of every channel of one machine. An empty optional
// is a missing marker (sensor dropout or machine down), distinct from zero.
struct SensorFrame {
  MachineId machine_id;
  Timestamp timestamp = 0;
  std::optional<double> temperature;   // degrees Celsius
  std::optional<double> vibration;     // m/s^2 RMS over the interval
  std::optional<double> current;       // amperes
  std::optional<std::int64_t> interactions;  // dispense events this interval

  bool operator==(const SensorFrame&) const = default;
};

// Ground truth: the instant a machine stopped working and the instant it was
// back in service.
struct FaultEvent {
  MachineId machine_id;
  Timestamp failure_time = 0;
  Timestamp repair_time = 0;
  FaultKind cause = FaultKind::kHeaterFailure;

  bool operator==(const FaultEvent&) const = default;
};

// Column-oriented telemetry of one machine on a uniform time grid. Missing
// values are stored as quiet NaN. This is the bulk representation used by the
// simulator, the bundle reader and the preprocessing pipeline.
struct MachineSeries {
  MachineId machine_id;
  Timestamp start = 0;
  std::int64_t cadence = 10;
  std::vector<double> temperature;
  std::vector<double> vibration;
  std::vector<double> current;
  std::vector<double> interactions;

  std::size_t size() const { return temperature.size(); }
  Timestamp time_at(std::size_t index) const {
    return start + static_cast<Timestamp>(index) * cadence;
  }
  void resize(std::size_t n);
  std::vector<double>& channel(Channel c);
  const std::vector<double>& channel(Channel c) const;

  SensorFrame frame(std::size_t index) const;
  std::vector<SensorFrame> frames() const;
  // Builds a series from frames on a uniform grid; throws if the timestamps
  // are not spaced by exactly `cadence`.
  static MachineSeries from_frames(const std::vector<SensorFrame>& frames,
                                   std::int64_t cadence);
};

}  // namespace vendguard
