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

#include "vendguard/sim/fleet_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <thread>

#include "json_internal.hpp"
#include "vendguard/error.hpp"
#include "vendguard/frame_codec.hpp"
#include "vendguard/rng.hpp"

namespace vendguard::sim {

namespace {

using internal::json;

constexpr std::uint64_t kNoiseStreamSalt = 0x9E3779B97F4A7C15ULL;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Timestamp align_up(Timestamp t, Timestamp origin, std::int64_t cadence) {
  const std::int64_t offset = t - origin;
  const std::int64_t steps = (offset + cadence - 1) / cadence;
  return origin + steps * cadence;
}

bool is_daytime(Timestamp t) {
  const std::int64_t second_of_day = ((t % kSecondsPerDay) + kSecondsPerDay) % kSecondsPerDay;
  return second_of_day >= 7 * kSecondsPerHour && second_of_day < 22 * kSecondsPerHour;
}

double quantize_to(double value, double step) {
  if (std::isnan(value)) return value;
  return std::round(value / step) * step;
}

json baseline_json(const ChannelBaseline& b) {
  return json{{"mean", b.mean}, {"noise_std", b.noise_std}};
}

ChannelBaseline baseline_from(const json& j) {
  return {j.at("mean").get<double>(), j.at("noise_std").get<double>()};
}

std::vector<FaultScenario> random_schedule(const SimConfig& c, Rng& rng) {
  std::vector<FaultScenario> out;
  if (c.scenario_rate <= 0.0) return out;
  const Timestamp end = c.start_time + c.horizon;
  const double mean_gap = 30.0 * kSecondsPerDay / c.scenario_rate;
  Timestamp t = c.start_time + c.warmup;
  for (;;) {
    const double gap = rng.exponential(mean_gap);
    if (static_cast<double>(t) + gap >= static_cast<double>(end)) break;
    FaultScenario s;
    s.onset_time = align_up(t + static_cast<Timestamp>(gap), c.start_time, c.cadence);
    const double kind_draw = rng.uniform();
    Timestamp occupied_until = 0;
    if (kind_draw < c.dropout_share) {
      s.kind = FaultKind::kSensorDropout;
      const std::int64_t steps_lo = c.dropout_min / c.cadence;
      const std::int64_t steps_hi = c.dropout_max / c.cadence;
      s.ramp_duration =
          (steps_lo + static_cast<std::int64_t>(rng.uniform_index(
                          static_cast<std::uint64_t>(steps_hi - steps_lo + 1)))) *
          c.cadence;
      static constexpr Channel kDropoutChannels[] = {
          Channel::kTemperature, Channel::kVibration, Channel::kCurrent};
      s.channel = kDropoutChannels[rng.uniform_index(3)];
      s.severity = 1.0;
      s.hard_failure = false;
      occupied_until = s.onset_time + s.ramp_duration;
    } else {
      const double split = c.dropout_share + (1.0 - c.dropout_share) / 2.0;
      s.kind = kind_draw < split ? FaultKind::kHeaterFailure : FaultKind::kMotorImbalance;
      s.ramp_duration = c.ramp_duration;
      s.severity = rng.uniform(c.severity_min, c.severity_max);
      s.hard_failure = !(rng.uniform() < c.benign_share);
      occupied_until = s.onset_time + s.ramp_duration +
                       (s.hard_failure ? c.repair_duration : 0);
    }
    if (occupied_until >= end) break;
    out.push_back(s);
    t = occupied_until + c.min_gap;
  }
  return out;
}

void check_window(const MachineSeries& series, const FaultScenario& s) {
  const Timestamp end = series.start + static_cast<Timestamp>(series.size()) * series.cadence;
  if (s.ramp_duration <= 0) {
    fail(Errc::kInvalidArgument, "scenario duration must be positive");
  }
  if (s.onset_time < series.start || s.onset_time + s.ramp_duration > end) {
    fail(Errc::kOutOfRange,
         "scenario window [" + std::to_string(s.onset_time) + ", " +
             std::to_string(s.onset_time + s.ramp_duration) +
             "] outside series bounds [" + std::to_string(series.start) + ", " +
             std::to_string(end) + "]");
  }
  if (!(s.severity >= 0.0) || !std::isfinite(s.severity)) {
    fail(Errc::kInvalidArgument, "severity must be finite and non-negative");
  }
}

}  // namespace

std::string machine_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "M%03d", index);
  return buf;
}

void SimConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(Errc::kInvalidArgument, std::string("SimConfig: ") + what);
  };
  require(machine_count >= 1, "machine_count must be >= 1");
  require(cadence > 0, "cadence must be positive");
  require(horizon > 0, "horizon must be positive");
  require(horizon % cadence == 0, "cadence must divide horizon");
  require(temperature.noise_std >= 0 && vibration.noise_std >= 0 &&
              current.noise_std >= 0,
          "noise standard deviations must be >= 0");
  require(scenario_rate >= 0, "scenario_rate must be >= 0");
  require(dropout_share >= 0 && dropout_share <= 1, "dropout_share must be in [0,1]");
  require(benign_share >= 0 && benign_share <= 1, "benign_share must be in [0,1]");
  require(ramp_duration > 0 && ramp_duration % cadence == 0,
          "ramp_duration must be a positive multiple of cadence");
  require(repair_duration > 0 && repair_duration % cadence == 0,
          "repair_duration must be a positive multiple of cadence");
  require(dropout_min > 0 && dropout_min <= dropout_max,
          "dropout duration bounds invalid");
  require(severity_min > 0 && severity_min <= severity_max, "severity bounds invalid");
  require(interactions_day_rate >= 0 && interactions_night_rate >= 0,
          "interaction rates must be >= 0");
  require(glitch_probability >= 0 && glitch_probability <= 1,
          "glitch_probability must be in [0,1]");
  require(warmup >= 0 && min_gap >= 0, "warmup and min_gap must be >= 0");
  require(profile.motor_tone_period_s > 0, "motor tone period must be positive");
}

std::string SimConfig::to_json() const {
  json j;
  j["machine_count"] = machine_count;
  j["horizon"] = horizon;
  j["cadence"] = cadence;
  j["seed"] = seed;
  j["start_time"] = start_time;
  j["scenario_rate"] = scenario_rate;
  j["dropout_share"] = dropout_share;
  j["benign_share"] = benign_share;
  j["ramp_duration"] = ramp_duration;
  j["severity_min"] = severity_min;
  j["severity_max"] = severity_max;
  j["dropout_min"] = dropout_min;
  j["dropout_max"] = dropout_max;
  j["repair_duration"] = repair_duration;
  j["warmup"] = warmup;
  j["min_gap"] = min_gap;
  j["temperature"] = baseline_json(temperature);
  j["vibration"] = baseline_json(vibration);
  j["current"] = baseline_json(current);
  j["machine_offset_stds"] = machine_offset_stds;
  j["interactions_day_rate"] = interactions_day_rate;
  j["interactions_night_rate"] = interactions_night_rate;
  j["glitch_probability"] = glitch_probability;
  j["glitch_stds"] = glitch_stds;
  j["quantize"] = quantize;
  j["profile"] = {{"heater_ramp_celsius", profile.heater_ramp_celsius},
                  {"motor_ramp_vibration", profile.motor_ramp_vibration},
                  {"motor_tone_amplitude", profile.motor_tone_amplitude},
                  {"motor_tone_period_s", profile.motor_tone_period_s}};
  return j.dump();
}

SimConfig SimConfig::from_json(const std::string& text) {
  SimConfig c;
  try {
    const json j = json::parse(text);
    c.machine_count = j.at("machine_count").get<int>();
    c.horizon = j.at("horizon").get<std::int64_t>();
    c.cadence = j.at("cadence").get<std::int64_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.start_time = j.at("start_time").get<Timestamp>();
    c.scenario_rate = j.at("scenario_rate").get<double>();
    c.dropout_share = j.at("dropout_share").get<double>();
    c.benign_share = j.at("benign_share").get<double>();
    c.ramp_duration = j.at("ramp_duration").get<std::int64_t>();
    c.severity_min = j.at("severity_min").get<double>();
    c.severity_max = j.at("severity_max").get<double>();
    c.dropout_min = j.at("dropout_min").get<std::int64_t>();
    c.dropout_max = j.at("dropout_max").get<std::int64_t>();
    c.repair_duration = j.at("repair_duration").get<std::int64_t>();
    c.warmup = j.at("warmup").get<std::int64_t>();
    c.min_gap = j.at("min_gap").get<std::int64_t>();
    c.temperature = baseline_from(j.at("temperature"));
    c.vibration = baseline_from(j.at("vibration"));
    c.current = baseline_from(j.at("current"));
    c.machine_offset_stds = j.at("machine_offset_stds").get<double>();
    c.interactions_day_rate = j.at("interactions_day_rate").get<double>();
    c.interactions_night_rate = j.at("interactions_night_rate").get<double>();
    c.glitch_probability = j.at("glitch_probability").get<double>();
    c.glitch_stds = j.at("glitch_stds").get<double>();
    c.quantize = j.at("quantize").get<bool>();
    const json& p = j.at("profile");
    c.profile.heater_ramp_celsius = p.at("heater_ramp_celsius").get<double>();
    c.profile.motor_ramp_vibration = p.at("motor_ramp_vibration").get<double>();
    c.profile.motor_tone_amplitude = p.at("motor_tone_amplitude").get<double>();
    c.profile.motor_tone_period_s = p.at("motor_tone_period_s").get<double>();
  } catch (const json::exception& e) {
    fail(Errc::kFormat, std::string("SimConfig: ") + e.what());
  }
  return c;
}

std::string SimConfig::fingerprint() const { return fingerprint_hex(to_json()); }

MachineSeries inject_fault(MachineSeries series, const FaultScenario& s,
                           const FaultProfile& profile) {
  check_window(series, s);
  const Timestamp onset = s.onset_time;
  const Timestamp ramp_end = s.onset_time + s.ramp_duration;
  const std::size_t first = static_cast<std::size_t>((onset - series.start + series.cadence - 1) /
                                                     series.cadence);
  const double ramp = static_cast<double>(s.ramp_duration);
  for (std::size_t i = first; i < series.size(); ++i) {
    const Timestamp t = series.time_at(i);
    if (t > ramp_end) break;
    const double elapsed = static_cast<double>(t - onset);
    const double frac = elapsed / ramp;
    switch (s.kind) {
      case FaultKind::kHeaterFailure:
        series.temperature[i] += s.severity * profile.heater_ramp_celsius * frac;
        break;
      case FaultKind::kMotorImbalance: {
        const double tone = std::sin(2.0 * std::numbers::pi * elapsed /
                                     profile.motor_tone_period_s);
        series.vibration[i] += s.severity * frac *
                               (profile.motor_ramp_vibration +
                                profile.motor_tone_amplitude * tone);
        break;
      }
      case FaultKind::kSensorDropout:
        if (t < ramp_end) series.channel(s.channel)[i] = kNaN;
        break;
    }
  }
  return series;
}

MachineSimulation simulate_machine(const SimConfig& config, int index) {
  config.validate();
  Rng schedule(config.seed ^ static_cast<std::uint64_t>(index));
  // The first draws of the schedule stream are the machine offsets; see
  // simulate_machine below.
  schedule.uniform();
  schedule.uniform();
  schedule.uniform();
  return simulate_machine(config, index, random_schedule(config, schedule));
}

MachineSimulation simulate_machine(const SimConfig& config, int index,
                                   const std::vector<FaultScenario>& scenarios) {
  config.validate();
  const std::uint64_t stream = config.seed ^ static_cast<std::uint64_t>(index);
  Rng schedule(stream);
  Rng noise(stream + kNoiseStreamSalt);

  const double k = config.machine_offset_stds;
  const double temp_mean =
      config.temperature.mean + schedule.uniform(-k, k) * config.temperature.noise_std;
  const double vib_mean =
      config.vibration.mean + schedule.uniform(-k, k) * config.vibration.noise_std;
  const double cur_mean =
      config.current.mean + schedule.uniform(-k, k) * config.current.noise_std;

  MachineSimulation out;
  MachineSeries& s = out.series;
  s.machine_id = machine_name(index);
  s.start = config.start_time;
  s.cadence = config.cadence;
  const auto n = static_cast<std::size_t>(config.frames_per_machine());
  s.resize(n);

  auto glitch = [&](double std) {
    if (config.glitch_probability <= 0.0) return 0.0;
    if (noise.uniform() >= config.glitch_probability) return 0.0;
    const double sign = noise.uniform() < 0.5 ? -1.0 : 1.0;
    return sign * config.glitch_stds * std;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const Timestamp t = s.time_at(i);
    s.temperature[i] = temp_mean + config.temperature.noise_std * noise.normal() +
                       glitch(config.temperature.noise_std);
    s.vibration[i] = vib_mean + config.vibration.noise_std * noise.normal() +
                     glitch(config.vibration.noise_std);
    s.current[i] = cur_mean + config.current.noise_std * noise.normal() +
                   glitch(config.current.noise_std);
    const double rate =
        is_daytime(t) ? config.interactions_day_rate : config.interactions_night_rate;
    s.interactions[i] = static_cast<double>(noise.poisson(rate));
  }

  for (const FaultScenario& scenario : scenarios) {
    s = inject_fault(std::move(s), scenario, config.profile);
    if (scenario.hard_failure && scenario.kind != FaultKind::kSensorDropout) {
      FaultEvent e;
      e.machine_id = s.machine_id;
      e.failure_time = scenario.onset_time + scenario.ramp_duration;
      e.repair_time = e.failure_time + config.repair_duration;
      e.cause = scenario.kind;
      out.events.push_back(e);
    }
  }
  out.scenarios = scenarios;

  // A failed machine reports nothing meaningful until it is repaired.
  for (const FaultEvent& e : out.events) {
    const auto first = static_cast<std::size_t>(
        std::max<Timestamp>(0, (e.failure_time - s.start + s.cadence - 1) / s.cadence));
    for (std::size_t i = first; i < n; ++i) {
      if (s.time_at(i) >= e.repair_time) break;
      s.temperature[i] = s.vibration[i] = s.current[i] = s.interactions[i] = kNaN;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isnan(s.vibration[i])) s.vibration[i] = std::max(0.0, s.vibration[i]);
    if (!std::isnan(s.current[i])) s.current[i] = std::max(0.0, s.current[i]);
    if (config.quantize) {
      s.temperature[i] = quantize_to(s.temperature[i], 0.01);
      s.vibration[i] = quantize_to(s.vibration[i], 0.001);
      s.current[i] = quantize_to(s.current[i], 0.001);
    }
  }
  std::sort(out.events.begin(), out.events.end(),
            [](const FaultEvent& a, const FaultEvent& b) {
              return a.failure_time < b.failure_time;
            });
  return out;
}

FleetSimulation simulate_fleet(const SimConfig& config, int threads) {
  config.validate();
  const int count = config.machine_count;
  std::vector<MachineSimulation> results(static_cast<std::size_t>(count));
  auto work = [&](int begin, int step) {
    for (int i = begin; i < count; i += step) {
      results[static_cast<std::size_t>(i)] = simulate_machine(config, i);
    }
  };
  const int workers = std::clamp(threads, 1, count);
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& th : pool) th.join();
  }
  FleetSimulation fleet;
  for (auto& r : results) {
    fleet.machines.push_back(std::move(r.series));
    fleet.events.insert(fleet.events.end(), r.events.begin(), r.events.end());
  }
  return fleet;
}

}  // namespace vendguard::sim
