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

#include "vendguard/sim/bundle.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "json_internal.hpp"
#include "vendguard/error.hpp"
#include "vendguard/frame_codec.hpp"

namespace vendguard::sim {

namespace fs = std::filesystem;
using internal::json;

namespace {

constexpr std::size_t kFlushBytes = 1 << 20;

class LineWriter {
 public:
  explicit LineWriter(const fs::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) fail(Errc::kIo, "cannot open " + path.string() + " for writing");
    buffer_.reserve(kFlushBytes + 4096);
  }

  std::string& buffer() { return buffer_; }

  void maybe_flush() {
    if (buffer_.size() >= kFlushBytes) flush();
  }

  void close() {
    flush();
    out_.close();
    if (!out_) fail(Errc::kIo, "write failed for " + path_.string());
  }

 private:
  void flush() {
    out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    if (!out_) fail(Errc::kIo, "write failed for " + path_.string());
    buffer_.clear();
  }

  fs::path path_;
  std::ofstream out_;
  std::string buffer_;
};

template <typename Fn>
void for_each_line(const fs::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::kIo, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      fn(line);
    } catch (const Error& e) {
      fail(e.code(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(Errc::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

SimConfig default_benchmark_config() {
  SimConfig c;
  c.machine_count = 20;
  c.horizon = 180 * kSecondsPerDay;
  c.cadence = 10;
  c.seed = 42;
  return c;
}

std::string events_to_json(const std::vector<FaultEvent>& events) {
  json arr = json::array();
  for (const FaultEvent& e : events) {
    arr.push_back({{"machine_id", e.machine_id},
                   {"failure_time", e.failure_time},
                   {"repair_time", e.repair_time},
                   {"cause", std::string(to_string(e.cause))}});
  }
  return arr.dump(1);
}

std::vector<FaultEvent> events_from_json(const std::string& text) {
  std::vector<FaultEvent> out;
  try {
    const json arr = json::parse(text);
    for (const json& j : arr) {
      FaultEvent e;
      e.machine_id = j.at("machine_id").get<std::string>();
      e.failure_time = j.at("failure_time").get<Timestamp>();
      e.repair_time = j.at("repair_time").get<Timestamp>();
      e.cause = fault_kind_from_string(j.at("cause").get<std::string>());
      if (e.repair_time <= e.failure_time) {
        fail(Errc::kFormat, "fault event repair_time must follow failure_time");
      }
      out.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    fail(Errc::kFormat, std::string("events: ") + e.what());
  }
  return out;
}

void write_frames_jsonl(const fs::path& path, const MachineSeries& series) {
  LineWriter w(path);
  for (std::size_t i = 0; i < series.size(); ++i) {
    append_frame_json(w.buffer(), series.frame(i));
    w.buffer() += '\n';
    w.maybe_flush();
  }
  w.close();
}

void write_frames_jsonl(const fs::path& path, const std::vector<SensorFrame>& frames) {
  LineWriter w(path);
  for (const SensorFrame& f : frames) {
    append_frame_json(w.buffer(), f);
    w.buffer() += '\n';
    w.maybe_flush();
  }
  w.close();
}

std::vector<SensorFrame> read_frames_jsonl(const fs::path& path) {
  std::vector<SensorFrame> out;
  for_each_line(path, [&](const std::string& line) { out.push_back(frame_from_json(line)); });
  return out;
}

BundleManifest generate_benchmark(const SimConfig& config, const fs::path& dir) {
  config.validate();
  ensure_dir(dir / "frames");
  BundleManifest manifest;
  manifest.config = config;
  manifest.fingerprint = config.fingerprint();
  std::vector<FaultEvent> events;
  for (int i = 0; i < config.machine_count; ++i) {
    MachineSimulation m = simulate_machine(config, i);
    write_frames_jsonl(dir / "frames" / (m.series.machine_id + ".jsonl"), m.series);
    manifest.machines.push_back(m.series.machine_id);
    events.insert(events.end(), m.events.begin(), m.events.end());
  }
  internal::write_text_file((dir / "events.json").string(), events_to_json(events));
  json j;
  j["format"] = "vendguard-bundle";
  j["version"] = 1;
  j["config"] = json::parse(config.to_json());
  j["fingerprint"] = manifest.fingerprint;
  j["machines"] = manifest.machines;
  internal::write_text_file((dir / "manifest.json").string(), j.dump(1));
  return manifest;
}

BundleManifest read_manifest(const fs::path& dir) {
  const json j = internal::read_json_file((dir / "manifest.json").string());
  BundleManifest m;
  try {
    if (j.at("format").get<std::string>() != "vendguard-bundle") {
      fail(Errc::kFormat, (dir / "manifest.json").string() + ": not a bundle manifest");
    }
    m.config = SimConfig::from_json(j.at("config").dump());
    m.fingerprint = j.at("fingerprint").get<std::string>();
    m.machines = j.at("machines").get<std::vector<MachineId>>();
  } catch (const json::exception& e) {
    fail(Errc::kFormat, (dir / "manifest.json").string() + ": " + e.what());
  }
  return m;
}

std::vector<FaultEvent> read_events(const fs::path& dir) {
  const fs::path path = dir / "events.json";
  std::ifstream in(path);
  if (!in) fail(Errc::kIo, "cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return events_from_json(text);
}

MachineSeries read_machine(const fs::path& dir, const BundleManifest& manifest,
                           const MachineId& machine_id) {
  const fs::path path = dir / "frames" / (machine_id + ".jsonl");
  MachineSeries s;
  s.machine_id = machine_id;
  s.cadence = manifest.config.cadence;
  s.start = manifest.config.start_time;
  const auto expected = static_cast<std::size_t>(manifest.config.frames_per_machine());
  s.temperature.reserve(expected);
  s.vibration.reserve(expected);
  s.current.reserve(expected);
  s.interactions.reserve(expected);
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  for_each_line(path, [&](const std::string& line) {
    const SensorFrame f = frame_from_json(line);
    if (f.machine_id != machine_id) {
      fail(Errc::kFormat, "frame for " + f.machine_id + " in file of " + machine_id);
    }
    if (f.timestamp != s.time_at(s.size())) {
      fail(Errc::kFormat, "timestamp " + std::to_string(f.timestamp) + " off the cadence grid");
    }
    s.temperature.push_back(f.temperature.value_or(kNaN));
    s.vibration.push_back(f.vibration.value_or(kNaN));
    s.current.push_back(f.current.value_or(kNaN));
    s.interactions.push_back(f.interactions ? static_cast<double>(*f.interactions) : kNaN);
  });
  return s;
}

}  // namespace vendguard::sim
