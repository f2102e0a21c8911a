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

#include <filesystem>
#include <string>
#include <vector>

#include "vendguard/sim/fleet_sim.hpp"
#include "vendguard/types.hpp"

namespace vendguard::sim {

// On-disk dataset bundle:
//   DIR/manifest.json          config, config fingerprint, machine list
//   DIR/events.json            array of FaultEvent
//   DIR/frames/<machine>.jsonl one SensorFrame per line, missing as null
struct BundleManifest {
  SimConfig config;
  std::string fingerprint;
  std::vector<MachineId> machines;
};

// The canonical evaluation fleet: seed 42, 20 machines, 180 days at 10 s.
SimConfig default_benchmark_config();

// Simulates machine by machine and streams each to disk, so memory stays at
// one machine regardless of fleet size. I/O failures carry the path.
BundleManifest generate_benchmark(const SimConfig& config,
                                  const std::filesystem::path& dir);

BundleManifest read_manifest(const std::filesystem::path& dir);
std::vector<FaultEvent> read_events(const std::filesystem::path& dir);
MachineSeries read_machine(const std::filesystem::path& dir,
                           const BundleManifest& manifest,
                           const MachineId& machine_id);

std::string events_to_json(const std::vector<FaultEvent>& events);
std::vector<FaultEvent> events_from_json(const std::string& text);

void write_frames_jsonl(const std::filesystem::path& path, const MachineSeries& series);
void write_frames_jsonl(const std::filesystem::path& path,
                        const std::vector<SensorFrame>& frames);
std::vector<SensorFrame> read_frames_jsonl(const std::filesystem::path& path);

}  // namespace vendguard::sim
