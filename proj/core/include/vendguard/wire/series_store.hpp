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
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_set>
#include <vector>

#include "vendguard/types.hpp"
#include "vendguard/wire/codec.hpp"

namespace vendguard::wire {

// Append-only per-machine frame log with a time-range index.
//
// Appends to one machine are serialized; different machines proceed
// independently. Readers take a shared lock per machine and therefore always
// observe a prefix of that machine's log.
class SeriesStore {
 public:
  // retention_seconds == 0 keeps everything; otherwise frames older than
  // (newest timestamp - retention) are evicted on append.
  explicit SeriesStore(std::int64_t retention_seconds = 0);

  SeriesStore(const SeriesStore&) = delete;
  SeriesStore& operator=(const SeriesStore&) = delete;

  struct AppendResult {
    AckStatus status = AckStatus::kAccepted;
    std::string reason;
    std::size_t appended = 0;
  };

  // Validates the batch, ignores already-seen sequence numbers and drops
  // frames whose timestamp is not newer than the machine's last frame.
  AppendResult append_batch(const TelemetryBatch& batch);

  // Direct load path (no sequence bookkeeping). Frames must be sorted; ones
  // not newer than the current tail are dropped. Returns frames appended.
  std::size_t append_frames(const MachineId& machine_id, const std::vector<SensorFrame>& frames);
  std::size_t append_series(const MachineSeries& series);

  // All frames with t1 <= timestamp <= t2, ascending. Unknown machine gives an
  // empty result. Throws if t1 > t2.
  std::vector<SensorFrame> query_range(const MachineId& machine_id, Timestamp t1,
                                       Timestamp t2) const;
  std::vector<SensorFrame> dump(const MachineId& machine_id) const;
  std::optional<SensorFrame> latest(const MachineId& machine_id) const;

  std::vector<MachineId> machines() const;
  std::size_t frame_count(const MachineId& machine_id) const;
  std::size_t total_frames() const;

  // JSONL, machines in lexical order, frames ascending.
  void snapshot_jsonl(const std::filesystem::path& path) const;

 private:
  struct Log {
    mutable std::shared_mutex mutex;
    std::deque<SensorFrame> frames;
    std::unordered_set<std::uint64_t> sequences;
  };

  Log* find(const MachineId& machine_id) const;
  Log& find_or_create(const MachineId& machine_id);
  // Caller holds log.mutex exclusively.
  std::size_t append_locked(Log& log, const std::vector<SensorFrame>& frames);

  std::int64_t retention_;
  mutable std::shared_mutex index_mutex_;
  std::map<MachineId, std::unique_ptr<Log>> logs_;
};

}  // namespace vendguard::wire
