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

#include "vendguard/wire/series_store.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>

#include "vendguard/error.hpp"
#include "vendguard/frame_codec.hpp"

namespace vendguard::wire {

SeriesStore::SeriesStore(std::int64_t retention_seconds) : retention_(retention_seconds) {
  if (retention_seconds < 0) fail(Errc::kInvalidArgument, "retention must be >= 0");
}

SeriesStore::Log* SeriesStore::find(const MachineId& machine_id) const {
  std::shared_lock lock(index_mutex_);
  auto it = logs_.find(machine_id);
  return it == logs_.end() ? nullptr : it->second.get();
}

SeriesStore::Log& SeriesStore::find_or_create(const MachineId& machine_id) {
  if (Log* log = find(machine_id)) return *log;
  std::unique_lock lock(index_mutex_);
  auto& slot = logs_[machine_id];
  if (!slot) slot = std::make_unique<Log>();
  return *slot;
}

std::size_t SeriesStore::append_locked(Log& log, const std::vector<SensorFrame>& frames) {
  std::size_t appended = 0;
  for (const SensorFrame& f : frames) {
    if (!log.frames.empty() && f.timestamp <= log.frames.back().timestamp) continue;
    log.frames.push_back(f);
    ++appended;
  }
  if (retention_ > 0 && !log.frames.empty()) {
    const Timestamp cutoff = log.frames.back().timestamp - retention_;
    while (log.frames.front().timestamp < cutoff) log.frames.pop_front();
  }
  return appended;
}

SeriesStore::AppendResult SeriesStore::append_batch(const TelemetryBatch& batch) {
  AppendResult result;
  if (std::string why = batch_violation(batch); !why.empty()) {
    result.status = AckStatus::kRejected;
    result.reason = std::move(why);
    return result;
  }
  Log& log = find_or_create(batch.machine_id);
  std::unique_lock lock(log.mutex);
  if (!log.sequences.insert(batch.sequence_number).second) {
    result.status = AckStatus::kDuplicateIgnored;
    return result;
  }
  result.appended = append_locked(log, batch.frames);
  return result;
}

std::size_t SeriesStore::append_frames(const MachineId& machine_id,
                                       const std::vector<SensorFrame>& frames) {
  Log& log = find_or_create(machine_id);
  std::unique_lock lock(log.mutex);
  return append_locked(log, frames);
}

std::size_t SeriesStore::append_series(const MachineSeries& series) {
  Log& log = find_or_create(series.machine_id);
  std::unique_lock lock(log.mutex);
  std::size_t first = 0;
  if (retention_ > 0 && series.size() > 0) {
    const Timestamp cutoff = series.time_at(series.size() - 1) - retention_;
    while (first < series.size() && series.time_at(first) < cutoff) ++first;
  }
  std::size_t appended = 0;
  for (std::size_t i = first; i < series.size(); ++i) {
    SensorFrame f = series.frame(i);
    if (!log.frames.empty() && f.timestamp <= log.frames.back().timestamp) continue;
    log.frames.push_back(std::move(f));
    ++appended;
  }
  return appended;
}

std::vector<SensorFrame> SeriesStore::query_range(const MachineId& machine_id, Timestamp t1,
                                                  Timestamp t2) const {
  if (t1 > t2) fail(Errc::kInvalidArgument, "query_range requires t1 <= t2");
  const Log* log = find(machine_id);
  if (!log) return {};
  std::shared_lock lock(log->mutex);
  const auto by_time = [](const SensorFrame& f, Timestamp t) { return f.timestamp < t; };
  auto lo = std::lower_bound(log->frames.begin(), log->frames.end(), t1, by_time);
  auto hi = std::lower_bound(lo, log->frames.end(), t2 + 1, by_time);
  return {lo, hi};
}

std::vector<SensorFrame> SeriesStore::dump(const MachineId& machine_id) const {
  const Log* log = find(machine_id);
  if (!log) return {};
  std::shared_lock lock(log->mutex);
  return {log->frames.begin(), log->frames.end()};
}

std::optional<SensorFrame> SeriesStore::latest(const MachineId& machine_id) const {
  const Log* log = find(machine_id);
  if (!log) return std::nullopt;
  std::shared_lock lock(log->mutex);
  if (log->frames.empty()) return std::nullopt;
  return log->frames.back();
}

std::vector<MachineId> SeriesStore::machines() const {
  std::shared_lock lock(index_mutex_);
  std::vector<MachineId> out;
  for (const auto& [id, log] : logs_) out.push_back(id);
  return out;
}

std::size_t SeriesStore::frame_count(const MachineId& machine_id) const {
  const Log* log = find(machine_id);
  if (!log) return 0;
  std::shared_lock lock(log->mutex);
  return log->frames.size();
}

std::size_t SeriesStore::total_frames() const {
  std::size_t n = 0;
  for (const MachineId& id : machines()) n += frame_count(id);
  return n;
}

void SeriesStore::snapshot_jsonl(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::kIo, "cannot open " + path.string() + " for writing");
  std::string line;
  for (const MachineId& id : machines()) {
    for (const SensorFrame& f : dump(id)) {
      line.clear();
      append_frame_json(line, f);
      line += '\n';
      out << line;
    }
  }
  out.flush();
  if (!out) fail(Errc::kIo, "write failed for " + path.string());
}

}  // namespace vendguard::wire
