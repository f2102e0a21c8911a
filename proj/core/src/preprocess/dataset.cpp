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

#include "vendguard/preprocess/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>

#include "vendguard/error.hpp"

namespace vendguard::prep {

namespace {

using EventIndex = std::unordered_map<MachineId, std::vector<const FaultEvent*>>;

EventIndex index_events(const std::vector<FaultEvent>& events) {
  EventIndex index;
  for (const FaultEvent& e : events) index[e.machine_id].push_back(&e);
  for (auto& [id, list] : index) {
    std::sort(list.begin(), list.end(), [](const FaultEvent* a, const FaultEvent* b) {
      return a->failure_time < b->failure_time;
    });
  }
  return index;
}

bool in_downtime(const FeatureVector& v, const std::vector<const FaultEvent*>& events) {
  for (const FaultEvent* e : events) {
    if (v.window_start_time <= e->repair_time && e->failure_time <= v.window_end_time) return true;
  }
  return false;
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, r.ptr);
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t begin = 0;
  for (;;) {
    const std::size_t comma = line.find(',', begin);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(begin));
      return cells;
    }
    cells.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
}

template <typename T>
T parse_cell(std::string_view cell, const std::string& where) {
  T value{};
  const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (r.ec != std::errc() || r.ptr != cell.data() + cell.size()) {
    fail(Errc::kFormat, where + ": cannot parse '" + std::string(cell) + "'");
  }
  return value;
}

std::string csv_header() {
  std::string h = "machine_id,window_start_time,window_end_time";
  for (std::size_t i = 0; i < kFeatureCount; ++i) h += "," + versioned_feature_name(i);
  h += ",missing_fraction,label";
  return h;
}

}  // namespace

bool overlaps_downtime(const FeatureVector& v, const std::vector<FaultEvent>& events) {
  for (const FaultEvent& e : events) {
    if (e.machine_id == v.machine_id && v.window_start_time <= e.repair_time &&
        e.failure_time <= v.window_end_time) {
      return true;
    }
  }
  return false;
}

std::vector<FeatureVector> label_frames(const std::vector<FeatureVector>& vectors,
                                        const std::vector<FaultEvent>& events,
                                        std::int64_t horizon_seconds) {
  if (horizon_seconds <= 0) fail(Errc::kInvalidArgument, "label horizon must be positive");
  const EventIndex index = index_events(events);
  static const std::vector<const FaultEvent*> kNone;
  std::vector<FeatureVector> out;
  out.reserve(vectors.size());
  for (const FeatureVector& v : vectors) {
    auto it = index.find(v.machine_id);
    const auto& mine = it == index.end() ? kNone : it->second;
    if (in_downtime(v, mine)) continue;
    FeatureVector labeled = v;
    labeled.label = 0;
    const auto next = std::upper_bound(
        mine.begin(), mine.end(), v.window_end_time,
        [](Timestamp t, const FaultEvent* e) { return t < e->failure_time; });
    if (next != mine.end() && (*next)->failure_time <= v.window_end_time + horizon_seconds) {
      labeled.label = 1;
    }
    out.push_back(std::move(labeled));
  }
  return out;
}

DatasetSplit split_dataset(std::vector<FeatureVector> vectors, double train_share,
                           double validation_share) {
  if (vectors.size() < 10) fail(Errc::kInvalidArgument, "split_dataset needs at least 10 vectors");
  if (!(train_share > 0.0 && validation_share >= 0.0 && train_share + validation_share <= 1.0)) {
    fail(Errc::kInvalidArgument, "invalid split proportions");
  }
  std::sort(vectors.begin(), vectors.end(), [](const FeatureVector& a, const FeatureVector& b) {
    if (a.machine_id != b.machine_id) return a.machine_id < b.machine_id;
    return a.window_end_time < b.window_end_time;
  });
  DatasetSplit split;
  std::size_t begin = 0;
  while (begin < vectors.size()) {
    std::size_t end = begin;
    while (end < vectors.size() && vectors[end].machine_id == vectors[begin].machine_id) ++end;
    const double n = static_cast<double>(end - begin);
    const std::size_t cut1 = begin + static_cast<std::size_t>(std::llround(train_share * n));
    const std::size_t cut2 =
        begin + static_cast<std::size_t>(std::llround((train_share + validation_share) * n));
    for (std::size_t i = begin; i < end; ++i) {
      auto& dest = i < cut1 ? split.train : (i < cut2 ? split.validation : split.test);
      dest.push_back(std::move(vectors[i]));
    }
    begin = end;
  }
  return split;
}

learn::Matrix to_matrix(const std::vector<FeatureVector>& vectors) {
  learn::Matrix x(vectors.size(), kFeatureCount);
  for (std::size_t r = 0; r < vectors.size(); ++r) {
    std::copy(vectors[r].features.begin(), vectors[r].features.end(), x.row(r).begin());
  }
  return x;
}

Design to_design(const std::vector<FeatureVector>& vectors) {
  Design d;
  d.x = to_matrix(vectors);
  d.y.reserve(vectors.size());
  for (const FeatureVector& v : vectors) {
    if (v.label != 0 && v.label != 1) fail(Errc::kInvalidArgument, "unlabeled feature vector");
    d.y.push_back(v.label);
  }
  return d;
}

void write_feature_csv(const std::filesystem::path& path, const std::vector<FeatureVector>& vectors) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::kIo, "cannot open " + path.string() + " for writing");
  std::string line = csv_header();
  line += '\n';
  out << line;
  for (const FeatureVector& v : vectors) {
    line.clear();
    line += v.machine_id;
    line += ',';
    line += std::to_string(v.window_start_time);
    line += ',';
    line += std::to_string(v.window_end_time);
    for (double f : v.features) {
      line += ',';
      append_number(line, f);
    }
    line += ',';
    append_number(line, v.missing_fraction);
    line += ',';
    if (v.label >= 0) line += std::to_string(v.label);
    line += '\n';
    out << line;
  }
  out.flush();
  if (!out) fail(Errc::kIo, "write failed for " + path.string());
}

std::vector<FeatureVector> read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) fail(Errc::kFormat, path.string() + ": empty feature file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != csv_header()) {
    fail(Errc::kIncompatible, path.string() + ": feature header does not match v" +
                                  std::to_string(kFeatureVersion) + " layout");
  }
  std::vector<FeatureVector> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto cells = split_csv(line);
    if (cells.size() != kFeatureCount + 5) fail(Errc::kFormat, where + ": wrong column count");
    FeatureVector v;
    v.machine_id = std::string(cells[0]);
    v.window_start_time = parse_cell<Timestamp>(cells[1], where);
    v.window_end_time = parse_cell<Timestamp>(cells[2], where);
    for (std::size_t i = 0; i < kFeatureCount; ++i) v.features[i] = parse_cell<double>(cells[3 + i], where);
    v.missing_fraction = parse_cell<double>(cells[3 + kFeatureCount], where);
    const auto label = cells[4 + kFeatureCount];
    v.label = label.empty() ? -1 : parse_cell<int>(label, where);
    if (v.label < -1 || v.label > 1) fail(Errc::kFormat, where + ": label must be 0 or 1");
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace vendguard::prep
