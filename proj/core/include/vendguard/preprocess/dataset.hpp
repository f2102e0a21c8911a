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
#include <filesystem>
#include <vector>

#include "vendguard/learn/matrix.hpp"
#include "vendguard/preprocess/features.hpp"
#include "vendguard/types.hpp"

namespace vendguard::prep {

// Label 1 iff a failure of the same machine lies in (end, end + horizon].
// Windows whose [start, end] intersects a [failure, repair] interval are
// dropped. Events need not be sorted.
std::vector<FeatureVector> label_frames(const std::vector<FeatureVector>& vectors,
                                        const std::vector<FaultEvent>& events,
                                        std::int64_t horizon_seconds = 24 * kSecondsPerHour);

// True if the window overlaps downtime of its machine.
bool overlaps_downtime(const FeatureVector& v, const std::vector<FaultEvent>& events);

struct DatasetSplit {
  std::vector<FeatureVector> train;
  std::vector<FeatureVector> validation;
  std::vector<FeatureVector> test;
};

// Chronological per machine: the first round(0.70 n) vectors train, the next
// up to round(0.85 n) validate, the rest test. Output is grouped by machine in
// id order, chronological within a machine.
DatasetSplit split_dataset(std::vector<FeatureVector> vectors, double train_share = 0.70,
                           double validation_share = 0.15);

struct Design {
  learn::Matrix x;
  std::vector<int> y;
};

// Model input rows; throws if any vector is unlabeled.
Design to_design(const std::vector<FeatureVector>& vectors);
learn::Matrix to_matrix(const std::vector<FeatureVector>& vectors);

// CSV: machine_id,window_start_time,window_end_time,<versioned features>,
// missing_fraction,label. Unlabeled rows have an empty label cell.
void write_feature_csv(const std::filesystem::path& path, const std::vector<FeatureVector>& vectors);
std::vector<FeatureVector> read_feature_csv(const std::filesystem::path& path);

}  // namespace vendguard::prep
