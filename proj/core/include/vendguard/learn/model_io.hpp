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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vendguard/learn/forest.hpp"
#include "vendguard/learn/lstm.hpp"
#include "vendguard/preprocess/features.hpp"

namespace vendguard::learn {

// Per-feature training distribution, kept with the model so alerts can say
// which signal moved.
struct FeatureStats {
  prep::FeatureArray mean{};
  prep::FeatureArray stddev{};
  double missing_mean = 0.0;
  double missing_stddev = 0.0;

  bool operator==(const FeatureStats&) const = default;
};

FeatureStats compute_feature_stats(const std::vector<prep::FeatureVector>& vectors);

enum class ModelKind { kRandomForest, kLstm };
std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

struct ModelArtifact {
  ModelKind kind = ModelKind::kRandomForest;
  ForestModel forest;  // when kind == kRandomForest
  LstmModel lstm;      // when kind == kLstm
  prep::FeatureConfig feature_config;
  // Largest gap between consecutive window end times that still counts as
  // contiguous when sequencing for the LSTM.
  std::int64_t sequence_step_seconds = 300;
  FeatureStats stats;
  double training_seconds = 0.0;

  // Hash of the configuration and feature layout, not of the weights.
  std::string fingerprint() const;
};

// Scores aligned with `vectors`. An LSTM leaves NaN where a vector has fewer
// than window - 1 contiguous predecessors.
std::vector<double> predict_vectors(const ModelArtifact& model,
                                    const std::vector<prep::FeatureVector>& vectors);

std::string model_to_json(const ModelArtifact& model);
ModelArtifact model_from_json(const std::string& text);
void save_model(const std::filesystem::path& path, const ModelArtifact& model);
ModelArtifact load_model(const std::filesystem::path& path);

}  // namespace vendguard::learn
