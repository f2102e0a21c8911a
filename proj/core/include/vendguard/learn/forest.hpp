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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vendguard/learn/decision_tree.hpp"
#include "vendguard/learn/matrix.hpp"

namespace vendguard::learn {

struct ForestConfig {
  std::size_t trees = 100;
  TreeConfig tree;
  bool bootstrap = true;
  // Resample each class separately so every bootstrap keeps the class counts.
  bool stratified_bootstrap = false;
  std::uint64_t seed = 42;
  int threads = 1;

  void validate() const;
  bool operator==(const ForestConfig&) const = default;
};

struct ForestModel {
  ForestConfig config;
  std::size_t n_features = 0;
  std::vector<DecisionTree> trees;

  double predict_proba(std::span<const double> x) const;
};

struct Prediction {
  int label = 0;
  double probability = 0.0;
};

// Tree t is grown from seed config.seed + t; output does not depend on
// config.threads.
ForestModel train_forest(const Matrix& x, std::span<const int> y, const ForestConfig& config = {});

// Label is 1 iff probability >= 0.5.
Prediction forest_predict(const ForestModel& model, std::span<const double> x);
std::vector<double> forest_predict_proba(const ForestModel& model, const Matrix& x);

}  // namespace vendguard::learn
