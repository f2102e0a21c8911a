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

#include "vendguard/learn/matrix.hpp"
#include "vendguard/rng.hpp"

namespace vendguard::learn {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // x[feature] <= threshold goes left
  int left = -1;
  int right = -1;
  std::uint64_t count0 = 0;  // training samples routed here, by class
  std::uint64_t count1 = 0;

  bool is_leaf() const { return feature < 0; }
  double positive_fraction() const {
    const std::uint64_t n = count0 + count1;
    return n == 0 ? 0.0 : static_cast<double>(count1) / static_cast<double>(n);
  }
  bool operator==(const TreeNode&) const = default;
};

struct TreeConfig {
  int max_depth = 12;
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 0;  // 0 means floor(sqrt(d))

  std::size_t features_per_node(std::size_t d) const;
  bool operator==(const TreeConfig&) const = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t n_features = 0;
  std::uint64_t seed = 0;

  const TreeNode& leaf_for(std::span<const double> x) const;
  // Class-1 fraction of the leaf reached by x.
  double predict_proba(std::span<const double> x) const;
  int depth() const;
  std::size_t leaf_count() const;
};

// Greedy Gini tree. `weights` are per-row integer multiplicities (bootstrap
// counts); empty means every row once. Deterministic given `seed`.
DecisionTree train_tree(const Matrix& x, std::span<const int> y, const TreeConfig& config,
                        std::uint64_t seed, std::span<const std::uint32_t> weights = {});

// Row order sorted by each feature value, shared across trees of a forest.
struct Presorted {
  std::vector<std::vector<std::uint32_t>> order;  // [feature][rank] -> row
};
Presorted presort(const Matrix& x);

DecisionTree train_tree_presorted(const Matrix& x, std::span<const int> y, const Presorted& sorted,
                                  const TreeConfig& config, std::uint64_t seed,
                                  std::span<const std::uint32_t> weights, Rng& rng);

}  // namespace vendguard::learn
