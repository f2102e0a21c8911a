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

#include "vendguard/learn/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "vendguard/error.hpp"

namespace vendguard::learn {

std::size_t TreeConfig::features_per_node(std::size_t d) const {
  if (max_features > 0) return std::min(max_features, d);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
  if (nodes.empty()) fail(Errc::kInvalidArgument, "empty decision tree");
  if (x.size() != n_features) fail(Errc::kIncompatible, "feature dimension mismatch");
  const TreeNode* node = &nodes[0];
  while (!node->is_leaf()) {
    node = &nodes[static_cast<std::size_t>(x[static_cast<std::size_t>(node->feature)] <= node->threshold
                                               ? node->left
                                               : node->right)];
  }
  return *node;
}

double DecisionTree::predict_proba(std::span<const double> x) const {
  return leaf_for(x).positive_fraction();
}

int DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> level(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

Presorted presort(const Matrix& x) {
  if (x.rows > std::numeric_limits<std::uint32_t>::max()) {
    fail(Errc::kOutOfRange, "too many rows for a decision tree");
  }
  Presorted p;
  p.order.resize(x.cols);
  for (std::size_t f = 0; f < x.cols; ++f) {
    auto& order = p.order[f];
    order.resize(x.rows);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return x.at(a, f) < x.at(b, f); });
  }
  return p;
}

namespace {

struct Task {
  std::size_t lo;
  std::size_t hi;
  int depth;
  std::size_t node;
};

}  // namespace

DecisionTree train_tree_presorted(const Matrix& x, std::span<const int> y, const Presorted& sorted,
                                  const TreeConfig& config, std::uint64_t seed,
                                  std::span<const std::uint32_t> weights, Rng& rng) {
  if (x.rows == 0) fail(Errc::kInvalidArgument, "train_tree needs at least one sample");
  if (y.size() != x.rows) fail(Errc::kInvalidArgument, "labels and rows differ in length");
  if (!weights.empty() && weights.size() != x.rows) {
    fail(Errc::kInvalidArgument, "weights and rows differ in length");
  }
  if (sorted.order.size() != x.cols) fail(Errc::kInvalidArgument, "presorted order does not match matrix");
  if (config.max_depth < 0) fail(Errc::kInvalidArgument, "max_depth must be >= 0");
  const std::size_t d = x.cols;
  const std::size_t m = config.features_per_node(d);
  const std::uint64_t min_leaf = std::max<std::size_t>(1, config.min_samples_leaf);
  const auto w = [&](std::uint32_t r) -> std::uint64_t { return weights.empty() ? 1 : weights[r]; };

  std::vector<std::vector<std::uint32_t>> lists(d);
  for (std::size_t f = 0; f < d; ++f) {
    lists[f].reserve(x.rows);
    for (std::uint32_t r : sorted.order[f]) {
      if (w(r) > 0) lists[f].push_back(r);
    }
  }
  const std::size_t n_active = d > 0 ? lists[0].size() : 0;
  if (n_active == 0) fail(Errc::kInvalidArgument, "train_tree: every sample has zero weight");

  DecisionTree tree;
  tree.n_features = d;
  tree.seed = seed;
  tree.nodes.emplace_back();
  std::vector<std::uint8_t> goes_left(x.rows, 0);
  std::vector<std::uint32_t> buffer(n_active);
  std::vector<std::size_t> features(d);
  std::iota(features.begin(), features.end(), 0);

  std::vector<Task> stack{{0, n_active, 0, 0}};
  while (!stack.empty()) {
    const Task task = stack.back();
    stack.pop_back();
    std::uint64_t c0 = 0;
    std::uint64_t c1 = 0;
    for (std::size_t k = task.lo; k < task.hi; ++k) {
      const std::uint32_t r = lists[0][k];
      (y[r] == 1 ? c1 : c0) += w(r);
    }
    tree.nodes[task.node].count0 = c0;
    tree.nodes[task.node].count1 = c1;
    const std::uint64_t n = c0 + c1;
    if (c0 == 0 || c1 == 0 || task.depth >= config.max_depth || n < config.min_samples_split ||
        n < 2 * min_leaf) {
      continue;
    }

    for (std::size_t i = d; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i));
      std::swap(features[i - 1], features[j]);
    }
    double best_score = -1.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::size_t tried = 0;
    for (std::size_t f : features) {
      if (tried == m) break;
      const std::uint32_t* seg = lists[f].data() + task.lo;
      const std::size_t len = task.hi - task.lo;
      if (x.at(seg[0], f) == x.at(seg[len - 1], f)) continue;
      ++tried;
      double l0 = 0.0;
      double l1 = 0.0;
      const double dc0 = static_cast<double>(c0);
      const double dc1 = static_cast<double>(c1);
      const double dn = static_cast<double>(n);
      for (std::size_t k = 0; k + 1 < len; ++k) {
        const std::uint32_t r = seg[k];
        (y[r] == 1 ? l1 : l0) += static_cast<double>(w(r));
        const double v = x.at(r, f);
        const double next = x.at(seg[k + 1], f);
        if (v == next) continue;
        const double nl = l0 + l1;
        const double nr = dn - nl;
        if (nl < static_cast<double>(min_leaf) || nr < static_cast<double>(min_leaf)) continue;
        const double r0 = dc0 - l0;
        const double r1 = dc1 - l1;
        // Maximising this minimises the weighted child Gini.
        const double score = (l0 * l0 + l1 * l1) / nl + (r0 * r0 + r1 * r1) / nr;
        if (score > best_score) {
          best_score = score;
          best_feature = static_cast<int>(f);
          double mid = v + (next - v) / 2.0;
          if (!(mid < next)) mid = v;
          best_threshold = mid;
        }
      }
    }
    if (best_feature < 0) continue;

    const std::size_t bf = static_cast<std::size_t>(best_feature);
    std::size_t n_left = 0;
    for (std::size_t k = task.lo; k < task.hi; ++k) {
      const std::uint32_t r = lists[0][k];
      goes_left[r] = x.at(r, bf) <= best_threshold ? 1 : 0;
      n_left += goes_left[r];
    }
    for (std::size_t f = 0; f < d; ++f) {
      std::uint32_t* seg = lists[f].data();
      std::size_t li = task.lo;
      std::size_t ri = 0;
      for (std::size_t k = task.lo; k < task.hi; ++k) {
        const std::uint32_t r = seg[k];
        if (goes_left[r]) {
          seg[li++] = r;
        } else {
          buffer[ri++] = r;
        }
      }
      std::copy(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(ri), seg + li);
    }
    const std::size_t left = tree.nodes.size();
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[task.node];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = static_cast<int>(left);
    node.right = static_cast<int>(left + 1);
    const std::size_t mid = task.lo + n_left;
    stack.push_back({mid, task.hi, task.depth + 1, left + 1});
    stack.push_back({task.lo, mid, task.depth + 1, left});
  }
  return tree;
}

DecisionTree train_tree(const Matrix& x, std::span<const int> y, const TreeConfig& config,
                        std::uint64_t seed, std::span<const std::uint32_t> weights) {
  Rng rng(seed);
  return train_tree_presorted(x, y, presort(x), config, seed, weights, rng);
}

}  // namespace vendguard::learn
