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
#include <functional>
#include <span>
#include <vector>

#include "vendguard/error.hpp"

namespace vendguard::learn {

// 1 - sum p_c^2. Throws if every count is zero.
double gini(std::span<const double> class_counts);
double gini(double count0, double count1);

struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  bool operator==(const Confusion&) const = default;
};

struct MetricsReport {
  Confusion confusion;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double roc_auc = 0.5;
  double training_seconds = 0.0;
};

// Predicted label is 1 iff score >= threshold. Precision and recall are 0
// when their denominator is 0.
MetricsReport compute_metrics(std::span<const double> scores, std::span<const int> labels,
                              double threshold = 0.5);

// Area under the ROC curve by trapezoids over all distinct score thresholds.
// Ties contribute one half. Returns 0.5 if either class is absent.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

template <typename Params>
struct GridResult {
  std::size_t best_index = 0;
  Params best;
  std::vector<double> scores;  // one per grid point, grid order
};

// Evaluates every grid point and returns the argmax; the earliest point wins
// ties.
template <typename Params>
GridResult<Params> grid_search(const std::vector<Params>& grid,
                               const std::function<double(const Params&)>& evaluate) {
  if (grid.empty()) fail(Errc::kInvalidArgument, "grid_search needs a non-empty grid");
  GridResult<Params> result;
  result.scores.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    result.scores.push_back(evaluate(grid[i]));
    if (result.scores[i] > result.scores[result.best_index]) result.best_index = i;
  }
  result.best = grid[result.best_index];
  return result;
}

}  // namespace vendguard::learn
