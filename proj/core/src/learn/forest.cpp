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

#include "vendguard/learn/forest.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "vendguard/error.hpp"
#include "vendguard/rng.hpp"

namespace vendguard::learn {

void ForestConfig::validate() const {
  if (trees == 0) fail(Errc::kInvalidArgument, "forest needs at least one tree");
  if (threads < 1) fail(Errc::kInvalidArgument, "threads must be >= 1");
  if (tree.max_depth < 0) fail(Errc::kInvalidArgument, "max_depth must be >= 0");
}

double ForestModel::predict_proba(std::span<const double> x) const {
  if (trees.empty()) fail(Errc::kInvalidArgument, "forest has no trees");
  double sum = 0.0;
  for (const DecisionTree& t : trees) sum += t.predict_proba(x);
  return sum / static_cast<double>(trees.size());
}

namespace {

std::vector<std::uint32_t> bootstrap_weights(std::span<const int> y, bool stratified, Rng& rng) {
  const std::size_t n = y.size();
  std::vector<std::uint32_t> weights(n, 0);
  if (!stratified) {
    for (std::size_t i = 0; i < n; ++i) ++weights[rng.uniform_index(n)];
    return weights;
  }
  std::vector<std::uint32_t> by_class[2];
  for (std::size_t i = 0; i < n; ++i) by_class[y[i] == 1 ? 1 : 0].push_back(static_cast<std::uint32_t>(i));
  for (const auto& rows : by_class) {
    for (std::size_t k = 0; k < rows.size(); ++k) ++weights[rows[rng.uniform_index(rows.size())]];
  }
  return weights;
}

}  // namespace

ForestModel train_forest(const Matrix& x, std::span<const int> y, const ForestConfig& config) {
  config.validate();
  if (x.rows == 0) fail(Errc::kInvalidArgument, "train_forest: empty training set");
  if (y.size() != x.rows) fail(Errc::kInvalidArgument, "labels and rows differ in length");
  ForestModel model;
  model.config = config;
  model.n_features = x.cols;
  model.trees.resize(config.trees);
  const Presorted sorted = presort(x);

  auto grow = [&](std::size_t t) {
    const std::uint64_t seed = config.seed + t;
    Rng rng(seed);
    std::vector<std::uint32_t> weights;
    if (config.bootstrap) weights = bootstrap_weights(y, config.stratified_bootstrap, rng);
    model.trees[t] = train_tree_presorted(x, y, sorted, config.tree, seed, weights, rng);
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), config.trees);
  if (workers <= 1) {
    for (std::size_t t = 0; t < config.trees; ++t) grow(t);
    return model;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t t = next++; t < config.trees; t = next++) {
        try {
          grow(t);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return model;
}

Prediction forest_predict(const ForestModel& model, std::span<const double> x) {
  Prediction p;
  p.probability = model.predict_proba(x);
  p.label = p.probability >= 0.5 ? 1 : 0;
  return p;
}

std::vector<double> forest_predict_proba(const ForestModel& model, const Matrix& x) {
  std::vector<double> out(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r) out[r] = model.predict_proba(x.row(r));
  return out;
}

}  // namespace vendguard::learn
