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

#include "vendguard/learn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace vendguard::learn {

double gini(std::span<const double> class_counts) {
  double total = 0.0;
  for (double c : class_counts) {
    if (c < 0.0) fail(Errc::kInvalidArgument, "gini: negative class count");
    total += c;
  }
  if (total <= 0.0) fail(Errc::kInvalidArgument, "gini: all class counts are zero");
  double sum_sq = 0.0;
  for (double c : class_counts) sum_sq += (c / total) * (c / total);
  return 1.0 - sum_sq;
}

double gini(double count0, double count1) {
  const double counts[2] = {count0, count1};
  return gini(counts);
}

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    fail(Errc::kInvalidArgument, "scores and labels differ in length");
  }
  if (scores.empty()) fail(Errc::kInvalidArgument, "metrics need at least one sample");
  for (int y : labels) {
    if (y != 0 && y != 1) fail(Errc::kInvalidArgument, "labels must be 0 or 1");
  }
  for (double s : scores) {
    if (std::isnan(s)) fail(Errc::kInvalidArgument, "scores must not be NaN");
  }
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  // Integer bookkeeping; the area is 2 * sum over thresholds of
  // dFP * (TP_before + TP_after), normalised once at the end.
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  long double doubled_area = 0.0L;
  std::size_t i = 0;
  while (i < order.size()) {
    std::uint64_t dtp = 0;
    std::uint64_t dfp = 0;
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      (labels[order[i]] == 1 ? dtp : dfp) += 1;
      ++i;
    }
    doubled_area += static_cast<long double>(dfp) * static_cast<long double>(2 * tp + dtp);
    tp += dtp;
    fp += dfp;
  }
  if (tp == 0 || fp == 0) return 0.5;
  return static_cast<double>(doubled_area /
                             (2.0L * static_cast<long double>(tp) * static_cast<long double>(fp)));
}

MetricsReport compute_metrics(std::span<const double> scores, std::span<const int> labels,
                              double threshold) {
  check_inputs(scores, labels);
  MetricsReport r;
  Confusion& c = r.confusion;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) {
      (predicted ? c.tp : c.fn) += 1;
    } else {
      (predicted ? c.fp : c.tn) += 1;
    }
  }
  const auto ratio = [](std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  r.accuracy = ratio(c.tp + c.tn, c.total());
  r.precision = ratio(c.tp, c.tp + c.fp);
  r.recall = ratio(c.tp, c.tp + c.fn);
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  r.roc_auc = roc_auc(scores, labels);
  return r;
}

}  // namespace vendguard::learn
