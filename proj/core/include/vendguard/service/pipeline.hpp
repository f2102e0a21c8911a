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
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "vendguard/learn/metrics.hpp"
#include "vendguard/learn/model_io.hpp"
#include "vendguard/preprocess/dataset.hpp"
#include "vendguard/prognosis/alerts.hpp"
#include "vendguard/prognosis/kpi.hpp"
#include "vendguard/prognosis/policy_sim.hpp"
#include "vendguard/sim/bundle.hpp"

namespace vendguard::service {

// Progress messages from long-running steps.
using Progress = std::function<void(const std::string&)>;

struct FeaturizedBundle {
  sim::BundleManifest manifest;
  std::vector<FaultEvent> events;
  // Labelled windows of every machine, downtime windows removed, grouped by
  // machine in manifest order and chronological within a machine.
  std::vector<prep::FeatureVector> vectors;
  Timestamp start = 0;
  Timestamp end = 0;
};

FeaturizedBundle featurize_bundle(const std::filesystem::path& bundle_dir,
                                  const prep::FeatureConfig& config = {}, int threads = 1,
                                  const Progress& progress = {});

struct TrainConfig {
  prep::FeatureConfig feature;
  learn::ForestConfig forest;
  learn::LstmConfig lstm;
  // Every k-th training sequence is kept for the LSTM.
  std::size_t sequence_stride = 10;
  std::int64_t cadence_seconds = 10;

  std::int64_t sequence_step_seconds() const {
    return static_cast<std::int64_t>(feature.stride) * cadence_seconds;
  }
};

// Forest with stratified bootstrap and LSTM with class weighting.
TrainConfig benchmark_train_config();

learn::ModelArtifact train_rf(const std::vector<prep::FeatureVector>& train, const TrainConfig& config);
learn::ModelArtifact train_lstm(const std::vector<prep::FeatureVector>& train, const TrainConfig& config);

struct Evaluation {
  learn::MetricsReport metrics;
  std::vector<double> scores;
  std::vector<int> labels;
};

// Scores `targets`. An LSTM may use earlier windows from `context` (the
// labelled windows of the same machines) as sequence history; targets
// without a full history are skipped.
Evaluation evaluate_model(const learn::ModelArtifact& model,
                          const std::vector<prep::FeatureVector>& context,
                          const std::vector<prep::FeatureVector>& targets);

// One trace per machine over the whole bundle, scored by `scores` (aligned
// with bundle.vectors; NaN entries are dropped).
std::vector<prognosis::MachineTrace> build_traces(const FeaturizedBundle& bundle,
                                                  const std::vector<double>& scores);

// One alert per excursion of the smoothed probability above the threshold.
std::vector<prognosis::Alert> generate_alerts(const std::vector<prep::FeatureVector>& vectors,
                                              const std::vector<double>& scores,
                                              const learn::FeatureStats& stats,
                                              const prognosis::AlertPolicy& policy = {});

// Training windows plus feedback records. A feedback record for a window
// already in `train` (same machine and end time) overrides its label.
std::vector<prep::FeatureVector> merge_feedback(std::vector<prep::FeatureVector> train,
                                                const std::vector<prep::FeatureVector>& feedback);

struct PipelineConfig {
  std::filesystem::path bundle_dir;
  std::filesystem::path out_dir;
  TrainConfig train = benchmark_train_config();
  std::string policy = "predictive:0.7";
  std::string baseline = "time:14";
  prognosis::RepairModel repair;
  std::uint64_t seed = 42;
  int threads = 1;
  bool with_lstm = true;
};

struct PipelineResult {
  std::size_t vectors = 0;
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
  learn::MetricsReport rf;
  learn::MetricsReport lstm;
  prognosis::KpiComparison kpi;
  double featurize_seconds = 0.0;
  double total_seconds = 0.0;
};

// Featurize, split, train both models, score the test split, replay the
// maintenance policies and write under out_dir:
//   features.csv  model_rf.json  model_lstm.json  predictions.csv
//   metrics.json  kpi.json  report.md  alerts/alerts.jsonl
PipelineResult run_pipeline(const PipelineConfig& config, const Progress& progress = {});

// metrics.json layout (training times included).
std::string metrics_to_json(const learn::MetricsReport& rf, const learn::MetricsReport* lstm);

// predictions.csv: machine_id,window_end_time,label,rf_probability,lstm_probability
void write_predictions_csv(const std::filesystem::path& path,
                           const std::vector<prep::FeatureVector>& vectors,
                           const std::vector<double>& rf, const std::vector<double>& lstm);

}  // namespace vendguard::service
