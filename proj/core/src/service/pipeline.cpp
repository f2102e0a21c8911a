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

#include "vendguard/service/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "vendguard/error.hpp"
#include "vendguard/frame_codec.hpp"
#include "vendguard/service/report.hpp"

namespace vendguard::service {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string window_key(const MachineId& id, Timestamp end) { return id + '#' + std::to_string(end); }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::kIo, "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) fail(Errc::kIo, "write failed for " + path.string());
}

void note(const Progress& progress, const std::string& message) {
  if (progress) progress(message);
}

}  // namespace

FeaturizedBundle featurize_bundle(const std::filesystem::path& bundle_dir,
                                  const prep::FeatureConfig& config, int threads,
                                  const Progress& progress) {
  config.validate();
  FeaturizedBundle out;
  out.manifest = sim::read_manifest(bundle_dir);
  out.events = sim::read_events(bundle_dir);
  out.start = out.manifest.config.start_time;
  out.end = out.start + out.manifest.config.horizon;
  const std::size_t n = out.manifest.machines.size();
  std::vector<std::vector<prep::FeatureVector>> per_machine(n);

  auto work = [&](std::size_t i) {
    const MachineSeries series = sim::read_machine(bundle_dir, out.manifest, out.manifest.machines[i]);
    per_machine[i] = prep::label_frames(prep::featurize_machine(series, config), out.events,
                                        config.horizon_seconds);
  };
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      work(i);
      note(progress, "featurized " + out.manifest.machines[i] + " (" + std::to_string(per_machine[i].size()) + " windows)");
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            work(i);
          } catch (...) {
            std::lock_guard lock(mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }
  std::size_t total = 0;
  for (const auto& v : per_machine) total += v.size();
  out.vectors.reserve(total);
  for (auto& v : per_machine) {
    std::move(v.begin(), v.end(), std::back_inserter(out.vectors));
    v.clear();
    v.shrink_to_fit();
  }
  return out;
}

TrainConfig benchmark_train_config() {
  TrainConfig c;
  c.forest.stratified_bootstrap = true;
  c.lstm.class_weighted = true;
  return c;
}

learn::ModelArtifact train_rf(const std::vector<prep::FeatureVector>& train, const TrainConfig& config) {
  if (train.empty()) fail(Errc::kInvalidArgument, "no training windows");
  const prep::Design design = prep::to_design(train);
  learn::ModelArtifact m;
  m.kind = learn::ModelKind::kRandomForest;
  m.feature_config = config.feature;
  m.sequence_step_seconds = config.sequence_step_seconds();
  m.stats = learn::compute_feature_stats(train);
  const auto t0 = std::chrono::steady_clock::now();
  m.forest = learn::train_forest(design.x, design.y, config.forest);
  m.training_seconds = seconds_since(t0);
  return m;
}

learn::ModelArtifact train_lstm(const std::vector<prep::FeatureVector>& train, const TrainConfig& config) {
  const learn::Sequences all =
      learn::make_sequences(train, config.lstm.window, config.sequence_step_seconds());
  learn::Sequences picked;
  picked.window = all.window;
  picked.input_size = all.input_size;
  const std::size_t stride = std::max<std::size_t>(config.sequence_stride, 1);
  for (std::size_t i = 0; i < all.size(); i += stride) {
    picked.push(all.sequence(i), all.labels[i], all.target[i]);
  }
  if (picked.size() == 0) fail(Errc::kInvalidArgument, "no contiguous training sequences for the LSTM");
  learn::ModelArtifact m;
  m.kind = learn::ModelKind::kLstm;
  m.feature_config = config.feature;
  m.sequence_step_seconds = config.sequence_step_seconds();
  m.stats = learn::compute_feature_stats(train);
  const auto t0 = std::chrono::steady_clock::now();
  m.lstm = learn::lstm_train(picked, config.lstm);
  m.training_seconds = seconds_since(t0);
  return m;
}

Evaluation evaluate_model(const learn::ModelArtifact& model,
                          const std::vector<prep::FeatureVector>& context,
                          const std::vector<prep::FeatureVector>& targets) {
  Evaluation e;
  std::vector<double> raw;
  if (model.kind == learn::ModelKind::kRandomForest) {
    raw = learn::predict_vectors(model, targets);
  } else {
    const std::vector<double> scored = learn::predict_vectors(model, context);
    std::unordered_map<std::string, double> by_key;
    by_key.reserve(context.size());
    for (std::size_t i = 0; i < context.size(); ++i) {
      by_key.emplace(window_key(context[i].machine_id, context[i].window_end_time), scored[i]);
    }
    raw.assign(targets.size(), std::nan(""));
    for (std::size_t i = 0; i < targets.size(); ++i) {
      auto it = by_key.find(window_key(targets[i].machine_id, targets[i].window_end_time));
      if (it != by_key.end()) raw[i] = it->second;
    }
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (std::isnan(raw[i])) continue;
    if (targets[i].label != 0 && targets[i].label != 1) fail(Errc::kInvalidArgument, "unlabeled target window");
    e.scores.push_back(raw[i]);
    e.labels.push_back(targets[i].label);
  }
  if (e.scores.empty()) fail(Errc::kInvalidArgument, "no scorable target windows");
  e.metrics = learn::compute_metrics(e.scores, e.labels);
  e.metrics.training_seconds = model.training_seconds;
  return e;
}

std::vector<prognosis::MachineTrace> build_traces(const FeaturizedBundle& bundle,
                                                  const std::vector<double>& scores) {
  if (scores.size() != bundle.vectors.size()) fail(Errc::kInvalidArgument, "scores not aligned with windows");
  std::unordered_map<MachineId, std::size_t> slot;
  std::vector<prognosis::MachineTrace> traces;
  for (const MachineId& id : bundle.manifest.machines) {
    slot[id] = traces.size();
    prognosis::MachineTrace t;
    t.machine_id = id;
    t.start = bundle.start;
    t.end = bundle.end;
    traces.push_back(std::move(t));
  }
  for (const FaultEvent& e : bundle.events) {
    auto it = slot.find(e.machine_id);
    if (it != slot.end()) traces[it->second].events.push_back(e);
  }
  for (std::size_t i = 0; i < bundle.vectors.size(); ++i) {
    if (std::isnan(scores[i])) continue;
    const prep::FeatureVector& v = bundle.vectors[i];
    auto it = slot.find(v.machine_id);
    if (it == slot.end()) fail(Errc::kInvalidArgument, "window of unknown machine " + v.machine_id);
    traces[it->second].windows.push_back({v.window_end_time, scores[i], v.label});
  }
  for (auto& t : traces) {
    std::sort(t.windows.begin(), t.windows.end(),
              [](const prognosis::ReplayWindow& a, const prognosis::ReplayWindow& b) {
                return a.end_time < b.end_time;
              });
  }
  return traces;
}

std::vector<prognosis::Alert> generate_alerts(const std::vector<prep::FeatureVector>& vectors,
                                              const std::vector<double>& scores,
                                              const learn::FeatureStats& stats,
                                              const prognosis::AlertPolicy& policy) {
  if (scores.size() != vectors.size()) fail(Errc::kInvalidArgument, "scores not aligned with windows");
  std::vector<std::size_t> order(vectors.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (vectors[a].machine_id != vectors[b].machine_id) return vectors[a].machine_id < vectors[b].machine_id;
    return vectors[a].window_end_time < vectors[b].window_end_time;
  });
  std::vector<prognosis::Alert> alerts;
  std::vector<prognosis::ScoredWindow> recent;
  bool active = false;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    if (k > 0 && vectors[order[k - 1]].machine_id != vectors[i].machine_id) {
      recent.clear();
      active = false;
    }
    if (std::isnan(scores[i])) continue;
    recent.push_back({vectors[i], scores[i]});
    if (recent.size() > policy.smoothing) recent.erase(recent.begin());
    const double p = prognosis::smoothed_probability(recent, policy.smoothing);
    if (p < policy.threshold) {
      active = false;
      continue;
    }
    if (active) continue;
    if (auto alert = prognosis::make_alert(vectors[i].machine_id, recent, stats, policy)) {
      alerts.push_back(std::move(*alert));
      active = true;
    }
  }
  return alerts;
}

std::vector<prep::FeatureVector> merge_feedback(std::vector<prep::FeatureVector> train,
                                                const std::vector<prep::FeatureVector>& feedback) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    index.emplace(window_key(train[i].machine_id, train[i].window_end_time), i);
  }
  for (const prep::FeatureVector& f : feedback) {
    if (f.label != 0 && f.label != 1) fail(Errc::kInvalidArgument, "feedback record without a label");
    auto it = index.find(window_key(f.machine_id, f.window_end_time));
    if (it != index.end()) {
      train[it->second].label = f.label;
    } else {
      index.emplace(window_key(f.machine_id, f.window_end_time), train.size());
      train.push_back(f);
    }
  }
  return train;
}

std::string metrics_to_json(const learn::MetricsReport& rf, const learn::MetricsReport* lstm) {
  const auto value = [](const learn::MetricsReport& m) {
    return json{{"accuracy", m.accuracy},
                {"precision", m.precision},
                {"recall", m.recall},
                {"f1", m.f1},
                {"roc_auc", m.roc_auc},
                {"tp", m.confusion.tp},
                {"fp", m.confusion.fp},
                {"tn", m.confusion.tn},
                {"fn", m.confusion.fn},
                {"training_seconds", m.training_seconds}};
  };
  json j;
  j["format"] = "vendguard-metrics";
  j["version"] = 1;
  j["random_forest"] = value(rf);
  if (lstm) j["lstm"] = value(*lstm);
  return j.dump(2);
}

void write_predictions_csv(const std::filesystem::path& path,
                           const std::vector<prep::FeatureVector>& vectors,
                           const std::vector<double>& rf, const std::vector<double>& lstm) {
  if (rf.size() != vectors.size() || (!lstm.empty() && lstm.size() != vectors.size())) {
    fail(Errc::kInvalidArgument, "predictions not aligned with windows");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::kIo, "cannot open " + path.string() + " for writing");
  std::string line = "machine_id,window_end_time,label,rf_probability,lstm_probability\n";
  out << line;
  char buf[32];
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    line.clear();
    line += vectors[i].machine_id;
    line += ',';
    line += std::to_string(vectors[i].window_end_time);
    line += ',';
    line += std::to_string(vectors[i].label);
    line += ',';
    line.append(buf, std::to_chars(buf, buf + sizeof(buf), rf[i]).ptr);
    line += ',';
    if (!lstm.empty() && !std::isnan(lstm[i])) line.append(buf, std::to_chars(buf, buf + sizeof(buf), lstm[i]).ptr);
    line += '\n';
    out << line;
  }
  out.flush();
  if (!out) fail(Errc::kIo, "write failed for " + path.string());
}

PipelineResult run_pipeline(const PipelineConfig& config, const Progress& progress) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::filesystem::path& out = config.out_dir;
  std::filesystem::create_directories(out);
  PipelineResult result;

  FeaturizedBundle bundle = featurize_bundle(config.bundle_dir, config.train.feature, config.threads, progress);
  result.featurize_seconds = seconds_since(t0);
  result.vectors = bundle.vectors.size();
  note(progress, "featurized " + std::to_string(result.vectors) + " windows");
  prep::write_feature_csv(out / "features.csv", bundle.vectors);

  TrainConfig train_config = config.train;
  train_config.cadence_seconds = bundle.manifest.config.cadence;
  const prep::DatasetSplit split = prep::split_dataset(bundle.vectors);
  result.train = split.train.size();
  result.validation = split.validation.size();
  result.test = split.test.size();

  const learn::ModelArtifact rf = train_rf(split.train, train_config);
  note(progress, "trained random forest in " + std::to_string(rf.training_seconds) + " s");
  learn::save_model(out / "model_rf.json", rf);
  const Evaluation rf_eval = evaluate_model(rf, bundle.vectors, split.test);
  result.rf = rf_eval.metrics;
  const std::vector<double> rf_all = learn::predict_vectors(rf, bundle.vectors);

  std::vector<double> lstm_all;
  if (config.with_lstm) {
    const learn::ModelArtifact lstm = train_lstm(split.train, train_config);
    note(progress, "trained LSTM in " + std::to_string(lstm.training_seconds) + " s");
    learn::save_model(out / "model_lstm.json", lstm);
    result.lstm = evaluate_model(lstm, bundle.vectors, split.test).metrics;
    lstm_all = learn::predict_vectors(lstm, bundle.vectors);
  }
  write_predictions_csv(out / "predictions.csv", bundle.vectors, rf_all, lstm_all);
  write_file(out / "metrics.json", metrics_to_json(result.rf, config.with_lstm ? &result.lstm : nullptr));

  const auto traces = build_traces(bundle, rf_all);
  const auto policy = prognosis::MaintenancePolicy::parse(config.policy);
  const auto baseline = prognosis::MaintenancePolicy::parse(config.baseline);
  const auto predictive_run = prognosis::run_policy_sim(traces, policy, config.repair, config.seed);
  const auto baseline_run = prognosis::run_policy_sim(traces, baseline, config.repair, config.seed);
  result.kpi = prognosis::compare_kpis(prognosis::compute_kpis(predictive_run),
                                       prognosis::compute_kpis(baseline_run));
  const std::string fingerprint =
      fingerprint_hex(bundle.manifest.fingerprint + rf.fingerprint() + policy.describe() + baseline.describe());
  const std::string kpi_text = prognosis::kpi_to_json(result.kpi, fingerprint);
  write_file(out / "kpi.json", kpi_text);

  std::filesystem::remove_all(out / "alerts");
  prognosis::AlertStore store(out / "alerts");
  for (const auto& alert : generate_alerts(split.test, rf_eval.scores, rf.stats)) store.add(alert);

  write_file(out / "report.md",
             render_report(metrics_to_json(result.rf, config.with_lstm ? &result.lstm : nullptr), kpi_text));
  result.total_seconds = seconds_since(t0);
  return result;
}

}  // namespace vendguard::service
