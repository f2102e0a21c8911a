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

// vendguard: simulate, ingest, featurize, train, evaluate and serve.

#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "vendguard/error.hpp"
#include "vendguard/frame_codec.hpp"
#include "vendguard/learn/model_io.hpp"
#include "vendguard/preprocess/dataset.hpp"
#include "vendguard/service/api_server.hpp"
#include "vendguard/service/pipeline.hpp"
#include "vendguard/service/report.hpp"
#include "vendguard/sim/bundle.hpp"
#include "vendguard/wire/ingest_server.hpp"
#include "vendguard/wire/series_store.hpp"
#include "vendguard/wire/telemetry_client.hpp"

namespace fs = std::filesystem;
using namespace vendguard;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::kIo, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out.flush()) fail(Errc::kIo, "write failed for " + path.string());
}

void progress(const std::string& message) { spdlog::info("{}", message); }

struct SimulateArgs {
  fs::path out = "bundle";
  int machines = 20;
  double days = 180;
  std::int64_t cadence = 10;
  std::uint64_t seed = 42;
};

struct IngestArgs {
  fs::path bundle = "bundle";
  std::string host = "127.0.0.1";
  int port = 0;
  std::size_t batch = wire::kMaxFramesPerBatch;
  bool raw = false;
  fs::path snapshot;
};

struct TrainArgs {
  std::string model = "rf";
  fs::path features = "features.csv";
  std::uint64_t seed = 42;
  fs::path out = "model.json";
  std::int64_t cadence = 10;
  int threads = 1;
};

struct EvalArgs {
  fs::path model = "model.json";
  fs::path features = "features.csv";
  fs::path report = "report.json";
};

struct EvaluateArgs {
  fs::path bundle = "bundle";
  fs::path model = "model.json";
  std::string policy = "predictive:0.7";
  std::string baseline = "time:14";
  std::uint64_t seed = 42;
  fs::path out = "kpi.json";
  int threads = 1;
};

struct RetrainArgs {
  fs::path features = "features.csv";
  fs::path feedback = "alerts/feedback_labels.jsonl";
  std::string model = "rf";
  std::uint64_t seed = 42;
  std::int64_t cadence = 10;
  fs::path out = "model_retrained.json";
};

struct ReportArgs {
  fs::path kpi = "kpi.json";
  fs::path metrics;
  fs::path out;
};

struct PipelineArgs {
  fs::path bundle = "bundle";
  fs::path out = "out";
  std::string policy = "predictive:0.7";
  std::string baseline = "time:14";
  std::uint64_t seed = 42;
  int threads = 1;
  bool no_lstm = false;
  bool simulate = false;
};

int cmd_simulate(const SimulateArgs& a) {
  sim::SimConfig config = sim::default_benchmark_config();
  config.machine_count = a.machines;
  config.horizon = static_cast<std::int64_t>(a.days * kSecondsPerDay);
  config.cadence = a.cadence;
  config.seed = a.seed;
  config.validate();
  const auto manifest = sim::generate_benchmark(config, a.out);
  spdlog::info("wrote {} machines to {} (fingerprint {})", manifest.machines.size(), a.out.string(),
               manifest.fingerprint);
  return 0;
}

int cmd_ingest(const IngestArgs& a) {
  const auto manifest = sim::read_manifest(a.bundle);
  wire::SeriesStore store;
  std::unique_ptr<wire::IngestServer> local;
  std::uint16_t port = static_cast<std::uint16_t>(a.port);
  if (a.port == 0) {
    local = std::make_unique<wire::IngestServer>(store, a.host, 0);
    local->start();
    port = local->port();
  }
  std::uint64_t accepted = 0, duplicates = 0, rejected = 0;
  wire::TelemetryClient client(a.host, port);
  for (const MachineId& id : manifest.machines) {
    const MachineSeries series = sim::read_machine(a.bundle, manifest, id);
    for (const auto& batch : wire::make_batches(series.frames(), 0, a.batch, !a.raw)) {
      const wire::Ack ack = client.send(batch);
      if (ack.status == wire::AckStatus::kAccepted) ++accepted;
      else if (ack.status == wire::AckStatus::kDuplicateIgnored) ++duplicates;
      else {
        ++rejected;
        spdlog::error("batch {} of {} rejected: {}", batch.sequence_number, id, ack.reason);
        client.connect(a.host, port);
      }
    }
  }
  client.close();
  if (local) {
    local->stop();
    spdlog::info("stored {} frames", store.total_frames());
    if (!a.snapshot.empty()) store.snapshot_jsonl(a.snapshot);
  }
  spdlog::info("batches accepted={} duplicate={} rejected={}", accepted, duplicates, rejected);
  return rejected == 0 ? 0 : 1;
}

service::TrainConfig train_config(std::uint64_t seed, std::int64_t cadence) {
  service::TrainConfig c = service::benchmark_train_config();
  c.forest.seed = seed;
  c.lstm.seed = seed;
  c.cadence_seconds = cadence;
  return c;
}

learn::ModelArtifact train_kind(const std::string& kind, const std::vector<prep::FeatureVector>& train,
                                const service::TrainConfig& config) {
  if (learn::model_kind_from_string(kind) == learn::ModelKind::kRandomForest) {
    return service::train_rf(train, config);
  }
  return service::train_lstm(train, config);
}

int cmd_train(const TrainArgs& a) {
  const auto split = prep::split_dataset(prep::read_feature_csv(a.features));
  auto config = train_config(a.seed, a.cadence);
  config.forest.threads = a.threads;
  const auto model = train_kind(a.model, split.train, config);
  learn::save_model(a.out, model);
  spdlog::info("trained {} on {} windows in {:.2f} s -> {}", a.model, split.train.size(),
               model.training_seconds, a.out.string());
  return 0;
}

int cmd_eval(const EvalArgs& a) {
  const auto model = learn::load_model(a.model);
  const auto vectors = prep::read_feature_csv(a.features);
  const auto split = prep::split_dataset(vectors);
  const auto e = service::evaluate_model(model, vectors, split.test);
  nlohmann::json j = nlohmann::json::parse(service::metrics_to_json(e.metrics, nullptr))["random_forest"];
  j["model"] = learn::to_string(model.kind);
  j["windows"] = e.scores.size();
  const std::string text = j.dump(2);
  write_text(a.report, text);
  std::cout << text << '\n';
  return 0;
}

int cmd_evaluate(const EvaluateArgs& a) {
  const auto model = learn::load_model(a.model);
  const auto bundle = service::featurize_bundle(a.bundle, model.feature_config, a.threads, progress);
  const auto scores = learn::predict_vectors(model, bundle.vectors);
  const auto traces = service::build_traces(bundle, scores);
  const auto policy = prognosis::MaintenancePolicy::parse(a.policy);
  const auto baseline = prognosis::MaintenancePolicy::parse(a.baseline);
  const prognosis::RepairModel repair;
  const auto cmp = prognosis::compare_kpis(
      prognosis::compute_kpis(prognosis::run_policy_sim(traces, policy, repair, a.seed)),
      prognosis::compute_kpis(prognosis::run_policy_sim(traces, baseline, repair, a.seed)));
  const std::string fingerprint = fingerprint_hex(bundle.manifest.fingerprint + model.fingerprint() +
                                                  policy.describe() + baseline.describe());
  write_text(a.out, prognosis::kpi_to_json(cmp, fingerprint));
  spdlog::info("downtime reduction {:.1f}%, dispatch reduction {:.1f}%", 100 * cmp.downtime_reduction,
               100 * cmp.dispatch_reduction);
  return 0;
}

int cmd_retrain(const RetrainArgs& a) {
  const auto split = prep::split_dataset(prep::read_feature_csv(a.features));
  const auto feedback = prognosis::read_feedback_labels(a.feedback);
  const auto merged = service::merge_feedback(split.train, feedback);
  const auto model = train_kind(a.model, merged, train_config(a.seed, a.cadence));
  learn::save_model(a.out, model);
  spdlog::info("retrained {} with {} feedback records -> {}", a.model, feedback.size(), a.out.string());
  return 0;
}

int cmd_serve(service::ServiceConfig config) {
  config.apply_environment();
  service::ApiServer server(std::move(config));
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.start();
  while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(200));
  server.stop();
  return 0;
}

int cmd_report(const ReportArgs& a) {
  const std::string metrics = a.metrics.empty() ? std::string() : read_text(a.metrics);
  const std::string text = service::render_report(metrics, read_text(a.kpi));
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(a.out, text);
  }
  return 0;
}

int cmd_pipeline(const PipelineArgs& a) {
  if (a.simulate || !fs::exists(a.bundle / "manifest.json")) {
    spdlog::info("generating benchmark bundle in {}", a.bundle.string());
    sim::generate_benchmark(sim::default_benchmark_config(), a.bundle);
  }
  service::PipelineConfig config;
  config.bundle_dir = a.bundle;
  config.out_dir = a.out;
  config.policy = a.policy;
  config.baseline = a.baseline;
  config.seed = a.seed;
  config.threads = a.threads;
  config.train.forest.seed = a.seed;
  config.train.lstm.seed = a.seed;
  config.train.forest.threads = a.threads;
  config.with_lstm = !a.no_lstm;
  const auto r = service::run_pipeline(config, progress);
  spdlog::info("rf accuracy {:.3f} f1 {:.3f}; downtime reduction {:.1f}%; dispatch reduction {:.1f}%; {:.0f} s",
               r.rf.accuracy, r.rf.f1, 100 * r.kpi.downtime_reduction, 100 * r.kpi.dispatch_reduction,
               r.total_seconds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vendguard: predictive maintenance testbed for vending fleets"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Generate a telemetry bundle");
  simulate->add_option("--out", sim_args.out, "Bundle directory")->capture_default_str();
  simulate->add_option("--machines", sim_args.machines, "Fleet size")->capture_default_str();
  simulate->add_option("--days", sim_args.days, "Horizon in days")->capture_default_str();
  simulate->add_option("--cadence", sim_args.cadence, "Sampling interval in seconds")->capture_default_str();
  simulate->add_option("--seed", sim_args.seed, "Random seed")->capture_default_str();

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest-replay", "Replay a bundle over the wire protocol");
  ingest->add_option("--bundle", ingest_args.bundle, "Bundle directory")->capture_default_str();
  ingest->add_option("--host", ingest_args.host, "Ingest server host")->capture_default_str();
  ingest->add_option("--port", ingest_args.port, "Ingest server port; 0 runs a local server")
      ->check(CLI::Range(0, 65535))
      ->capture_default_str();
  ingest->add_option("--batch-size", ingest_args.batch, "Frames per batch")
      ->check(CLI::Range(std::size_t{1}, wire::kMaxFramesPerBatch))
      ->capture_default_str();
  ingest->add_flag("--uncompressed", ingest_args.raw, "Send uncompressed payloads");
  ingest->add_option("--snapshot", ingest_args.snapshot, "JSONL snapshot of the local store");

  fs::path featurize_bundle = "bundle";
  fs::path featurize_out = "features.csv";
  int featurize_threads = 1;
  auto* featurize = app.add_subcommand("featurize", "Extract labelled feature windows");
  featurize->add_option("--bundle", featurize_bundle, "Bundle directory")->capture_default_str();
  featurize->add_option("--out", featurize_out, "Feature CSV")->capture_default_str();
  featurize->add_option("--threads", featurize_threads, "Worker threads")->capture_default_str();

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a model on the training split");
  train->add_option("--model", train_args.model, "rf or lstm")
      ->check(CLI::IsMember({"rf", "lstm"}))
      ->capture_default_str();
  train->add_option("--features", train_args.features, "Feature CSV")->capture_default_str();
  train->add_option("--seed", train_args.seed, "Random seed")->capture_default_str();
  train->add_option("--out", train_args.out, "Model artifact")->capture_default_str();
  train->add_option("--cadence", train_args.cadence, "Telemetry cadence in seconds")->capture_default_str();
  train->add_option("--threads", train_args.threads, "Tree training threads")->capture_default_str();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Score a model on the test split");
  eval->add_option("--model", eval_args.model, "Model artifact")->capture_default_str();
  eval->add_option("--features", eval_args.features, "Feature CSV")->capture_default_str();
  eval->add_option("--report", eval_args.report, "Metrics JSON")->capture_default_str();

  EvaluateArgs evaluate_args;
  auto* evaluate = app.add_subcommand("evaluate", "Replay maintenance policies and write KPIs");
  evaluate->add_option("--bundle", evaluate_args.bundle, "Bundle directory")->capture_default_str();
  evaluate->add_option("--model", evaluate_args.model, "Model artifact")->capture_default_str();
  evaluate->add_option("--policy", evaluate_args.policy, "Policy under test")->capture_default_str();
  evaluate->add_option("--baseline", evaluate_args.baseline, "Baseline policy")->capture_default_str();
  evaluate->add_option("--seed", evaluate_args.seed, "Random seed")->capture_default_str();
  evaluate->add_option("--out", evaluate_args.out, "KPI JSON")->capture_default_str();
  evaluate->add_option("--threads", evaluate_args.threads, "Featurization threads")->capture_default_str();

  RetrainArgs retrain_args;
  auto* retrain = app.add_subcommand("retrain-with-feedback", "Retrain with technician feedback labels");
  retrain->add_option("--features", retrain_args.features, "Feature CSV")->capture_default_str();
  retrain->add_option("--feedback", retrain_args.feedback, "Feedback label JSONL")->capture_default_str();
  retrain->add_option("--model", retrain_args.model, "rf or lstm")
      ->check(CLI::IsMember({"rf", "lstm"}))
      ->capture_default_str();
  retrain->add_option("--seed", retrain_args.seed, "Random seed")->capture_default_str();
  retrain->add_option("--cadence", retrain_args.cadence, "Telemetry cadence in seconds")->capture_default_str();
  retrain->add_option("--out", retrain_args.out, "Model artifact")->capture_default_str();

  service::ServiceConfig serve_config;
  int serve_port = serve_config.port;
  int serve_ingest = -1;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--data", serve_config.data_dir, "Data directory (VG_DATA_DIR)")->capture_default_str();
  serve->add_option("--bundle", serve_config.bundle_dir, "Bundle seeding the telemetry store");
  serve->add_option("--model", serve_config.model_path, "Model artifact (default DATA/model_rf.json)");
  serve->add_option("--host", serve_config.host, "Listen address")->capture_default_str();
  serve->add_option("--port", serve_port, "Listen port (VG_PORT)")->check(CLI::Range(0, 65535))->capture_default_str();
  serve->add_option("--ingest-port", serve_ingest, "Also accept wire telemetry on this port")
      ->check(CLI::Range(0, 65535));
  serve->add_option("--alert-threshold", serve_config.alerts.threshold, "Smoothed probability that raises an alert")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  serve->add_option("--cors", serve_config.cors_origins, "Allowed CORS origins");
  serve->add_option("--scan-interval", serve_config.scan_interval_seconds, "Seconds between alert scans")
      ->capture_default_str();

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Render KPI and metrics JSON as markdown tables");
  report->add_option("--kpi", report_args.kpi, "KPI JSON")->capture_default_str();
  report->add_option("--metrics", report_args.metrics, "Metrics JSON");
  report->add_option("--out", report_args.out, "Markdown output (default stdout)");

  PipelineArgs pipeline_args;
  auto* pipeline = app.add_subcommand("pipeline", "Featurize, train, evaluate and report in one run");
  pipeline->add_option("--bundle", pipeline_args.bundle, "Bundle directory (generated if absent)")
      ->capture_default_str();
  pipeline->add_option("--out", pipeline_args.out, "Output directory")->capture_default_str();
  pipeline->add_option("--policy", pipeline_args.policy, "Policy under test")->capture_default_str();
  pipeline->add_option("--baseline", pipeline_args.baseline, "Baseline policy")->capture_default_str();
  pipeline->add_option("--seed", pipeline_args.seed, "Random seed")->capture_default_str();
  pipeline->add_option("--threads", pipeline_args.threads, "Worker threads")->capture_default_str();
  pipeline->add_flag("--no-lstm", pipeline_args.no_lstm, "Skip the LSTM");
  pipeline->add_flag("--simulate", pipeline_args.simulate, "Regenerate the bundle first");

  CLI11_PARSE(app, argc, argv);
  if (quiet) spdlog::set_level(spdlog::level::warn);

  try {
    if (*simulate) return cmd_simulate(sim_args);
    if (*ingest) return cmd_ingest(ingest_args);
    if (*featurize) {
      const auto b = service::featurize_bundle(featurize_bundle, {}, featurize_threads, progress);
      prep::write_feature_csv(featurize_out, b.vectors);
      spdlog::info("wrote {} windows to {}", b.vectors.size(), featurize_out.string());
      return 0;
    }
    if (*train) return cmd_train(train_args);
    if (*eval) return cmd_eval(eval_args);
    if (*evaluate) return cmd_evaluate(evaluate_args);
    if (*retrain) return cmd_retrain(retrain_args);
    if (*serve) {
      serve_config.port = static_cast<std::uint16_t>(serve_port);
      if (serve_ingest >= 0) serve_config.ingest_port = static_cast<std::uint16_t>(serve_ingest);
      return cmd_serve(std::move(serve_config));
    }
    if (*report) return cmd_report(report_args);
    if (*pipeline) return cmd_pipeline(pipeline_args);
  } catch (const Error& e) {
    spdlog::error("{} ({})", e.what(), to_string(e.code()));
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
