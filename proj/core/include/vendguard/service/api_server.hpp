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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vendguard/learn/model_io.hpp"
#include "vendguard/prognosis/alerts.hpp"
#include "vendguard/wire/series_store.hpp"

namespace vendguard::service {

// Data directory layout (as written by the pipeline):
//   DATA/kpi.json  DATA/model_rf.json  DATA/alerts/
// The bundle, when present, seeds the telemetry store at startup.
struct ServiceConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;  // 0 picks an ephemeral port
  std::filesystem::path data_dir = "out";
  std::filesystem::path bundle_dir;  // empty: DATA/bundle if it exists
  std::filesystem::path model_path;  // empty: DATA/model_rf.json
  prognosis::AlertPolicy alerts;
  // Machines silent this long (relative to the newest frame in the fleet) are down.
  std::int64_t down_after_seconds = 300;
  std::vector<std::string> cors_origins;  // "*" allows any origin
  std::int64_t retention_seconds = 7 * 86400;
  std::optional<std::uint16_t> ingest_port;
  // Background alert scan period; 0 disables the thread (scan_alerts still works).
  int scan_interval_seconds = 30;
  double initial_stock_per_category = 500.0;

  // Reads VG_DATA_DIR and VG_PORT over the current values.
  void apply_environment();
  // Creates the data directory; throws on an invalid port or a missing model.
  void validate();
};

// HTTP JSON API under /api/v1:
//   GET  /machines
//   GET  /machines/{id}/telemetry?from=&to=
//   GET  /machines/{id}/prognosis
//   GET  /alerts?status=pending|confirmed|rejected
//   POST /alerts/{id}/feedback   {"verdict":"confirm"|"reject","note":"..."}
//   GET  /kpi
//   GET  /inventory
// Errors are {"error": message} with 400, 404 or 409.
class ApiServer {
 public:
  explicit ApiServer(ServiceConfig config);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Binds and serves on a background thread; returns once listening.
  void start();
  void stop();
  std::uint16_t port() const;
  std::optional<std::uint16_t> ingest_port() const;

  wire::SeriesStore& store();
  prognosis::AlertStore& alert_store();
  // Scores every machine's latest windows and raises an alert for each new
  // excursion above the alert threshold. Returns the alerts raised.
  std::vector<prognosis::Alert> scan_alerts();
  void set_alert_sink(prognosis::AlertSink sink);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace vendguard::service
