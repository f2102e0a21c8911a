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

#include "vendguard/service/api_server.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "httplib.h"
#include "json.hpp"
#include "vendguard/error.hpp"
#include "vendguard/frame_codec.hpp"
#include "vendguard/preprocess/features.hpp"
#include "vendguard/prognosis/failure_curve.hpp"
#include "vendguard/prognosis/inventory.hpp"
#include "vendguard/sim/bundle.hpp"
#include "vendguard/wire/ingest_server.hpp"

namespace vendguard::service {

using nlohmann::json;

namespace {

constexpr std::size_t kScoredWindows = 12;
constexpr double kPrognosisDays = 30.0;
constexpr std::size_t kPrognosisSteps = 30;

std::optional<std::int64_t> parse_int(const std::string& text) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::int64_t infer_cadence(const std::vector<SensorFrame>& frames) {
  std::int64_t best = 0;
  for (std::size_t i = 1; i < frames.size(); ++i) {
    const std::int64_t d = frames[i].timestamp - frames[i - 1].timestamp;
    if (d > 0 && (best == 0 || d < best)) best = d;
  }
  return best == 0 ? 10 : best;
}

// Frames onto a uniform grid; gaps become missing markers.
MachineSeries to_grid(const MachineId& id, const std::vector<SensorFrame>& frames) {
  MachineSeries s;
  s.machine_id = id;
  if (frames.empty()) return s;
  s.cadence = infer_cadence(frames);
  s.start = frames.front().timestamp;
  const auto n = static_cast<std::size_t>((frames.back().timestamp - s.start) / s.cadence) + 1;
  s.resize(n);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::fill(s.temperature.begin(), s.temperature.end(), nan);
  std::fill(s.vibration.begin(), s.vibration.end(), nan);
  std::fill(s.current.begin(), s.current.end(), nan);
  std::fill(s.interactions.begin(), s.interactions.end(), nan);
  for (const SensorFrame& f : frames) {
    const std::int64_t off = f.timestamp - s.start;
    if (off % s.cadence != 0) continue;
    const auto i = static_cast<std::size_t>(off / s.cadence);
    if (f.temperature) s.temperature[i] = *f.temperature;
    if (f.vibration) s.vibration[i] = *f.vibration;
    if (f.current) s.current[i] = *f.current;
    if (f.interactions) s.interactions[i] = static_cast<double>(*f.interactions);
  }
  return s;
}

json error_body(const std::string& message) { return json{{"error", message}}; }

void send_json(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, error_body(message).dump());
}

}  // namespace

void ServiceConfig::apply_environment() {
  if (const char* dir = std::getenv("VG_DATA_DIR"); dir && *dir) data_dir = dir;
  if (const char* p = std::getenv("VG_PORT"); p && *p) {
    const auto v = parse_int(p);
    if (!v || *v < 0 || *v > 65535) fail(Errc::kInvalidArgument, std::string("VG_PORT is not a port: ") + p);
    port = static_cast<std::uint16_t>(*v);
  }
}

void ServiceConfig::validate() {
  if (data_dir.empty()) fail(Errc::kInvalidArgument, "data directory required");
  std::filesystem::create_directories(data_dir);
  if (model_path.empty()) model_path = data_dir / "model_rf.json";
  if (!std::filesystem::exists(model_path)) {
    fail(Errc::kNotFound, "model artifact not found: " + model_path.string());
  }
  if (bundle_dir.empty() && std::filesystem::exists(data_dir / "bundle" / "manifest.json")) {
    bundle_dir = data_dir / "bundle";
  }
  if (!bundle_dir.empty() && !std::filesystem::exists(bundle_dir / "manifest.json")) {
    fail(Errc::kNotFound, "bundle manifest not found in " + bundle_dir.string());
  }
  if (alerts.threshold <= 0.0 || alerts.threshold >= 1.0) fail(Errc::kInvalidArgument, "alert threshold must be in (0,1)");
  if (alerts.smoothing == 0) fail(Errc::kInvalidArgument, "alert smoothing must be >= 1");
  if (down_after_seconds <= 0) fail(Errc::kInvalidArgument, "down_after_seconds must be > 0");
  if (retention_seconds < 0) fail(Errc::kInvalidArgument, "retention must be >= 0");
  if (scan_interval_seconds < 0) fail(Errc::kInvalidArgument, "scan interval must be >= 0");
  if (initial_stock_per_category < 0.0) fail(Errc::kInvalidArgument, "initial stock must be >= 0");
}

struct ApiServer::Impl {
  ServiceConfig config;
  learn::ModelArtifact model;
  wire::SeriesStore store;
  prognosis::AlertStore alerts;
  std::unique_ptr<wire::IngestServer> ingest;
  httplib::Server http;
  std::thread http_thread;
  std::uint16_t bound_port = 0;

  struct Scored {
    Timestamp latest = 0;
    std::size_t frames = 0;
    std::vector<prognosis::ScoredWindow> windows;
  };
  std::mutex cache_mutex;
  std::unordered_map<MachineId, std::shared_ptr<const Scored>> cache;

  std::mutex scan_mutex;
  std::map<MachineId, bool> excursion;
  prognosis::AlertSink sink;

  std::mutex stop_mutex;
  std::condition_variable stop_cv;
  bool stopping = false;
  std::thread scan_thread;

  explicit Impl(ServiceConfig c)
      : config([&] {
          c.validate();
          return std::move(c);
        }()),
        model(learn::load_model(config.model_path)),
        store(config.retention_seconds),
        alerts(config.data_dir / "alerts") {
    sink = [](const prognosis::Alert& a) {
      spdlog::warn("alert {} machine={} type={} confidence={:.3f} priority={}", a.id, a.machine_id,
                   prognosis::to_string(a.fault_type), a.confidence, prognosis::to_string(a.priority));
    };
    if (!config.bundle_dir.empty()) {
      const sim::BundleManifest manifest = sim::read_manifest(config.bundle_dir);
      for (const MachineId& id : manifest.machines) {
        store.append_series(sim::read_machine(config.bundle_dir, manifest, id));
      }
      spdlog::info("loaded {} machines ({} frames) from {}", manifest.machines.size(), store.total_frames(),
                   config.bundle_dir.string());
    }
    routes();
  }

  bool known(const MachineId& id) const {
    const auto ids = store.machines();
    return std::binary_search(ids.begin(), ids.end(), id);
  }

  // Model scores of the latest windows of one machine, oldest first.
  std::shared_ptr<const Scored> scored(const MachineId& id) {
    const auto last = store.latest(id);
    const std::size_t count = store.frame_count(id);
    if (!last) return std::make_shared<Scored>();
    {
      std::lock_guard lock(cache_mutex);
      auto it = cache.find(id);
      if (it != cache.end() && it->second->latest == last->timestamp && it->second->frames == count) {
        return it->second;
      }
    }
    auto out = std::make_shared<Scored>();
    out->latest = last->timestamp;
    out->frames = count;
    const prep::FeatureConfig& fc = model.feature_config;
    const std::int64_t cadence = model.sequence_step_seconds / std::max<std::int64_t>(fc.stride, 1);
    const std::int64_t span = static_cast<std::int64_t>(fc.window + (kScoredWindows - 1) * fc.stride) * cadence;
    const auto frames = store.query_range(id, last->timestamp - span + cadence, last->timestamp);
    try {
      const auto vectors = prep::featurize_machine(to_grid(id, frames), fc);
      if (!vectors.empty()) {
        const auto p = learn::predict_vectors(model, vectors);
        for (std::size_t i = 0; i < vectors.size(); ++i) {
          if (!std::isnan(p[i])) out->windows.push_back({vectors[i], p[i]});
        }
      }
    } catch (const Error& e) {
      if (e.code() != Errc::kNoSignal && e.code() != Errc::kNumerical && e.code() != Errc::kInvalidArgument) throw;
    }
    std::lock_guard lock(cache_mutex);
    cache[id] = out;
    return out;
  }

  std::optional<double> latest_probability(const Scored& s) const {
    if (s.windows.empty()) return std::nullopt;
    return prognosis::smoothed_probability(s.windows, config.alerts.smoothing);
  }

  std::string machines_body() {
    const auto ids = store.machines();
    Timestamp newest = std::numeric_limits<Timestamp>::min();
    std::vector<std::optional<SensorFrame>> last(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      last[i] = store.latest(ids[i]);
      if (last[i]) newest = std::max(newest, last[i]->timestamp);
    }
    json out = json::array();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      json m;
      m["machine_id"] = ids[i];
      if (!last[i]) {
        m["last_seen"] = nullptr;
        m["status"] = "down";
        m["latest_failure_probability"] = nullptr;
        out.push_back(std::move(m));
        continue;
      }
      const SensorFrame& f = *last[i];
      const auto p = latest_probability(*scored(ids[i]));
      const bool silent = newest - f.timestamp > config.down_after_seconds;
      const bool dark = !f.temperature && !f.vibration && !f.current;
      const bool partial = !f.temperature || !f.vibration || !f.current || !f.interactions;
      const char* status = "ok";
      if (silent || dark) {
        status = "down";
      } else if (partial || (p && *p >= config.alerts.threshold)) {
        status = "degraded";
      }
      m["last_seen"] = f.timestamp;
      m["status"] = status;
      m["latest_failure_probability"] = p ? json(*p) : json(nullptr);
      out.push_back(std::move(m));
    }
    return out.dump();
  }

  std::string prognosis_body(const MachineId& id) {
    const auto s = scored(id);
    const double horizon_days = static_cast<double>(model.feature_config.horizon_seconds) / kSecondsPerDay;
    json out;
    out["machine_id"] = id;
    out["horizon_days"] = horizon_days;
    out["samples"] = s->windows.size();
    std::vector<double> t(s->windows.size(), horizon_days);
    std::vector<double> p;
    for (const auto& w : s->windows) p.push_back(w.probability);
    try {
      const prognosis::FailureCurve curve = prognosis::fit_lambda(t, p);
      out["lambda"] = curve.lambda;
      out["rmse"] = curve.rmse;
      json points = json::array();
      for (const auto& pt : prognosis::sample_curve(curve, kPrognosisDays, kPrognosisSteps)) {
        points.push_back({{"t_days", pt.t_days}, {"probability", pt.probability}});
      }
      out["points"] = std::move(points);
    } catch (const Error& e) {
      if (e.code() != Errc::kNoSignal && e.code() != Errc::kInvalidArgument) throw;
      out["lambda"] = nullptr;
      out["rmse"] = nullptr;
      out["points"] = json::array();
    }
    return out.dump();
  }

  std::string inventory_body() {
    json out = json::array();
    for (const MachineId& id : store.machines()) {
      const auto frames = store.dump(id);
      if (frames.empty()) continue;
      for (const auto& e : prognosis::estimate_machine_inventory(to_grid(id, frames),
                                                                  config.initial_stock_per_category)) {
        out.push_back({{"machine_id", id},
                       {"category", prognosis::to_string(e.category)},
                       {"stock", e.stock},
                       {"rate_per_day", e.rate_per_day},
                       {"days_to_empty", e.days_to_empty ? json(*e.days_to_empty) : json(nullptr)}});
      }
    }
    return out.dump();
  }

  static std::string alerts_body(const std::vector<prognosis::Alert>& list) {
    std::string out = "[";
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i) out += ',';
      out += prognosis::alert_to_json(list[i]);
    }
    out += ']';
    return out;
  }

  std::vector<prognosis::Alert> scan() {
    std::vector<prognosis::Alert> raised;
    std::lock_guard lock(scan_mutex);
    for (const MachineId& id : store.machines()) {
      const auto s = scored(id);
      const auto p = latest_probability(*s);
      bool& active = excursion[id];
      if (!p || *p < config.alerts.threshold) {
        active = false;
        continue;
      }
      if (active) continue;
      const std::size_t k = std::min(s->windows.size(), config.alerts.smoothing);
      const std::span<const prognosis::ScoredWindow> recent(s->windows.data() + s->windows.size() - k, k);
      if (auto alert = prognosis::make_alert(id, recent, model.stats, config.alerts)) {
        active = true;
        if (alerts.add(*alert)) {
          if (sink) sink(*alert);
          raised.push_back(std::move(*alert));
        }
      }
    }
    return raised;
  }

  bool origin_allowed(const std::string& origin) const {
    for (const auto& o : config.cors_origins) {
      if (o == "*" || o == origin) return true;
    }
    return false;
  }

  void routes() {
    auto guarded = [](auto handler) {
      return [handler](const httplib::Request& req, httplib::Response& res) {
        try {
          handler(req, res);
        } catch (const Error& e) {
          const int status = e.code() == Errc::kNotFound ? 404
                             : e.code() == Errc::kInvalidTransition ? 409
                             : (e.code() == Errc::kInvalidArgument || e.code() == Errc::kFormat) ? 400
                                                                                               : 500;
          send_error(res, status, e.what());
        } catch (const std::exception& e) {
          send_error(res, 500, e.what());
        }
      };
    };

    http.Get("/api/v1/machines", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, machines_body());
    }));

    http.Get("/api/v1/machines/:id/telemetry", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const MachineId id = req.path_params.at("id");
      if (!known(id)) return send_error(res, 404, "unknown machine " + id);
      Timestamp from = 0;
      Timestamp to = std::numeric_limits<Timestamp>::max() - 1;
      if (req.has_param("from")) {
        const auto v = parse_int(req.get_param_value("from"));
        if (!v) return send_error(res, 400, "from must be an integer timestamp");
        from = *v;
      }
      if (req.has_param("to")) {
        const auto v = parse_int(req.get_param_value("to"));
        if (!v || *v == std::numeric_limits<Timestamp>::max()) return send_error(res, 400, "to must be an integer timestamp");
        to = *v;
      }
      if (from > to) return send_error(res, 400, "from must not exceed to");
      std::string body = "[";
      bool first = true;
      for (const SensorFrame& f : store.query_range(id, from, to)) {
        if (!first) body += ',';
        first = false;
        append_frame_json(body, f);
      }
      body += ']';
      send_json(res, 200, body);
    }));

    http.Get("/api/v1/machines/:id/prognosis", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const MachineId id = req.path_params.at("id");
      if (!known(id)) return send_error(res, 404, "unknown machine " + id);
      send_json(res, 200, prognosis_body(id));
    }));

    http.Get("/api/v1/alerts", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::optional<prognosis::Feedback> filter;
      if (req.has_param("status")) {
        std::string s = req.get_param_value("status");
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        if (s == "pending") filter = prognosis::Feedback::kPending;
        else if (s == "confirmed") filter = prognosis::Feedback::kConfirmed;
        else if (s == "rejected") filter = prognosis::Feedback::kRejected;
        else if (!s.empty() && s != "all") return send_error(res, 400, "status must be pending, confirmed or rejected");
      }
      send_json(res, 200, alerts_body(alerts.list(filter)));
    }));

    http.Post("/api/v1/alerts/:id/feedback", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.path_params.at("id");
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::exception&) {
        return send_error(res, 400, "body is not JSON");
      }
      if (!body.is_object() || !body.contains("verdict") || !body["verdict"].is_string()) {
        return send_error(res, 400, "verdict required");
      }
      const std::string verdict = body["verdict"].get<std::string>();
      prognosis::Feedback fb;
      if (verdict == "confirm") fb = prognosis::Feedback::kConfirmed;
      else if (verdict == "reject") fb = prognosis::Feedback::kRejected;
      else return send_error(res, 400, "verdict must be confirm or reject");
      std::string note;
      if (body.contains("note") && !body["note"].is_null()) {
        if (!body["note"].is_string()) return send_error(res, 400, "note must be text");
        note = body["note"].get<std::string>();
      }
      const prognosis::Alert updated = alerts.apply_feedback(id, fb);
      spdlog::info("feedback {} on alert {}{}{}", verdict, id, note.empty() ? "" : ": ", note);
      send_json(res, 200, prognosis::alert_to_json(updated));
    }));

    http.Get("/api/v1/kpi", guarded([this](const httplib::Request&, httplib::Response& res) {
      const auto path = config.data_dir / "kpi.json";
      std::ifstream in(path);
      if (!in) return send_error(res, 404, "no KPI report in " + config.data_dir.string());
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        fail(Errc::kIo, path.string() + ": " + e.what());
      }
      send_json(res, 200, j.dump());
    }));

    http.Get("/api/v1/inventory", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, inventory_body());
    }));

    http.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    http.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_header("Origin")) return;
      const std::string origin = req.get_header_value("Origin");
      if (!origin_allowed(origin)) return;
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
  }
};

ApiServer::ApiServer(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

ApiServer::~ApiServer() { stop(); }

void ApiServer::start() {
  Impl& s = *impl_;
  if (s.http_thread.joinable()) return;
  if (s.config.ingest_port) {
    s.ingest = std::make_unique<wire::IngestServer>(s.store, s.config.host, *s.config.ingest_port);
    s.ingest->start();
    spdlog::info("telemetry ingest on {}:{}", s.config.host, s.ingest->port());
  }
  const int port = s.config.port == 0 ? s.http.bind_to_any_port(s.config.host)
                                      : (s.http.bind_to_port(s.config.host, s.config.port) ? s.config.port : -1);
  if (port <= 0) fail(Errc::kIo, "cannot bind " + s.config.host + ":" + std::to_string(s.config.port));
  s.bound_port = static_cast<std::uint16_t>(port);
  s.http_thread = std::thread([&s] { s.http.listen_after_bind(); });
  s.http.wait_until_ready();
  {
    std::lock_guard lock(s.stop_mutex);
    s.stopping = false;
  }
  if (s.config.scan_interval_seconds > 0) {
    s.scan_thread = std::thread([&s] {
      std::unique_lock lock(s.stop_mutex);
      while (!s.stopping) {
        lock.unlock();
        try {
          s.scan();
        } catch (const std::exception& e) {
          spdlog::error("alert scan failed: {}", e.what());
        }
        lock.lock();
        s.stop_cv.wait_for(lock, std::chrono::seconds(s.config.scan_interval_seconds), [&s] { return s.stopping; });
      }
    });
  }
  spdlog::info("serving /api/v1 on {}:{}", s.config.host, s.bound_port);
}

void ApiServer::stop() {
  Impl& s = *impl_;
  {
    std::lock_guard lock(s.stop_mutex);
    s.stopping = true;
  }
  s.stop_cv.notify_all();
  if (s.scan_thread.joinable()) s.scan_thread.join();
  s.http.stop();
  if (s.http_thread.joinable()) s.http_thread.join();
  if (s.ingest) s.ingest->stop();
}

std::uint16_t ApiServer::port() const { return impl_->bound_port; }

std::optional<std::uint16_t> ApiServer::ingest_port() const {
  if (!impl_->ingest) return std::nullopt;
  return impl_->ingest->port();
}

wire::SeriesStore& ApiServer::store() { return impl_->store; }
prognosis::AlertStore& ApiServer::alert_store() { return impl_->alerts; }
std::vector<prognosis::Alert> ApiServer::scan_alerts() { return impl_->scan(); }
void ApiServer::set_alert_sink(prognosis::AlertSink sink) {
  std::lock_guard lock(impl_->scan_mutex);
  impl_->sink = std::move(sink);
}

}  // namespace vendguard::service
