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

#include "vendguard/prognosis/alerts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json_internal.hpp"
#include "vendguard/error.hpp"

namespace vendguard::prognosis {

using internal::json;

std::string_view to_string(FaultType t) {
  switch (t) {
    case FaultType::kHeaterFailure: return "HeaterFailure";
    case FaultType::kMotorImbalance: return "MotorImbalance";
    case FaultType::kSensorDropout: return "SensorDropout";
    case FaultType::kUnknown: return "Unknown";
  }
  return "Unknown";
}

std::string_view to_string(Priority p) {
  switch (p) {
    case Priority::kHigh: return "High";
    case Priority::kMedium: return "Medium";
    case Priority::kLow: return "Low";
  }
  return "Low";
}

std::string_view to_string(Feedback f) {
  switch (f) {
    case Feedback::kPending: return "Pending";
    case Feedback::kConfirmed: return "Confirmed";
    case Feedback::kRejected: return "Rejected";
  }
  return "Pending";
}

FaultType fault_type_from_string(std::string_view s) {
  for (FaultType t : {FaultType::kHeaterFailure, FaultType::kMotorImbalance,
                      FaultType::kSensorDropout, FaultType::kUnknown}) {
    if (to_string(t) == s) return t;
  }
  fail(Errc::kInvalidArgument, "unknown fault type '" + std::string(s) + "'");
}

Priority priority_from_string(std::string_view s) {
  for (Priority p : {Priority::kHigh, Priority::kMedium, Priority::kLow}) {
    if (to_string(p) == s) return p;
  }
  fail(Errc::kInvalidArgument, "unknown priority '" + std::string(s) + "'");
}

Feedback feedback_from_string(std::string_view s) {
  for (Feedback f : {Feedback::kPending, Feedback::kConfirmed, Feedback::kRejected}) {
    if (to_string(f) == s) return f;
  }
  fail(Errc::kInvalidArgument, "unknown feedback state '" + std::string(s) + "'");
}

Priority assign_priority(double confidence) {
  if (!(confidence >= 0.5 && confidence <= 1.0)) {
    fail(Errc::kInvalidArgument, "no priority below confidence 0.5");
  }
  if (confidence >= 0.9) return Priority::kHigh;
  if (confidence >= 0.7) return Priority::kMedium;
  return Priority::kLow;
}

std::string_view recommended_action(FaultType type) {
  switch (type) {
    case FaultType::kHeaterFailure:
      return "Inspect heating element and thermostat; check refrigeration airflow.";
    case FaultType::kMotorImbalance:
      return "Inspect dispensing motor mounts and spiral alignment; rebalance or replace motor.";
    case FaultType::kSensorDropout:
      return "Check sensor wiring and telemetry module power; reseat or replace sensor.";
    case FaultType::kUnknown:
      return "Perform general inspection of the machine.";
  }
  return "Perform general inspection of the machine.";
}

FaultType attribute_fault(std::span<const prep::FeatureVector> windows,
                          const learn::FeatureStats& stats, double min_z) {
  if (windows.empty()) return FaultType::kUnknown;
  const auto z = [](double value, double mean, double sd) {
    return std::fabs(value - mean) / std::max(sd, 1e-9);
  };
  double temp = 0.0;
  double vib = 0.0;
  double missing = 0.0;
  for (const auto& w : windows) {
    temp += w.features[prep::kTempMean];
    vib += w.features[prep::kVibRms];
    missing += w.missing_fraction;
  }
  const double n = static_cast<double>(windows.size());
  const double scores[3] = {
      z(temp / n, stats.mean[prep::kTempMean], stats.stddev[prep::kTempMean]),
      z(vib / n, stats.mean[prep::kVibRms], stats.stddev[prep::kVibRms]),
      z(missing / n, stats.missing_mean, stats.missing_stddev),
  };
  const FaultType types[3] = {FaultType::kHeaterFailure, FaultType::kMotorImbalance,
                              FaultType::kSensorDropout};
  std::size_t best = 0;
  for (std::size_t i = 1; i < 3; ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return scores[best] >= min_z ? types[best] : FaultType::kUnknown;
}

double smoothed_probability(std::span<const ScoredWindow> recent, std::size_t smoothing) {
  if (recent.empty()) fail(Errc::kInvalidArgument, "no scored windows");
  const std::size_t k = std::min(std::max<std::size_t>(smoothing, 1), recent.size());
  double sum = 0.0;
  for (const auto& w : recent.last(k)) sum += w.probability;
  return sum / static_cast<double>(k);
}

std::optional<Alert> make_alert(const MachineId& machine_id, std::span<const ScoredWindow> recent,
                                const learn::FeatureStats& stats, const AlertPolicy& policy) {
  const double p = smoothed_probability(recent, policy.smoothing);
  if (p < policy.threshold || p < 0.5) return std::nullopt;
  const std::size_t k = std::min(std::max<std::size_t>(policy.smoothing, 1), recent.size());
  Alert a;
  a.machine_id = machine_id;
  a.created_at = recent.back().vector.window_end_time;
  a.id = machine_id + "-" + std::to_string(a.created_at);
  for (const auto& w : recent.last(k)) a.windows.push_back(w.vector);
  a.fault_type = attribute_fault(a.windows, stats, policy.min_attribution_z);
  a.confidence = std::min(p, 1.0);
  a.priority = assign_priority(a.confidence);
  a.recommended_action = std::string(recommended_action(a.fault_type));
  return a;
}

namespace {

json vector_json(const prep::FeatureVector& v) {
  return {{"machine_id", v.machine_id},
          {"window_start_time", v.window_start_time},
          {"window_end_time", v.window_end_time},
          {"feature_version", prep::kFeatureVersion},
          {"features", std::vector<double>(v.features.begin(), v.features.end())},
          {"missing_fraction", v.missing_fraction},
          {"label", v.label}};
}

prep::FeatureVector vector_from(const json& j) {
  if (j.at("feature_version").get<int>() != prep::kFeatureVersion) {
    fail(Errc::kIncompatible, "feature record has a different feature version");
  }
  prep::FeatureVector v;
  v.machine_id = j.at("machine_id").get<std::string>();
  v.window_start_time = j.at("window_start_time").get<Timestamp>();
  v.window_end_time = j.at("window_end_time").get<Timestamp>();
  const auto f = j.at("features").get<std::vector<double>>();
  if (f.size() != prep::kFeatureCount) fail(Errc::kFormat, "feature record has wrong length");
  std::copy(f.begin(), f.end(), v.features.begin());
  v.missing_fraction = j.at("missing_fraction").get<double>();
  v.label = j.at("label").get<int>();
  return v;
}

json alert_value(const Alert& a) {
  json windows = json::array();
  for (const auto& w : a.windows) windows.push_back(vector_json(w));
  return {{"id", a.id},
          {"machine_id", a.machine_id},
          {"created_at", a.created_at},
          {"fault_type", std::string(to_string(a.fault_type))},
          {"confidence", a.confidence},
          {"recommended_action", a.recommended_action},
          {"priority", std::string(to_string(a.priority))},
          {"feedback", std::string(to_string(a.feedback))},
          {"windows", std::move(windows)}};
}

Alert alert_from_value(const json& j) {
  Alert a;
  a.id = j.at("id").get<std::string>();
  a.machine_id = j.at("machine_id").get<std::string>();
  a.created_at = j.at("created_at").get<Timestamp>();
  a.fault_type = fault_type_from_string(j.at("fault_type").get<std::string>());
  a.confidence = j.at("confidence").get<double>();
  a.recommended_action = j.at("recommended_action").get<std::string>();
  a.priority = priority_from_string(j.at("priority").get<std::string>());
  a.feedback = feedback_from_string(j.at("feedback").get<std::string>());
  for (const json& w : j.at("windows")) a.windows.push_back(vector_from(w));
  return a;
}

void append_line(const std::filesystem::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) fail(Errc::kIo, "cannot open " + path.string() + " for appending");
  out << line << '\n';
  out.flush();
  if (!out) fail(Errc::kIo, "append failed for " + path.string());
}

}  // namespace

std::string alert_to_json(const Alert& alert) { return alert_value(alert).dump(); }

Alert alert_from_json(const std::string& text) {
  try {
    return alert_from_value(json::parse(text));
  } catch (const json::exception& e) {
    fail(Errc::kFormat, std::string("malformed alert: ") + e.what());
  }
}

AlertStore::AlertStore(std::filesystem::path dir)
    : alerts_path_(dir / "alerts.jsonl"), labels_path_(dir / "feedback_labels.jsonl") {
  std::filesystem::create_directories(dir);
  std::ifstream in(alerts_path_, std::ios::binary);
  if (!in) return;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "alert") {
        Alert a = alert_from_value(j.at("alert"));
        const bool known = std::any_of(alerts_.begin(), alerts_.end(),
                                       [&](const Alert& x) { return x.id == a.id; });
        if (!known) alerts_.push_back(std::move(a));
      } else if (type == "feedback") {
        const std::string id = j.at("alert_id").get<std::string>();
        const Feedback verdict = feedback_from_string(j.at("verdict").get<std::string>());
        for (Alert& a : alerts_) {
          if (a.id == id) a.feedback = verdict;
        }
      } else {
        fail(Errc::kFormat, "unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      fail(Errc::kFormat, alerts_path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      fail(e.code(), alerts_path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

bool AlertStore::add(const Alert& alert) {
  std::lock_guard lock(mutex_);
  for (const Alert& a : alerts_) {
    if (a.id == alert.id) return false;
  }
  const json record = {{"type", "alert"}, {"alert", alert_value(alert)}};
  append_line(alerts_path_, record.dump());
  alerts_.push_back(alert);
  return true;
}

Alert AlertStore::apply_feedback(const std::string& alert_id, Feedback verdict) {
  if (verdict == Feedback::kPending) {
    fail(Errc::kInvalidTransition, "feedback verdict must be Confirmed or Rejected");
  }
  std::lock_guard lock(mutex_);
  auto it = std::find_if(alerts_.begin(), alerts_.end(), [&](const Alert& a) { return a.id == alert_id; });
  if (it == alerts_.end()) fail(Errc::kNotFound, "no alert with id " + alert_id);
  if (it->feedback != Feedback::kPending) {
    fail(Errc::kInvalidTransition, "alert " + alert_id + " is already " + std::string(to_string(it->feedback)));
  }
  const json record = {{"type", "feedback"},
                       {"alert_id", alert_id},
                       {"previous", std::string(to_string(it->feedback))},
                       {"verdict", std::string(to_string(verdict))}};
  append_line(alerts_path_, record.dump());
  it->feedback = verdict;
  const int label = verdict == Feedback::kConfirmed ? 1 : 0;
  for (prep::FeatureVector w : it->windows) {
    w.label = label;
    json rec = vector_json(w);
    rec["alert_id"] = alert_id;
    append_line(labels_path_, rec.dump());
  }
  return *it;
}

std::vector<Alert> AlertStore::list(std::optional<Feedback> filter) const {
  std::lock_guard lock(mutex_);
  std::vector<Alert> out;
  for (const Alert& a : alerts_) {
    if (!filter || a.feedback == *filter) out.push_back(a);
  }
  return out;
}

std::optional<Alert> AlertStore::get(const std::string& alert_id) const {
  std::lock_guard lock(mutex_);
  for (const Alert& a : alerts_) {
    if (a.id == alert_id) return a;
  }
  return std::nullopt;
}

std::size_t AlertStore::size() const {
  std::lock_guard lock(mutex_);
  return alerts_.size();
}

std::vector<prep::FeatureVector> read_feedback_labels(const std::filesystem::path& path) {
  std::vector<prep::FeatureVector> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(vector_from(json::parse(line)));
    } catch (const json::exception& e) {
      fail(Errc::kFormat, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace vendguard::prognosis
