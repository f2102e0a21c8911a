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
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vendguard/learn/model_io.hpp"
#include "vendguard/preprocess/features.hpp"
#include "vendguard/types.hpp"

namespace vendguard::prognosis {

enum class FaultType { kHeaterFailure, kMotorImbalance, kSensorDropout, kUnknown };
enum class Priority { kHigh, kMedium, kLow };
enum class Feedback { kPending, kConfirmed, kRejected };

std::string_view to_string(FaultType t);
std::string_view to_string(Priority p);
std::string_view to_string(Feedback f);
FaultType fault_type_from_string(std::string_view s);
Priority priority_from_string(std::string_view s);
Feedback feedback_from_string(std::string_view s);

struct Alert {
  std::string id;
  MachineId machine_id;
  Timestamp created_at = 0;
  FaultType fault_type = FaultType::kUnknown;
  double confidence = 0.0;
  std::string recommended_action;
  Priority priority = Priority::kLow;
  Feedback feedback = Feedback::kPending;
  std::vector<prep::FeatureVector> windows;  // the windows that raised it

  bool operator==(const Alert&) const = default;
};

// >= 0.9 High, >= 0.7 Medium, >= 0.5 Low; throws below 0.5.
Priority assign_priority(double confidence);
std::string_view recommended_action(FaultType type);

// The channel whose mean deviation over `windows`, in training standard
// deviations, is largest: temp_mean -> heater, vib_rms -> motor,
// missing_fraction -> dropout. Unknown if nothing reaches min_z.
FaultType attribute_fault(std::span<const prep::FeatureVector> windows,
                          const learn::FeatureStats& stats, double min_z = 2.0);

struct ScoredWindow {
  prep::FeatureVector vector;
  double probability = 0.0;
};

struct AlertPolicy {
  std::size_t smoothing = 3;
  double threshold = 0.5;
  double min_attribution_z = 2.0;
};

// Mean probability of the last `smoothing` windows; an alert if it reaches the
// threshold. `recent` is chronological.
double smoothed_probability(std::span<const ScoredWindow> recent, std::size_t smoothing);
std::optional<Alert> make_alert(const MachineId& machine_id, std::span<const ScoredWindow> recent,
                                const learn::FeatureStats& stats, const AlertPolicy& policy = {});

// Append-only JSONL store of alerts and feedback transitions, with a separate
// JSONL file of labelled windows produced by feedback. All members are
// serialised by one mutex.
class AlertStore {
 public:
  // Opens (and replays) DIR/alerts.jsonl; labels go to DIR/feedback_labels.jsonl.
  explicit AlertStore(std::filesystem::path dir);

  // Adds a new alert; an alert with an existing id is ignored. Returns true if added.
  bool add(const Alert& alert);
  // Pending -> Confirmed|Rejected only. Throws Errc::kNotFound or
  // Errc::kInvalidTransition.
  Alert apply_feedback(const std::string& alert_id, Feedback verdict);

  std::vector<Alert> list(std::optional<Feedback> filter = std::nullopt) const;
  std::optional<Alert> get(const std::string& alert_id) const;
  std::size_t size() const;

  const std::filesystem::path& alerts_path() const { return alerts_path_; }
  const std::filesystem::path& labels_path() const { return labels_path_; }

 private:
  std::filesystem::path alerts_path_;
  std::filesystem::path labels_path_;
  mutable std::mutex mutex_;
  std::vector<Alert> alerts_;
};

// Labelled windows appended by feedback, in file order.
std::vector<prep::FeatureVector> read_feedback_labels(const std::filesystem::path& path);

std::string alert_to_json(const Alert& alert);
Alert alert_from_json(const std::string& text);

// Receives every new alert. The service ships only a log sink.
using AlertSink = std::function<void(const Alert&)>;

}  // namespace vendguard::prognosis
