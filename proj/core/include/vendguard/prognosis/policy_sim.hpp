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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vendguard/learn/metrics.hpp"
#include "vendguard/types.hpp"

namespace vendguard::prognosis {

enum class PolicyKind { kTimeBased, kPredictive, kOracle };

struct MaintenancePolicy {
  PolicyKind kind = PolicyKind::kPredictive;
  double interval_days = 14.0;                          // TimeBased
  double threshold = 0.7;                               // Predictive
  std::int64_t lead_seconds = 24 * kSecondsPerHour;     // a visit this far ahead prevents a failure
  std::size_t smoothing = 3;                            // Predictive score debouncing
  std::int64_t cooldown_seconds = 12 * kSecondsPerHour; // after a no-fault-found alert visit

  void validate() const;
  std::string describe() const;
  // "time:14", "predictive:0.7", "predictive:0.7:24" (lead hours), "oracle".
  static MaintenancePolicy parse(std::string_view spec);
};

struct RepairModel {
  double preemptive_hours = 1.5;
  double reactive_hours = 2.5;
  double dispatch_latency_hours = 4.0;  // reactive visits only
  double jitter_hours = 0.0;            // uniform +- jitter on every repair, seeded

  void validate() const;
};

struct ReplayWindow {
  Timestamp end_time = 0;
  double probability = 0.0;
  int label = 0;
};

// One machine's scored windows (chronological, downtime windows already
// removed) and its ground-truth failures over [start, end].
struct MachineTrace {
  MachineId machine_id;
  Timestamp start = 0;
  Timestamp end = 0;
  std::vector<ReplayWindow> windows;
  std::vector<FaultEvent> events;
};

enum class VisitReason { kScheduled, kAlert, kReactive };
enum class VisitOutcome { kPrevented, kNoFaultFound, kRepair };
std::string_view to_string(VisitReason r);
std::string_view to_string(VisitOutcome o);

struct PolicyEvent {
  MachineId machine_id;
  Timestamp time = 0;
  VisitReason reason = VisitReason::kScheduled;
  VisitOutcome outcome = VisitOutcome::kNoFaultFound;
  double repair_hours = 0.0;
  std::optional<Timestamp> failure_time;  // the fault this visit dealt with

  bool operator==(const PolicyEvent&) const = default;
};

struct ObservationSpan {
  MachineId machine_id;
  Timestamp start = 0;
  Timestamp end = 0;
};

struct PolicyRun {
  MaintenancePolicy policy;
  std::vector<ObservationSpan> observation;
  std::vector<PolicyEvent> log;  // per machine, chronological
  // Window-level open-loop confusion of the policy's trigger against labels;
  // absent for schedule-driven policies.
  std::optional<learn::Confusion> windows;
};

// Replays each machine independently. Every fault ends up either prevented
// (a visit within lead_seconds before its failure) or realized (reactive
// repair, unplanned downtime). Deterministic given the seed.
PolicyRun run_policy_sim(const std::vector<MachineTrace>& traces, const MaintenancePolicy& policy,
                         const RepairModel& repair = {}, std::uint64_t seed = 42);

}  // namespace vendguard::prognosis
