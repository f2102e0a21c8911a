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

#include "vendguard/prognosis/kpi.hpp"

#include <algorithm>
#include <map>
#include <vector>

#include "json_internal.hpp"
#include "vendguard/error.hpp"

namespace vendguard::prognosis {

using internal::json;

KpiReport compute_kpis(const PolicyRun& run) {
  KpiReport k;
  k.policy = run.policy.describe();
  k.machines = run.observation.size();
  std::map<MachineId, std::vector<Timestamp>> failures;
  double repair_sum = 0.0;
  std::uint64_t repairs = 0;
  for (const PolicyEvent& e : run.log) {
    ++k.dispatches;
    switch (e.outcome) {
      case VisitOutcome::kRepair:
        ++k.failures;
        k.unplanned_downtime_hours += e.repair_hours;
        failures[e.machine_id].push_back(e.failure_time.value_or(e.time));
        repair_sum += e.repair_hours;
        ++repairs;
        break;
      case VisitOutcome::kPrevented:
        ++k.prevented;
        repair_sum += e.repair_hours;
        ++repairs;
        break;
      case VisitOutcome::kNoFaultFound:
        ++k.no_fault_found;
        break;
    }
  }
  double interval_sum = 0.0;
  std::uint64_t intervals = 0;
  for (const ObservationSpan& span : run.observation) {
    auto it = failures.find(span.machine_id);
    if (it == failures.end()) continue;
    std::vector<Timestamp>& times = it->second;
    std::sort(times.begin(), times.end());
    Timestamp prev = span.start;
    for (Timestamp t : times) {
      interval_sum += static_cast<double>(t - prev) / static_cast<double>(kSecondsPerDay);
      ++intervals;
      prev = t;
    }
  }
  if (intervals > 0) k.mtbf_days = interval_sum / static_cast<double>(intervals);
  if (repairs > 0) k.mttr_hours = repair_sum / static_cast<double>(repairs);
  if (run.windows) {
    const learn::Confusion& c = *run.windows;
    if (c.tp + c.fn > 0) k.tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    if (c.fp + c.tn > 0) k.fpr = static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
  }
  return k;
}

namespace {

double reduction(double predictive, double baseline) {
  return baseline > 0.0 ? 1.0 - predictive / baseline : 0.0;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json report_value(const KpiReport& k) {
  return {{"policy", k.policy},
          {"machines", k.machines},
          {"unplanned_downtime_hours", k.unplanned_downtime_hours},
          {"dispatches", k.dispatches},
          {"no_fault_found", k.no_fault_found},
          {"failures", k.failures},
          {"prevented", k.prevented},
          {"mtbf_days", k.mtbf_days ? json(*k.mtbf_days) : json("no failures")},
          {"mttr_hours", optional_json(k.mttr_hours)},
          {"tpr", optional_json(k.tpr)},
          {"fpr", optional_json(k.fpr)}};
}

}  // namespace

KpiComparison compare_kpis(const KpiReport& predictive, const KpiReport& baseline) {
  KpiComparison c;
  c.predictive = predictive;
  c.baseline = baseline;
  c.downtime_reduction = reduction(predictive.unplanned_downtime_hours, baseline.unplanned_downtime_hours);
  c.dispatch_reduction = reduction(static_cast<double>(predictive.dispatches),
                                   static_cast<double>(baseline.dispatches));
  c.no_fault_found_reduction = reduction(static_cast<double>(predictive.no_fault_found),
                                         static_cast<double>(baseline.no_fault_found));
  return c;
}

std::string kpi_report_json(const KpiReport& report) { return report_value(report).dump(); }

std::string kpi_to_json(const KpiComparison& c, const std::string& fingerprint) {
  json j;
  j["format"] = "vendguard-kpi";
  j["version"] = 1;
  j["fingerprint"] = fingerprint;
  j["predictive"] = report_value(c.predictive);
  j["baseline"] = report_value(c.baseline);
  j["reductions"] = {{"unplanned_downtime", c.downtime_reduction},
                     {"dispatches", c.dispatch_reduction},
                     {"no_fault_found", c.no_fault_found_reduction}};
  return j.dump(2);
}

}  // namespace vendguard::prognosis
