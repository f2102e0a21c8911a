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
#include <optional>
#include <string>

#include "vendguard/prognosis/policy_sim.hpp"

namespace vendguard::prognosis {

struct KpiReport {
  std::string policy;
  std::uint64_t machines = 0;
  double unplanned_downtime_hours = 0.0;
  std::uint64_t dispatches = 0;
  std::uint64_t no_fault_found = 0;
  std::uint64_t failures = 0;   // realized
  std::uint64_t prevented = 0;
  // Mean interval between consecutive realized failures of a machine, the
  // first measured from the start of observation; pooled over machines.
  // Empty when nothing failed.
  std::optional<double> mtbf_days;
  // Mean duration of every repair: reactive ones and preemptive ones.
  std::optional<double> mttr_hours;
  std::optional<double> tpr;
  std::optional<double> fpr;
};

KpiReport compute_kpis(const PolicyRun& run);

struct KpiComparison {
  KpiReport predictive;
  KpiReport baseline;
  double downtime_reduction = 0.0;   // 1 - predictive / baseline
  double dispatch_reduction = 0.0;
  double no_fault_found_reduction = 0.0;
};

KpiComparison compare_kpis(const KpiReport& predictive, const KpiReport& baseline);

// Canonical JSON; identical inputs give identical bytes.
std::string kpi_to_json(const KpiComparison& comparison, const std::string& fingerprint);
std::string kpi_report_json(const KpiReport& report);

}  // namespace vendguard::prognosis
