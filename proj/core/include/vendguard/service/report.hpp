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

#include <string>

namespace vendguard::service {

// Markdown summary: a model comparison table (accuracy, precision, recall,
// F1, ROC-AUC, training time) and a system KPI table (downtime and dispatch
// reduction, MTBF, MTTR, TPR, FPR). Either JSON may be empty to omit its
// table. Throws Errc::kFormat on malformed input.
std::string render_report(const std::string& metrics_json, const std::string& kpi_json);

}  // namespace vendguard::service
