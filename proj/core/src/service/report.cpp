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

#include "vendguard/service/report.hpp"

#include <cstdio>

#include "json.hpp"
#include "vendguard/error.hpp"

namespace vendguard::service {

using nlohmann::json;

namespace {

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::kFormat, std::string("malformed ") + what + ": " + e.what());
  }
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string cell(const json& v, int digits) {
  if (v.is_number()) return fixed(v.get<double>(), digits);
  if (v.is_string()) return v.get<std::string>();
  return "n/a";
}

std::string percent(const json& v) {
  if (!v.is_number()) return "n/a";
  return fixed(100.0 * v.get<double>(), 1) + "%";
}

void model_row(std::string& out, const char* name, const json& m) {
  out += "| ";
  out += name;
  for (const char* key : {"accuracy", "precision", "recall", "f1", "roc_auc"}) {
    out += " | " + cell(m.value(key, json()), 3);
  }
  out += " | " + cell(m.value("training_seconds", json()), 1) + " |\n";
}

void kpi_row(std::string& out, const std::string& label, const json& base, const json& pred, int digits) {
  out += "| " + label + " | " + cell(base, digits) + " | " + cell(pred, digits) + " |\n";
}

}  // namespace

std::string render_report(const std::string& metrics_json, const std::string& kpi_json) {
  std::string out = "# vendguard evaluation\n";
  if (!metrics_json.empty()) {
    const json m = parse(metrics_json, "metrics");
    out += "\n## Model performance (test split)\n\n";
    out += "| Model | Accuracy | Precision | Recall | F1-Score | ROC-AUC | Training Time (s) |\n";
    out += "|---|---|---|---|---|---|---|\n";
    if (m.contains("random_forest")) model_row(out, "Random Forest", m["random_forest"]);
    if (m.contains("lstm")) model_row(out, "LSTM", m["lstm"]);
  }
  if (!kpi_json.empty()) {
    const json k = parse(kpi_json, "kpi");
    if (!k.contains("baseline") || !k.contains("predictive")) fail(Errc::kFormat, "kpi without policies");
    const json& b = k["baseline"];
    const json& p = k["predictive"];
    out += "\n## Maintenance policies\n\n";
    out += "| Metric | " + b.value("policy", std::string("baseline")) + " | " +
           p.value("policy", std::string("predictive")) + " |\n";
    out += "|---|---|---|\n";
    kpi_row(out, "Unplanned downtime (h)", b["unplanned_downtime_hours"], p["unplanned_downtime_hours"], 1);
    kpi_row(out, "Technician dispatches", b["dispatches"], p["dispatches"], 0);
    kpi_row(out, "No-fault-found visits", b["no_fault_found"], p["no_fault_found"], 0);
    kpi_row(out, "Failures", b["failures"], p["failures"], 0);
    kpi_row(out, "Prevented failures", b["prevented"], p["prevented"], 0);
    kpi_row(out, "MTBF (days)", b["mtbf_days"], p["mtbf_days"], 1);
    kpi_row(out, "MTTR (hours)", b["mttr_hours"], p["mttr_hours"], 2);
    kpi_row(out, "TPR (windows)", b["tpr"], p["tpr"], 3);
    kpi_row(out, "FPR (windows)", b["fpr"], p["fpr"], 3);
    if (k.contains("reductions")) {
      const json& r = k["reductions"];
      out += "\n| Reduction | Value |\n|---|---|\n";
      out += "| Unplanned downtime | " + percent(r.value("unplanned_downtime", json())) + " |\n";
      out += "| Technician dispatches | " + percent(r.value("dispatches", json())) + " |\n";
      out += "| No-fault-found visits | " + percent(r.value("no_fault_found", json())) + " |\n";
    }
  }
  return out;
}

}  // namespace vendguard::service
