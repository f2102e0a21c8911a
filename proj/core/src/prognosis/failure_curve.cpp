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

#include "vendguard/prognosis/failure_curve.hpp"

#include <algorithm>
#include <cmath>

#include "vendguard/error.hpp"

namespace vendguard::prognosis {

double failure_probability(double lambda, double t_days) {
  if (t_days < 0.0) fail(Errc::kInvalidArgument, "failure_probability requires t >= 0");
  if (lambda < 0.0) fail(Errc::kInvalidArgument, "failure rate must be >= 0");
  return -std::expm1(-lambda * t_days);
}

double failure_probability(const FailureCurve& curve, double t_days) {
  return failure_probability(curve.lambda, t_days);
}

FailureCurve fit_lambda(std::span<const double> t_days, std::span<const double> p) {
  if (t_days.size() != p.size()) fail(Errc::kInvalidArgument, "fit_lambda: t and p differ in length");
  if (t_days.size() < 2) fail(Errc::kInvalidArgument, "fit_lambda needs at least 2 samples");
  constexpr double kMaxP = 1.0 - 1e-12;
  double stt = 0.0;
  double stg = 0.0;
  bool any_signal = false;
  FailureCurve curve;
  curve.t_start = t_days[0];
  curve.t_end = t_days[0];
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double t = t_days[i];
    if (!(t >= 0.0) || !std::isfinite(t)) fail(Errc::kInvalidArgument, "fit_lambda: t must be finite and >= 0");
    if (!(p[i] >= 0.0 && p[i] <= 1.0)) fail(Errc::kInvalidArgument, "fit_lambda: p must be in [0, 1]");
    if (p[i] > 0.0) any_signal = true;
    const double g = -std::log1p(-std::min(p[i], kMaxP));
    stt += t * t;
    stg += t * g;
    curve.t_start = std::min(curve.t_start, t);
    curve.t_end = std::max(curve.t_end, t);
  }
  if (!any_signal) fail(Errc::kNoSignal, "fit_lambda: every probability is zero");
  if (stt == 0.0) fail(Errc::kNoSignal, "fit_lambda: every sample is at t = 0");
  curve.lambda = stg / stt;
  double ss = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r = failure_probability(curve.lambda, t_days[i]) - p[i];
    ss += r * r;
  }
  curve.rmse = std::sqrt(ss / static_cast<double>(p.size()));
  return curve;
}

std::vector<CurvePoint> sample_curve(const FailureCurve& curve, double t_end_days, std::size_t n) {
  if (n == 0 || !(t_end_days > 0.0)) fail(Errc::kInvalidArgument, "sample_curve needs n >= 1 and t_end > 0");
  std::vector<CurvePoint> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = t_end_days * static_cast<double>(i) / static_cast<double>(n);
    out.push_back({t, failure_probability(curve, t)});
  }
  return out;
}

}  // namespace vendguard::prognosis
