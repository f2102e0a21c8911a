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

#include <span>
#include <vector>

namespace vendguard::prognosis {

// P_f(t) = 1 - exp(-lambda t), t in days.
struct FailureCurve {
  double lambda = 0.0;  // per day
  double rmse = 0.0;    // of the fitted probabilities against the samples
  double t_start = 0.0;
  double t_end = 0.0;
};

double failure_probability(double lambda, double t_days);
double failure_probability(const FailureCurve& curve, double t_days);

// Least squares through the origin on -ln(1 - p) = lambda t. Probabilities
// are clamped to 1 - 1e-12 before the log. Throws Errc::kNoSignal if every p
// is zero and Errc::kInvalidArgument on negative t or p outside [0, 1].
FailureCurve fit_lambda(std::span<const double> t_days, std::span<const double> p);

struct CurvePoint {
  double t_days = 0.0;
  double probability = 0.0;
};

// n + 1 evenly spaced points on [0, t_end].
std::vector<CurvePoint> sample_curve(const FailureCurve& curve, double t_end_days, std::size_t n);

}  // namespace vendguard::prognosis
