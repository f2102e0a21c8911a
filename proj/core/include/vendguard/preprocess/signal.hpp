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
#include <span>
#include <vector>

namespace vendguard::prep {

// First-order exponential smoothing, y[0] = x[0], y[t] = a*x[t] + (1-a)*y[t-1].
// A NaN input carries the previous output forward.
std::vector<double> lowpass(std::span<const double> values, double alpha = 0.3);

// Fills NaN runs linearly between their nearest finite neighbours; leading and
// trailing runs take the nearest finite value. Throws Errc::kNoSignal if
// nothing is finite.
std::vector<double> interpolate(std::span<const double> values);

struct OutlierResult {
  std::vector<double> values;
  std::vector<std::size_t> flagged;
};

// Flags |x - mean| / sd > threshold (population sd) and replaces the flagged
// samples by interpolation over their positions.
OutlierResult zscore_outliers(std::span<const double> values, double threshold = 3.0);

// Trailing mean over min(window, t + 1) samples.
std::vector<double> moving_average(std::span<const double> values, std::size_t window);

// Least-squares slope over the trailing `span_seconds`, in units per minute.
double rise_rate(std::span<const double> values, std::int64_t cadence_seconds,
                 std::int64_t span_seconds);

}  // namespace vendguard::prep
