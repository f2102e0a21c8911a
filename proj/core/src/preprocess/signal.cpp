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

#include "vendguard/preprocess/signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vendguard/error.hpp"

namespace vendguard::prep {

std::vector<double> lowpass(std::span<const double> values, double alpha) {
  if (values.empty()) fail(Errc::kInvalidArgument, "lowpass of an empty series");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    fail(Errc::kInvalidArgument, "lowpass alpha must be in (0, 1]");
  }
  std::vector<double> out(values.size());
  double y = values[0];
  out[0] = y;
  for (std::size_t t = 1; t < values.size(); ++t) {
    const double x = values[t];
    if (std::isnan(y)) {
      y = x;
    } else if (!std::isnan(x)) {
      y = alpha * x + (1.0 - alpha) * y;
    }
    out[t] = y;
  }
  return out;
}

std::vector<double> interpolate(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  const std::size_t n = out.size();
  std::size_t prev = n;  // index of last finite value seen
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(out[i])) continue;
    if (prev == n) {
      for (std::size_t j = 0; j < i; ++j) out[j] = out[i];
    } else if (i - prev > 1) {
      const double a = out[prev];
      const double b = out[i];
      const double span = static_cast<double>(i - prev);
      for (std::size_t j = prev + 1; j < i; ++j) {
        out[j] = a + (b - a) * (static_cast<double>(j - prev) / span);
      }
    }
    prev = i;
  }
  if (n > 0 && prev == n) fail(Errc::kNoSignal, "cannot interpolate an all-missing series");
  for (std::size_t j = prev + 1; j < n; ++j) out[j] = out[prev];
  return out;
}

OutlierResult zscore_outliers(std::span<const double> values, double threshold) {
  if (values.size() < 2) fail(Errc::kInvalidArgument, "zscore_outliers needs at least 2 samples");
  double mean = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) fail(Errc::kInvalidArgument, "zscore_outliers requires finite values");
    mean += v;
  }
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size()));

  OutlierResult result;
  result.values.assign(values.begin(), values.end());
  if (sd == 0.0) return result;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::fabs(values[i] - mean) / sd > threshold) {
      result.flagged.push_back(i);
      result.values[i] = std::nan("");
    }
  }
  if (!result.flagged.empty()) result.values = interpolate(result.values);
  return result;
}

std::vector<double> moving_average(std::span<const double> values, std::size_t window) {
  if (window == 0) fail(Errc::kInvalidArgument, "moving_average window must be >= 1");
  std::vector<double> out(values.size());
  for (std::size_t t = 0; t < values.size(); ++t) {
    const std::size_t lo = t + 1 >= window ? t + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t i = lo; i <= t; ++i) sum += values[i];
    out[t] = sum / static_cast<double>(t + 1 - lo);
  }
  return out;
}

double rise_rate(std::span<const double> values, std::int64_t cadence_seconds,
                 std::int64_t span_seconds) {
  if (cadence_seconds <= 0) fail(Errc::kInvalidArgument, "cadence must be positive");
  if (span_seconds < cadence_seconds) {
    fail(Errc::kInvalidArgument, "rise_rate span must cover at least one cadence");
  }
  const std::size_t want = static_cast<std::size_t>(span_seconds / cadence_seconds) + 1;
  const std::size_t n = std::min(want, values.size());
  if (n < 2) fail(Errc::kInvalidArgument, "rise_rate needs at least 2 samples");
  const auto tail = values.subspan(values.size() - n);
  // Centred abscissa keeps the normal equations well conditioned.
  const double tbar = static_cast<double>(n - 1) / 2.0;
  double ybar = 0.0;
  for (double v : tail) ybar += v;
  ybar /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = static_cast<double>(i) - tbar;
    sxy += dt * (tail[i] - ybar);
    sxx += dt * dt;
  }
  const double per_sample = sxy / sxx;
  return per_sample * 60.0 / static_cast<double>(cadence_seconds);
}

}  // namespace vendguard::prep
