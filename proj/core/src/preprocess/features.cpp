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

#include "vendguard/preprocess/features.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "vendguard/error.hpp"
#include "vendguard/preprocess/signal.hpp"
#include "vendguard/preprocess/spectrum.hpp"

namespace vendguard::prep {

const std::array<std::string_view, kFeatureCount>& feature_names() {
  static const std::array<std::string_view, kFeatureCount> names = {
      "temp_mean",     "temp_max",          "temp_rise_rate",
      "vib_rms",       "vib_dominant_freq", "vib_dominant_amp",
      "current_mean",  "interaction_rate",  "temp_moving_avg_ratio",
  };
  return names;
}

std::string versioned_feature_name(std::size_t index) {
  if (index >= kFeatureCount) fail(Errc::kOutOfRange, "feature index out of range");
  return std::string(feature_names()[index]) + "@v" + std::to_string(kFeatureVersion);
}

void FeatureConfig::validate() const {
  if (window < 16) fail(Errc::kInvalidArgument, "feature window must be >= 16 samples");
  if (stride == 0) fail(Errc::kInvalidArgument, "feature stride must be >= 1");
  if (horizon_seconds <= 0) fail(Errc::kInvalidArgument, "label horizon must be positive");
  if (!(lowpass_alpha > 0.0 && lowpass_alpha <= 1.0)) {
    fail(Errc::kInvalidArgument, "lowpass alpha must be in (0, 1]");
  }
  if (!(z_threshold > 0.0)) fail(Errc::kInvalidArgument, "z threshold must be positive");
  if (zscore_block < 2) fail(Errc::kInvalidArgument, "z-score block must be >= 2 samples");
  if (ma_short == 0 || ma_long == 0) fail(Errc::kInvalidArgument, "moving-average windows must be >= 1");
}

namespace {

std::vector<double> remove_outliers_blockwise(std::vector<double> values, const FeatureConfig& config) {
  const std::size_t n = values.size();
  for (std::size_t begin = 0; begin < n; begin += config.zscore_block) {
    const std::size_t len = std::min(config.zscore_block, n - begin);
    if (len < 2) break;
    std::span<double> block(values.data() + begin, len);
    OutlierResult r = zscore_outliers(block, config.z_threshold);
    if (!r.flagged.empty()) std::copy(r.values.begin(), r.values.end(), block.begin());
  }
  return values;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

CleanSeries clean_series(const MachineSeries& raw, const FeatureConfig& config) {
  config.validate();
  CleanSeries out;
  out.series.machine_id = raw.machine_id;
  out.series.start = raw.start;
  out.series.cadence = raw.cadence;
  const std::size_t n = raw.size();
  out.missing.assign(n, 0);
  for (Channel c : {Channel::kTemperature, Channel::kVibration, Channel::kCurrent,
                    Channel::kInteractions}) {
    const std::vector<double>& src = raw.channel(c);
    if (src.size() != n) fail(Errc::kInvalidArgument, "channels differ in length");
    for (std::size_t i = 0; i < n; ++i) {
      if (std::isnan(src[i])) out.missing[i] = 1;
    }
    std::vector<double> values;
    try {
      values = interpolate(src);
    } catch (const Error& e) {
      fail(e.code(), raw.machine_id + " " + std::string(to_string(c)) + ": " + e.what());
    }
    if (c != Channel::kInteractions) {
      values = remove_outliers_blockwise(std::move(values), config);
      values = lowpass(values, config.lowpass_alpha);
    }
    out.series.channel(c) = std::move(values);
  }
  return out;
}

FeatureVector window_features(const CleanSeries& clean, std::size_t begin, std::size_t window,
                              const FeatureConfig& config) {
  const MachineSeries& s = clean.series;
  if (window < 4 || begin + window > s.size()) {
    fail(Errc::kOutOfRange, "feature window outside series");
  }
  const auto slice = [&](const std::vector<double>& v) {
    return std::span<const double>(v.data() + begin, window);
  };
  const auto temp = slice(s.temperature);
  const auto vib = slice(s.vibration);
  const auto cur = slice(s.current);
  const auto inter = slice(s.interactions);

  FeatureVector fv;
  fv.machine_id = s.machine_id;
  fv.window_start_time = s.time_at(begin);
  fv.window_end_time = s.time_at(begin + window - 1);
  FeatureArray& f = fv.features;

  f[kTempMean] = mean_of(temp);
  f[kTempMax] = *std::max_element(temp.begin(), temp.end());
  f[kTempRiseRate] = rise_rate(temp, s.cadence, static_cast<std::int64_t>(window - 1) * s.cadence);

  double sq = 0.0;
  for (double v : vib) sq += v * v;
  f[kVibRms] = std::sqrt(sq / static_cast<double>(window));
  const SpectralPeak peak = dft_spectrum(vib, static_cast<double>(s.cadence));
  f[kVibDominantFreq] = peak.frequency_hz;
  f[kVibDominantAmp] = peak.amplitude;

  f[kCurrentMean] = mean_of(cur);

  double events = 0.0;
  for (double v : inter) events += v;
  const double minutes = static_cast<double>(window) * static_cast<double>(s.cadence) / 60.0;
  f[kInteractionRate] = events / minutes;

  // Last values of the trailing moving averages over the window slice.
  const double ma_short = mean_of(temp.last(std::min(config.ma_short, window)));
  const double ma_long = mean_of(temp.last(std::min(config.ma_long, window)));
  f[kTempMovingAvgRatio] = ma_long == 0.0 ? 1.0 : ma_short / ma_long;

  if (!clean.missing.empty()) {
    std::size_t missing = 0;
    for (std::size_t i = begin; i < begin + window; ++i) missing += clean.missing[i];
    fv.missing_fraction = static_cast<double>(missing) / static_cast<double>(window);
  }
  for (double v : f) {
    if (!std::isfinite(v)) fail(Errc::kNumerical, "non-finite feature for " + s.machine_id);
  }
  return fv;
}

std::vector<FeatureVector> build_features(const CleanSeries& clean, const FeatureConfig& config) {
  config.validate();
  const std::size_t n = clean.series.size();
  if (n < config.window) {
    fail(Errc::kInvalidArgument, "series of " + std::to_string(n) +
                                     " samples is shorter than the feature window");
  }
  std::vector<FeatureVector> out;
  out.reserve((n - config.window) / config.stride + 1);
  for (std::size_t begin = 0; begin + config.window <= n; begin += config.stride) {
    out.push_back(window_features(clean, begin, config.window, config));
  }
  return out;
}

std::vector<FeatureVector> featurize_machine(const MachineSeries& raw, const FeatureConfig& config) {
  return build_features(clean_series(raw, config), config);
}

}  // namespace vendguard::prep
