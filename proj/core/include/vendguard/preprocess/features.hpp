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

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vendguard/types.hpp"

namespace vendguard::prep {

inline constexpr int kFeatureVersion = 1;
inline constexpr std::size_t kFeatureCount = 9;

enum FeatureIndex : std::size_t {
  kTempMean = 0,
  kTempMax,
  kTempRiseRate,
  kVibRms,
  kVibDominantFreq,
  kVibDominantAmp,
  kCurrentMean,
  kInteractionRate,
  kTempMovingAvgRatio,
};

const std::array<std::string_view, kFeatureCount>& feature_names();
// "temp_mean@v1" and so on.
std::string versioned_feature_name(std::size_t index);

using FeatureArray = std::array<double, kFeatureCount>;

struct FeatureVector {
  MachineId machine_id;
  Timestamp window_start_time = 0;
  Timestamp window_end_time = 0;  // timestamp of the last sample in the window
  FeatureArray features{};
  // Share of frames in the window with at least one missing channel. Kept
  // beside the model input; alert attribution uses it.
  double missing_fraction = 0.0;
  int label = -1;  // -1 unlabeled, 0 Normal, 1 Fault

  bool operator==(const FeatureVector&) const = default;
};

struct FeatureConfig {
  std::size_t window = 60;
  std::size_t stride = 30;
  std::int64_t horizon_seconds = 24 * kSecondsPerHour;
  double lowpass_alpha = 0.3;
  double z_threshold = 3.0;
  std::size_t zscore_block = 60;
  std::size_t ma_short = 6;
  std::size_t ma_long = 60;

  void validate() const;
  bool operator==(const FeatureConfig&) const = default;
};

// Cleaned copy of a raw series plus the per-frame missing mask of the input.
struct CleanSeries {
  MachineSeries series;                // no NaN left
  std::vector<std::uint8_t> missing;   // 1 if any channel was missing
};

// interpolate, then per-block z-score outlier replacement, then low-pass on
// temperature, vibration and current. Interactions are only interpolated.
CleanSeries clean_series(const MachineSeries& raw, const FeatureConfig& config = {});

// Features of samples [begin, begin + window) of a clean series.
FeatureVector window_features(const CleanSeries& clean, std::size_t begin, std::size_t window,
                              const FeatureConfig& config = {});

// One vector per stride step over a clean series. Throws if the series is
// shorter than one window.
std::vector<FeatureVector> build_features(const CleanSeries& clean,
                                          const FeatureConfig& config = {});

// clean_series + build_features.
std::vector<FeatureVector> featurize_machine(const MachineSeries& raw,
                                             const FeatureConfig& config = {});

}  // namespace vendguard::prep
