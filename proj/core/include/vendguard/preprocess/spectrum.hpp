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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vendguard/types.hpp"

namespace vendguard::prep {

using Complex = std::complex<double>;

// Forward DFT, X[k] = sum_j x[j] exp(-2 pi i j k / n), any n >= 1. Sizes whose
// prime factors are all <= 7 use a mixed-radix transform; everything else goes
// through Bluestein's chirp-z. Plans are cached per size and thread-safe.
std::vector<Complex> fft(std::span<const Complex> input);
std::vector<Complex> inverse_fft(std::span<const Complex> input);  // scaled by 1/n

struct SpectralPeak {
  std::size_t bin = 0;
  double frequency_hz = 0.0;
  double amplitude = 0.0;  // 2|X[k]| / N
};

// Dominant non-DC bin of the mean-removed window (bins 1..N/2). Ties go to
// the lowest bin. A window with no variation yields {0, 0, 0}.
SpectralPeak dft_spectrum(std::span<const double> window, double cadence_seconds);
// Same, after checking that `timestamps` are uniformly spaced.
SpectralPeak dft_spectrum(std::span<const double> window, std::span<const Timestamp> timestamps);

}  // namespace vendguard::prep
