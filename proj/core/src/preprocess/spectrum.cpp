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

#include "vendguard/preprocess/spectrum.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "vendguard/error.hpp"

namespace vendguard::prep {

namespace {

struct Plan {
  std::size_t n = 0;
  std::vector<std::size_t> factors;  // empty when Bluestein is used
  std::vector<Complex> twiddle;      // exp(-2 pi i j / n)
  // Bluestein
  std::size_t m = 0;
  std::vector<Complex> chirp;             // exp(-pi i j^2 / n), j < n
  std::vector<Complex> kernel_spectrum;   // FFT_m of the conjugate chirp
  std::shared_ptr<const Plan> sub;        // power-of-two plan of size m
};

std::shared_ptr<const Plan> plan_for(std::size_t n);

std::vector<std::size_t> small_factors(std::size_t n) {
  std::vector<std::size_t> out;
  while (n % 4 == 0) {
    out.push_back(4);
    n /= 4;
  }
  for (std::size_t p : {2, 3, 5, 7}) {
    while (n % p == 0) {
      out.push_back(p);
      n /= p;
    }
  }
  if (n != 1) out.clear();
  return out;
}

Complex unit_root(std::size_t j, std::size_t n, double sign) {
  const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(j) /
                       static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

// Recursive decimation in time. `level` indexes plan.factors; `stride` is the
// input stride at this level and `len` the transform length.
void mixed_radix(const Plan& plan, const Complex* in, std::size_t stride, Complex* out,
                 std::size_t len, std::size_t level) {
  if (len == 1) {
    out[0] = in[0];
    return;
  }
  const std::size_t p = plan.factors[level];
  const std::size_t m = len / p;
  for (std::size_t q = 0; q < p; ++q) {
    mixed_radix(plan, in + q * stride, stride * p, out + q * m, m, level + 1);
  }
  const std::size_t scale = plan.n / len;  // twiddle step for a length-len transform
  Complex tmp[7];
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t q = 0; q < p; ++q) {
      tmp[q] = out[q * m + k] * plan.twiddle[(q * k * scale) % plan.n];
    }
    for (std::size_t r = 0; r < p; ++r) {
      Complex acc = tmp[0];
      for (std::size_t q = 1; q < p; ++q) {
        acc += tmp[q] * plan.twiddle[((q * r * m) % len) * scale];
      }
      out[k + r * m] = acc;
    }
  }
}

std::vector<Complex> run(const Plan& plan, std::span<const Complex> input) {
  const std::size_t n = plan.n;
  std::vector<Complex> out(n);
  if (!plan.factors.empty() || n == 1) {
    mixed_radix(plan, input.data(), 1, out.data(), n, 0);
    return out;
  }
  std::vector<Complex> a(plan.m);
  for (std::size_t j = 0; j < n; ++j) a[j] = input[j] * plan.chirp[j];
  std::vector<Complex> fa = run(*plan.sub, a);
  for (std::size_t j = 0; j < plan.m; ++j) fa[j] *= plan.kernel_spectrum[j];
  // Inverse via conjugation.
  for (Complex& c : fa) c = std::conj(c);
  std::vector<Complex> conv = run(*plan.sub, fa);
  const double inv_m = 1.0 / static_cast<double>(plan.m);
  for (std::size_t k = 0; k < n; ++k) out[k] = std::conj(conv[k]) * inv_m * plan.chirp[k];
  return out;
}

std::shared_ptr<const Plan> build_plan(std::size_t n) {
  auto plan = std::make_shared<Plan>();
  plan->n = n;
  plan->factors = small_factors(n);
  if (!plan->factors.empty() || n == 1) {
    plan->twiddle.resize(n);
    for (std::size_t j = 0; j < n; ++j) plan->twiddle[j] = unit_root(j, n, -1.0);
    return plan;
  }
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  plan->m = m;
  plan->sub = plan_for(m);
  plan->chirp.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    // j^2 mod 2n keeps the angle argument small and exact.
    const std::size_t e = (j * j) % (2 * n);
    plan->chirp[j] = unit_root(e, 2 * n, -1.0);
  }
  std::vector<Complex> b(m);
  b[0] = std::conj(plan->chirp[0]);
  for (std::size_t j = 1; j < n; ++j) {
    b[j] = std::conj(plan->chirp[j]);
    b[m - j] = b[j];
  }
  plan->kernel_spectrum = run(*plan->sub, b);
  return plan;
}

std::shared_ptr<const Plan> plan_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::shared_ptr<const Plan>> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  auto plan = build_plan(n);  // may recurse into plan_for for the Bluestein size
  std::lock_guard lock(mutex);
  return cache.emplace(n, std::move(plan)).first->second;
}

}  // namespace

std::vector<Complex> fft(std::span<const Complex> input) {
  if (input.empty()) return {};
  return run(*plan_for(input.size()), input);
}

std::vector<Complex> inverse_fft(std::span<const Complex> input) {
  std::vector<Complex> conj_in(input.begin(), input.end());
  for (Complex& c : conj_in) c = std::conj(c);
  std::vector<Complex> out = fft(conj_in);
  const double inv_n = out.empty() ? 0.0 : 1.0 / static_cast<double>(out.size());
  for (Complex& c : out) c = std::conj(c) * inv_n;
  return out;
}

SpectralPeak dft_spectrum(std::span<const double> window, double cadence_seconds) {
  const std::size_t n = window.size();
  if (n < 4) fail(Errc::kInvalidArgument, "dft_spectrum needs at least 4 samples");
  if (!(cadence_seconds > 0.0)) fail(Errc::kInvalidArgument, "cadence must be positive");
  double mean = 0.0;
  for (double v : window) mean += v;
  mean /= static_cast<double>(n);
  std::vector<Complex> centred(n);
  double spread = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    centred[i] = window[i] - mean;
    spread = std::max(spread, std::fabs(window[i] - mean));
  }
  if (spread <= 1e-12 * std::max(1.0, std::fabs(mean))) return {};
  const std::vector<Complex> spectrum = fft(centred);
  SpectralPeak peak;
  double best = -1.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double mag = std::abs(spectrum[k]);
    if (mag > best) {
      best = mag;
      peak.bin = k;
    }
  }
  peak.amplitude = 2.0 * best / static_cast<double>(n);
  peak.frequency_hz = static_cast<double>(peak.bin) / (static_cast<double>(n) * cadence_seconds);
  return peak;
}

SpectralPeak dft_spectrum(std::span<const double> window, std::span<const Timestamp> timestamps) {
  if (timestamps.size() != window.size()) {
    fail(Errc::kInvalidArgument, "dft_spectrum: timestamps and values differ in length");
  }
  if (timestamps.size() < 2) fail(Errc::kInvalidArgument, "dft_spectrum needs at least 4 samples");
  const Timestamp step = timestamps[1] - timestamps[0];
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (timestamps[i] - timestamps[i - 1] != step || step <= 0) {
      fail(Errc::kInvalidArgument, "dft_spectrum requires uniform sampling");
    }
  }
  return dft_spectrum(window, static_cast<double>(step));
}

}  // namespace vendguard::prep
