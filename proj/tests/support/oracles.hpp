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

// Independent reference implementations used only by the tests. None of
// them share code with the library.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vendguard/types.hpp"

namespace vg_test {

// Bit-by-bit RFC 1951 decoder (stored, fixed and dynamic Huffman blocks).
std::vector<std::uint8_t> reference_inflate(std::span<const std::uint8_t> input);

// O(n^2) DFT in long double.
std::vector<std::complex<long double>> naive_dft(std::span<const double> x);

struct NaivePeak {
  std::size_t bin = 0;
  double amplitude = 0.0;
};
// Mean removed, bins 1..n/2, amplitude 2|X|/n, lowest bin on ties.
NaivePeak naive_dominant(std::span<const double> window);

// Second encoder written straight from the byte layout, payload uncompressed.
std::vector<std::uint8_t> reference_encode(const std::string& machine_id, std::uint64_t sequence,
                                           const std::string& payload_json, std::uint8_t flags = 0);

// Fraction of correctly ordered (positive, negative) pairs, ties count 1/2.
double pairwise_auc(std::span<const double> scores, std::span<const int> labels);

struct BruteSplit {
  int feature = -1;
  double threshold = 0.0;
  double weighted_gini = 1.0;
};
// Exhaustive search over every feature and every midpoint threshold.
BruteSplit brute_force_split(const std::vector<std::vector<double>>& rows, const std::vector<int>& y);

// Central differences of f around x.
std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double h);

// Pearson-free gini on raw counts.
double counts_gini(double c0, double c1);

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Deterministic synthetic frame stream for wire tests.
std::vector<vendguard::SensorFrame> synthetic_frames(const std::string& machine_id, std::size_t n,
                                                     std::uint64_t seed, double missing_rate = 0.05);

}  // namespace vg_test
