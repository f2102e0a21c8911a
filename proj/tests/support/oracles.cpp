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

#include "oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <unistd.h>

namespace vg_test {

namespace {

struct BitReader {
  std::span<const std::uint8_t> in;
  std::size_t pos = 0;
  std::uint32_t buf = 0;
  int count = 0;

  int bits(int need) {
    std::uint32_t v = buf;
    while (count < need) {
      if (pos >= in.size()) throw std::runtime_error("inflate: out of input");
      v |= static_cast<std::uint32_t>(in[pos++]) << count;
      count += 8;
    }
    buf = v >> need;
    count -= need;
    return static_cast<int>(v & ((1u << need) - 1));
  }
};

struct Huffman {
  std::vector<int> count = std::vector<int>(16, 0);
  std::vector<int> symbol;
};

Huffman build(const std::vector<int>& lengths) {
  Huffman h;
  h.symbol.resize(lengths.size());
  for (int len : lengths) h.count[len]++;
  std::vector<int> offs(16, 0);
  for (int len = 1; len < 15; ++len) offs[len + 1] = offs[len] + h.count[len];
  for (std::size_t s = 0; s < lengths.size(); ++s) {
    if (lengths[s] != 0) h.symbol[offs[lengths[s]]++] = static_cast<int>(s);
  }
  return h;
}

int decode(BitReader& br, const Huffman& h) {
  int code = 0, first = 0, index = 0;
  for (int len = 1; len < 16; ++len) {
    code |= br.bits(1);
    const int count = h.count[len];
    if (code - count < first) return h.symbol[index + (code - first)];
    index += count;
    first += count;
    first <<= 1;
    code <<= 1;
  }
  throw std::runtime_error("inflate: bad code");
}

constexpr int kLenBase[] = {3, 4, 5, 6, 7, 8, 9, 10, 11, 13, 15, 17, 19, 23, 27, 31,
                            35, 43, 51, 59, 67, 83, 99, 115, 131, 163, 195, 227, 258};
constexpr int kLenExtra[] = {0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2,
                             3, 3, 3, 3, 4, 4, 4, 4, 5, 5, 5, 5, 0};
constexpr int kDistBase[] = {1, 2, 3, 4, 5, 7, 9, 13, 17, 25, 33, 49, 65, 97, 129,
                             193, 257, 385, 513, 769, 1025, 1537, 2049, 3073, 4097,
                             6145, 8193, 12289, 16385, 24577};
constexpr int kDistExtra[] = {0, 0, 0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6,
                              6, 7, 7, 8, 8, 9, 9, 10, 10, 11, 11, 12, 12, 13, 13};

void codes(BitReader& br, std::vector<std::uint8_t>& out, const Huffman& lit, const Huffman& dist) {
  for (;;) {
    int sym = decode(br, lit);
    if (sym < 256) {
      out.push_back(static_cast<std::uint8_t>(sym));
    } else if (sym == 256) {
      return;
    } else {
      sym -= 257;
      if (sym >= 29) throw std::runtime_error("inflate: bad length symbol");
      const int len = kLenBase[sym] + br.bits(kLenExtra[sym]);
      const int ds = decode(br, dist);
      if (ds >= 30) throw std::runtime_error("inflate: bad distance symbol");
      const std::size_t d = static_cast<std::size_t>(kDistBase[ds] + br.bits(kDistExtra[ds]));
      if (d > out.size()) throw std::runtime_error("inflate: distance too far");
      for (int i = 0; i < len; ++i) out.push_back(out[out.size() - d]);
    }
  }
}

}  // namespace

std::vector<std::uint8_t> reference_inflate(std::span<const std::uint8_t> input) {
  BitReader br{input};
  std::vector<std::uint8_t> out;
  int last = 0;
  do {
    last = br.bits(1);
    const int type = br.bits(2);
    if (type == 0) {
      br.buf = 0;
      br.count = 0;
      if (br.pos + 4 > input.size()) throw std::runtime_error("inflate: short stored header");
      const int len = input[br.pos] | (input[br.pos + 1] << 8);
      const int nlen = input[br.pos + 2] | (input[br.pos + 3] << 8);
      if (len != (~nlen & 0xffff)) throw std::runtime_error("inflate: stored length mismatch");
      br.pos += 4;
      if (br.pos + static_cast<std::size_t>(len) > input.size()) throw std::runtime_error("inflate: short stored block");
      out.insert(out.end(), input.begin() + static_cast<std::ptrdiff_t>(br.pos),
                 input.begin() + static_cast<std::ptrdiff_t>(br.pos + len));
      br.pos += static_cast<std::size_t>(len);
    } else if (type == 1) {
      std::vector<int> l(288);
      for (int i = 0; i < 144; ++i) l[i] = 8;
      for (int i = 144; i < 256; ++i) l[i] = 9;
      for (int i = 256; i < 280; ++i) l[i] = 7;
      for (int i = 280; i < 288; ++i) l[i] = 8;
      codes(br, out, build(l), build(std::vector<int>(30, 5)));
    } else if (type == 2) {
      const int nlen = br.bits(5) + 257;
      const int ndist = br.bits(5) + 1;
      const int ncode = br.bits(4) + 4;
      static constexpr int order[19] = {16, 17, 18, 0, 8, 7, 9, 6, 10, 5, 11, 4, 12, 3, 13, 2, 14, 1, 15};
      std::vector<int> cl(19, 0);
      for (int i = 0; i < ncode; ++i) cl[order[i]] = br.bits(3);
      const Huffman clh = build(cl);
      std::vector<int> lengths;
      while (static_cast<int>(lengths.size()) < nlen + ndist) {
        const int sym = decode(br, clh);
        if (sym < 16) {
          lengths.push_back(sym);
        } else {
          int rep = 0, val = 0;
          if (sym == 16) {
            if (lengths.empty()) throw std::runtime_error("inflate: repeat with no length");
            val = lengths.back();
            rep = 3 + br.bits(2);
          } else if (sym == 17) {
            rep = 3 + br.bits(3);
          } else {
            rep = 11 + br.bits(7);
          }
          lengths.insert(lengths.end(), rep, val);
        }
      }
      if (static_cast<int>(lengths.size()) != nlen + ndist) throw std::runtime_error("inflate: too many lengths");
      const std::vector<int> ll(lengths.begin(), lengths.begin() + nlen);
      const std::vector<int> dl(lengths.begin() + nlen, lengths.end());
      codes(br, out, build(ll), build(dl));
    } else {
      throw std::runtime_error("inflate: reserved block type");
    }
  } while (!last);
  return out;
}

std::vector<std::complex<long double>> naive_dft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<long double>> out(n);
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<long double> acc = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const long double a = -two_pi * static_cast<long double>((k * t) % n) / static_cast<long double>(n);
      acc += static_cast<long double>(x[t]) * std::complex<long double>(std::cos(a), std::sin(a));
    }
    out[k] = acc;
  }
  return out;
}

NaivePeak naive_dominant(std::span<const double> window) {
  const std::size_t n = window.size();
  long double mean = 0;
  for (double v : window) mean += v;
  mean /= static_cast<long double>(n);
  std::vector<double> centred(n);
  for (std::size_t i = 0; i < n; ++i) centred[i] = static_cast<double>(window[i] - mean);
  const auto spectrum = naive_dft(centred);
  NaivePeak best;
  long double best_mag = -1;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const long double mag = std::abs(spectrum[k]);
    if (mag > best_mag) {
      best_mag = mag;
      best.bin = k;
    }
  }
  best.amplitude = static_cast<double>(2.0L * best_mag / static_cast<long double>(n));
  return best;
}

std::vector<std::uint8_t> reference_encode(const std::string& machine_id, std::uint64_t sequence,
                                           const std::string& payload_json, std::uint8_t flags) {
  std::vector<std::uint8_t> out = {'V', 'G', 1};
  for (std::size_t i = 0; i < 16; ++i) {
    out.push_back(i < machine_id.size() ? static_cast<std::uint8_t>(machine_id[i]) : 0);
  }
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(sequence >> shift));
  out.push_back(flags);
  const auto n = static_cast<std::uint32_t>(payload_json.size());
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(n >> shift));
  out.insert(out.end(), payload_json.begin(), payload_json.end());
  return out;
}

double pairwise_auc(std::span<const double> scores, std::span<const int> labels) {
  double good = 0;
  double pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1;
      if (scores[i] > scores[j]) good += 1;
      else if (scores[i] == scores[j]) good += 0.5;
    }
  }
  return good / pairs;
}

double counts_gini(double c0, double c1) {
  const double n = c0 + c1;
  if (n == 0) return 0.0;
  return 1.0 - (c0 / n) * (c0 / n) - (c1 / n) * (c1 / n);
}

BruteSplit brute_force_split(const std::vector<std::vector<double>>& rows, const std::vector<int>& y) {
  BruteSplit best;
  const std::size_t d = rows.empty() ? 0 : rows[0].size();
  const double n = static_cast<double>(rows.size());
  for (std::size_t f = 0; f < d; ++f) {
    std::vector<double> values;
    for (const auto& r : rows) values.push_back(r[f]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      const double thr = 0.5 * (values[k] + values[k + 1]);
      double l0 = 0, l1 = 0, r0 = 0, r1 = 0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const bool left = rows[i][f] <= thr;
        (y[i] ? (left ? l1 : r1) : (left ? l0 : r0)) += 1;
      }
      const double g = ((l0 + l1) * counts_gini(l0, l1) + (r0 + r1) * counts_gini(r0, r1)) / n;
      if (g < best.weighted_gini - 1e-15) {
        best = {static_cast<int>(f), thr, g};
      }
    }
  }
  return best;
}

std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("vg_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::vector<vendguard::SensorFrame> synthetic_frames(const std::string& machine_id, std::size_t n,
                                                     std::uint64_t seed, double missing_rate) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::poisson_distribution<std::int64_t> taps(0.3);
  std::vector<vendguard::SensorFrame> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    vendguard::SensorFrame f;
    f.machine_id = machine_id;
    f.timestamp = 1704067200 + static_cast<std::int64_t>(i) * 10;
    if (u(gen) >= missing_rate) f.temperature = 42.0 + 0.5 * noise(gen);
    if (u(gen) >= missing_rate) f.vibration = std::abs(0.2 + 0.03 * noise(gen));
    if (u(gen) >= missing_rate) f.current = std::abs(1.2 + 0.05 * noise(gen));
    if (u(gen) >= missing_rate) f.interactions = taps(gen);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace vg_test
