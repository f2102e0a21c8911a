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

#include <benchmark/benchmark.h>

#include <random>

#include "vendguard/learn/forest.hpp"
#include "vendguard/learn/lstm.hpp"
#include "vendguard/preprocess/spectrum.hpp"
#include "vendguard/wire/codec.hpp"

using namespace vendguard;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d(0, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

void BM_Fft(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 1);
  std::vector<prep::Complex> c(x.begin(), x.end());
  for (auto _ : state) benchmark::DoNotOptimize(prep::fft(c));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Fft)->Arg(60)->Arg(64)->Arg(97)->Arg(1024)->Arg(1021);

void BM_DominantFrequency(benchmark::State& state) {
  const auto x = noise(60, 2);
  for (auto _ : state) benchmark::DoNotOptimize(prep::dft_spectrum(x, 10.0));
}
BENCHMARK(BM_DominantFrequency);

void BM_TrainForest(benchmark::State& state) {
  const std::size_t rows = static_cast<std::size_t>(state.range(0));
  const auto v = noise(rows * 9, 3);
  learn::Matrix x(rows, 9);
  x.data = v;
  std::vector<int> y(rows);
  for (std::size_t i = 0; i < rows; ++i) y[i] = x.at(i, 0) + 0.5 * x.at(i, 3) > 1.0;
  learn::ForestConfig c;
  c.trees = 10;
  for (auto _ : state) benchmark::DoNotOptimize(learn::train_forest(x, y, c));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows * c.trees));
}
BENCHMARK(BM_TrainForest)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_LstmGradient(benchmark::State& state) {
  const auto m = learn::lstm_init(9, 16, 10, 4);
  learn::Sequences s;
  s.window = 10;
  s.input_size = 9;
  for (int i = 0; i < 64; ++i) s.push(noise(90, 10 + i), i % 2, i);
  for (auto _ : state) benchmark::DoNotOptimize(learn::lstm_gradient(m, s));
}
BENCHMARK(BM_LstmGradient)->Unit(benchmark::kMicrosecond);

wire::TelemetryBatch batch(bool compressed) {
  wire::TelemetryBatch b;
  b.machine_id = "M000";
  b.sequence_number = 1;
  b.compressed = compressed;
  const auto v = noise(60 * 3, 5);
  for (int i = 0; i < 60; ++i) {
    SensorFrame f;
    f.machine_id = "M000";
    f.timestamp = 1704067200 + 10 * i;
    f.temperature = 42 + v[i];
    f.vibration = 0.2 + 0.03 * v[60 + i];
    f.current = 1.2 + 0.05 * v[120 + i];
    f.interactions = i % 7 == 0;
    b.frames.push_back(f);
  }
  return b;
}

void BM_EncodeBatch(benchmark::State& state) {
  const auto b = batch(state.range(0) != 0);
  for (auto _ : state) benchmark::DoNotOptimize(wire::encode_batch(b));
}
BENCHMARK(BM_EncodeBatch)->Arg(0)->Arg(1);

void BM_DecodeBatch(benchmark::State& state) {
  const auto bytes = wire::encode_batch(batch(state.range(0) != 0));
  for (auto _ : state) benchmark::DoNotOptimize(wire::decode_batch(bytes));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_DecodeBatch)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
