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

#include "vendguard/preprocess/features.hpp"

namespace vendguard::learn {

// Fixed-length sequences of feature rows, flattened [sequence][step][feature].
struct Sequences {
  std::size_t window = 0;
  std::size_t input_size = 0;
  std::vector<double> data;
  std::vector<int> labels;            // label of the last step; -1 if unlabeled
  std::vector<std::size_t> target;    // index of the last step in the source list

  std::size_t size() const { return labels.size(); }
  std::span<const double> sequence(std::size_t i) const {
    return {data.data() + i * window * input_size, window * input_size};
  }
  void push(std::span<const double> steps, int label, std::size_t target_index);
};

// Sequences of `window` consecutive vectors of one machine, ending at every
// vector whose predecessors are contiguous (end times at most `max_step`
// apart) and whose end time is >= min_end_time. `vectors` may be in any order.
Sequences make_sequences(const std::vector<prep::FeatureVector>& vectors, std::size_t window,
                         std::int64_t max_step_seconds, Timestamp min_end_time = INT64_MIN);

struct LstmConfig {
  std::size_t hidden = 16;
  std::size_t window = 10;
  std::size_t epochs = 50;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 64;  // 0 means full batch
  bool class_weighted = false;
  std::uint64_t seed = 42;

  void validate() const;
  bool operator==(const LstmConfig&) const = default;
};

// Single-layer LSTM with gates ordered input, forget, output, candidate. All
// parameters live in one flat vector:
//   W [4H x I] | U [4H x H] | b [4H] | v [H] | c
// Inputs are standardised with the stored mean/std before the first gate.
struct LstmModel {
  std::size_t input_size = 0;
  std::size_t hidden = 0;
  std::size_t window = 0;
  std::vector<double> params;
  std::vector<double> input_mean;
  std::vector<double> input_std;
  std::vector<double> epoch_loss;
  LstmConfig config;

  std::size_t w_offset() const { return 0; }
  std::size_t u_offset() const { return 4 * hidden * input_size; }
  std::size_t b_offset() const { return u_offset() + 4 * hidden * hidden; }
  std::size_t v_offset() const { return b_offset() + 4 * hidden; }
  std::size_t c_offset() const { return v_offset() + hidden; }
  std::size_t param_count() const { return c_offset() + 1; }
};

std::size_t lstm_param_count(std::size_t input_size, std::size_t hidden);

// Weights uniform in +-1/sqrt(hidden), biases 0 except forget bias 1.0,
// identity input standardisation.
LstmModel lstm_init(std::size_t input_size, std::size_t hidden, std::size_t window,
                    std::uint64_t seed);

// Probability in (0, 1) for one window x input sequence.
double lstm_forward(const LstmModel& model, std::span<const double> sequence);
std::vector<double> lstm_predict_proba(const LstmModel& model, const Sequences& sequences);

// Mean binary cross-entropy over the sequences and its gradient with respect
// to model.params (input standardisation held fixed).
double lstm_loss(const LstmModel& model, const Sequences& sequences);
std::vector<double> lstm_gradient(const LstmModel& model, const Sequences& sequences);

// Adam on minibatches, inputs standardised with statistics of `train`.
// Throws Errc::kNumerical if the loss stops being finite.
LstmModel lstm_train(const Sequences& train, const LstmConfig& config = {});

}  // namespace vendguard::learn
