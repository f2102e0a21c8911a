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

#include "vendguard/learn/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vendguard/error.hpp"
#include "vendguard/rng.hpp"

namespace vendguard::learn {

void Sequences::push(std::span<const double> steps, int label, std::size_t target_index) {
  if (steps.size() != window * input_size) fail(Errc::kInvalidArgument, "sequence has wrong shape");
  data.insert(data.end(), steps.begin(), steps.end());
  labels.push_back(label);
  target.push_back(target_index);
}

Sequences make_sequences(const std::vector<prep::FeatureVector>& vectors, std::size_t window,
                         std::int64_t max_step_seconds, Timestamp min_end_time) {
  if (window == 0) fail(Errc::kInvalidArgument, "sequence window must be >= 1");
  Sequences out;
  out.window = window;
  out.input_size = prep::kFeatureCount;
  std::vector<std::size_t> order(vectors.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (vectors[a].machine_id != vectors[b].machine_id) return vectors[a].machine_id < vectors[b].machine_id;
    return vectors[a].window_end_time < vectors[b].window_end_time;
  });
  std::vector<double> steps(window * prep::kFeatureCount);
  std::size_t run = 0;  // length of the contiguous run ending at the current vector
  for (std::size_t k = 0; k < order.size(); ++k) {
    const prep::FeatureVector& v = vectors[order[k]];
    const bool continues = k > 0 && vectors[order[k - 1]].machine_id == v.machine_id &&
                           v.window_end_time - vectors[order[k - 1]].window_end_time <= max_step_seconds;
    run = continues ? run + 1 : 1;
    if (run < window || v.window_end_time < min_end_time) continue;
    for (std::size_t s = 0; s < window; ++s) {
      const auto& f = vectors[order[k + 1 - window + s]].features;
      std::copy(f.begin(), f.end(), steps.begin() + static_cast<std::ptrdiff_t>(s * prep::kFeatureCount));
    }
    out.push(steps, v.label, order[k]);
  }
  return out;
}

void LstmConfig::validate() const {
  if (hidden == 0) fail(Errc::kInvalidArgument, "LSTM hidden size must be >= 1");
  if (window == 0) fail(Errc::kInvalidArgument, "LSTM window must be >= 1");
  if (!(learning_rate > 0.0)) fail(Errc::kInvalidArgument, "learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    fail(Errc::kInvalidArgument, "Adam betas must be in [0, 1)");
  }
}

std::size_t lstm_param_count(std::size_t input_size, std::size_t hidden) {
  return 4 * hidden * (input_size + hidden + 1) + hidden + 1;
}

LstmModel lstm_init(std::size_t input_size, std::size_t hidden, std::size_t window,
                    std::uint64_t seed) {
  if (input_size == 0 || hidden == 0 || window == 0) {
    fail(Errc::kInvalidArgument, "LSTM dimensions must be >= 1");
  }
  LstmModel m;
  m.input_size = input_size;
  m.hidden = hidden;
  m.window = window;
  m.params.assign(m.param_count(), 0.0);
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (std::size_t i = 0; i < m.b_offset(); ++i) m.params[i] = rng.uniform(-scale, scale);
  for (std::size_t j = 0; j < hidden; ++j) m.params[m.b_offset() + hidden + j] = 1.0;
  for (std::size_t j = 0; j < hidden; ++j) m.params[m.v_offset() + j] = rng.uniform(-scale, scale);
  m.input_mean.assign(input_size, 0.0);
  m.input_std.assign(input_size, 1.0);
  return m;
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_shape(const LstmModel& m, const Sequences& s) {
  if (s.input_size != m.input_size || s.window != m.window) {
    fail(Errc::kIncompatible, "sequence shape does not match the LSTM");
  }
}

// Scratch space for one sequence: per step the standardised input, the gate
// activations [i f o g] and the cell and hidden states.
struct Trace {
  std::vector<double> x;      // T x I
  std::vector<double> gates;  // T x 4H
  std::vector<double> c;      // (T+1) x H, row 0 is the initial zero state
  std::vector<double> h;      // (T+1) x H
  std::vector<double> tanh_c; // T x H

  void resize(std::size_t t, std::size_t in, std::size_t hid) {
    x.resize(t * in);
    gates.resize(t * 4 * hid);
    c.assign((t + 1) * hid, 0.0);
    h.assign((t + 1) * hid, 0.0);
    tanh_c.resize(t * hid);
  }
};

// Returns the output logit.
double forward(const LstmModel& m, std::span<const double> seq, Trace& tr) {
  const std::size_t T = m.window;
  const std::size_t I = m.input_size;
  const std::size_t H = m.hidden;
  tr.resize(T, I, H);
  const double* W = m.params.data() + m.w_offset();
  const double* U = m.params.data() + m.u_offset();
  const double* b = m.params.data() + m.b_offset();
  for (std::size_t t = 0; t < T; ++t) {
    double* x = tr.x.data() + t * I;
    for (std::size_t k = 0; k < I; ++k) x[k] = (seq[t * I + k] - m.input_mean[k]) / m.input_std[k];
    const double* h_prev = tr.h.data() + t * H;
    const double* c_prev = tr.c.data() + t * H;
    double* a = tr.gates.data() + t * 4 * H;
    for (std::size_t r = 0; r < 4 * H; ++r) {
      double acc = b[r];
      const double* wr = W + r * I;
      for (std::size_t k = 0; k < I; ++k) acc += wr[k] * x[k];
      const double* ur = U + r * H;
      for (std::size_t k = 0; k < H; ++k) acc += ur[k] * h_prev[k];
      a[r] = r < 3 * H ? sigmoid(acc) : std::tanh(acc);
    }
    double* c = tr.c.data() + (t + 1) * H;
    double* h = tr.h.data() + (t + 1) * H;
    double* tc = tr.tanh_c.data() + t * H;
    for (std::size_t j = 0; j < H; ++j) {
      c[j] = a[H + j] * c_prev[j] + a[j] * a[3 * H + j];
      tc[j] = std::tanh(c[j]);
      h[j] = a[2 * H + j] * tc[j];
    }
  }
  const double* v = m.params.data() + m.v_offset();
  const double* hT = tr.h.data() + T * H;
  double z = m.params[m.c_offset()];
  for (std::size_t j = 0; j < H; ++j) z += v[j] * hT[j];
  return z;
}

// Accumulates weight * d(loss)/d(params) into grad; returns weight * loss.
double backward(const LstmModel& m, std::span<const double> seq, int label, double weight,
                Trace& tr, std::vector<double>& dh, std::vector<double>& dc,
                std::vector<double>& da, std::vector<double>& grad) {
  const double z = forward(m, seq, tr);
  const double y = static_cast<double>(label);
  const double loss = softplus(z) - y * z;
  const double dz = weight * (sigmoid(z) - y);
  const std::size_t T = m.window;
  const std::size_t I = m.input_size;
  const std::size_t H = m.hidden;
  const double* U = m.params.data() + m.u_offset();
  const double* v = m.params.data() + m.v_offset();
  double* gW = grad.data() + m.w_offset();
  double* gU = grad.data() + m.u_offset();
  double* gb = grad.data() + m.b_offset();
  double* gv = grad.data() + m.v_offset();
  grad[m.c_offset()] += dz;
  const double* hT = tr.h.data() + T * H;
  for (std::size_t j = 0; j < H; ++j) {
    gv[j] += dz * hT[j];
    dh[j] = dz * v[j];
    dc[j] = 0.0;
  }
  for (std::size_t t = T; t-- > 0;) {
    const double* a = tr.gates.data() + t * 4 * H;
    const double* tc = tr.tanh_c.data() + t * H;
    const double* c_prev = tr.c.data() + t * H;
    const double* h_prev = tr.h.data() + t * H;
    const double* x = tr.x.data() + t * I;
    for (std::size_t j = 0; j < H; ++j) {
      const double i = a[j];
      const double f = a[H + j];
      const double o = a[2 * H + j];
      const double g = a[3 * H + j];
      dc[j] += dh[j] * o * (1.0 - tc[j] * tc[j]);
      da[j] = dc[j] * g * i * (1.0 - i);
      da[H + j] = dc[j] * c_prev[j] * f * (1.0 - f);
      da[2 * H + j] = dh[j] * tc[j] * o * (1.0 - o);
      da[3 * H + j] = dc[j] * i * (1.0 - g * g);
      dc[j] *= f;
    }
    for (std::size_t r = 0; r < 4 * H; ++r) {
      const double d = da[r];
      if (d == 0.0) continue;
      gb[r] += d;
      double* gw = gW + r * I;
      for (std::size_t k = 0; k < I; ++k) gw[k] += d * x[k];
      double* gu = gU + r * H;
      for (std::size_t k = 0; k < H; ++k) gu[k] += d * h_prev[k];
    }
    for (std::size_t k = 0; k < H; ++k) dh[k] = 0.0;
    for (std::size_t r = 0; r < 4 * H; ++r) {
      const double d = da[r];
      const double* ur = U + r * H;
      for (std::size_t k = 0; k < H; ++k) dh[k] += d * ur[k];
    }
  }
  return weight * loss;
}

struct Workspace {
  Trace trace;
  std::vector<double> dh, dc, da;
  explicit Workspace(const LstmModel& m) : dh(m.hidden), dc(m.hidden), da(4 * m.hidden) {}
};

void check_labels(const Sequences& s) {
  for (int y : s.labels) {
    if (y != 0 && y != 1) fail(Errc::kInvalidArgument, "LSTM training needs labels 0 or 1");
  }
}

}  // namespace

double lstm_forward(const LstmModel& m, std::span<const double> sequence) {
  if (sequence.size() != m.window * m.input_size) {
    fail(Errc::kInvalidArgument, "lstm_forward expects " + std::to_string(m.window) + " steps of " +
                                     std::to_string(m.input_size) + " features");
  }
  Trace tr;
  return sigmoid(forward(m, sequence, tr));
}

std::vector<double> lstm_predict_proba(const LstmModel& m, const Sequences& sequences) {
  check_shape(m, sequences);
  std::vector<double> out(sequences.size());
  Trace tr;
  for (std::size_t i = 0; i < sequences.size(); ++i) out[i] = sigmoid(forward(m, sequences.sequence(i), tr));
  return out;
}

double lstm_loss(const LstmModel& m, const Sequences& sequences) {
  check_shape(m, sequences);
  check_labels(sequences);
  if (sequences.size() == 0) fail(Errc::kInvalidArgument, "lstm_loss needs at least one sequence");
  Trace tr;
  double total = 0.0;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const double z = forward(m, sequences.sequence(i), tr);
    total += softplus(z) - static_cast<double>(sequences.labels[i]) * z;
  }
  return total / static_cast<double>(sequences.size());
}

std::vector<double> lstm_gradient(const LstmModel& m, const Sequences& sequences) {
  check_shape(m, sequences);
  check_labels(sequences);
  if (sequences.size() == 0) fail(Errc::kInvalidArgument, "lstm_gradient needs at least one sequence");
  std::vector<double> grad(m.param_count(), 0.0);
  Workspace ws(m);
  const double w = 1.0 / static_cast<double>(sequences.size());
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    backward(m, sequences.sequence(i), sequences.labels[i], w, ws.trace, ws.dh, ws.dc, ws.da, grad);
  }
  return grad;
}

LstmModel lstm_train(const Sequences& train, const LstmConfig& config) {
  config.validate();
  if (train.size() == 0) fail(Errc::kInvalidArgument, "lstm_train needs at least one sequence");
  if (train.window != config.window) fail(Errc::kIncompatible, "sequence window differs from config");
  check_labels(train);
  LstmModel m = lstm_init(train.input_size, config.hidden, config.window, config.seed);
  m.config = config;

  const std::size_t I = train.input_size;
  const double steps = static_cast<double>(train.size() * train.window);
  for (std::size_t k = 0; k < I; ++k) {
    double sum = 0.0;
    for (std::size_t s = 0; s < train.size() * train.window; ++s) sum += train.data[s * I + k];
    const double mean = sum / steps;
    double ss = 0.0;
    for (std::size_t s = 0; s < train.size() * train.window; ++s) {
      ss += (train.data[s * I + k] - mean) * (train.data[s * I + k] - mean);
    }
    const double sd = std::sqrt(ss / steps);
    m.input_mean[k] = mean;
    m.input_std[k] = sd > 1e-12 ? sd : 1.0;
  }

  double class_weight[2] = {1.0, 1.0};
  if (config.class_weighted) {
    std::size_t pos = 0;
    for (int y : train.labels) pos += static_cast<std::size_t>(y);
    const std::size_t neg = train.size() - pos;
    const double n = static_cast<double>(train.size());
    if (pos > 0 && neg > 0) {
      class_weight[0] = n / (2.0 * static_cast<double>(neg));
      class_weight[1] = n / (2.0 * static_cast<double>(pos));
    }
  }

  const std::size_t P = m.param_count();
  std::vector<double> grad(P), adam_m(P, 0.0), adam_v(P, 0.0);
  Workspace ws(m);
  Rng rng(config.seed ^ 0x5DEECE66DULL);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = config.batch_size == 0 ? train.size() : config.batch_size;
  std::uint64_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (batch < train.size()) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.uniform_index(i)]);
      }
    }
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::size_t end = std::min(order.size(), begin + batch);
      std::fill(grad.begin(), grad.end(), 0.0);
      const double scale = 1.0 / static_cast<double>(end - begin);
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t i = order[k];
        const int y = train.labels[i];
        epoch_loss += backward(m, train.sequence(i), y, class_weight[y] * scale, ws.trace, ws.dh,
                               ws.dc, ws.da, grad) /
                      scale;
      }
      ++step;
      const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      for (std::size_t p = 0; p < P; ++p) {
        adam_m[p] = config.beta1 * adam_m[p] + (1.0 - config.beta1) * grad[p];
        adam_v[p] = config.beta2 * adam_v[p] + (1.0 - config.beta2) * grad[p] * grad[p];
        m.params[p] -= config.learning_rate * (adam_m[p] / bc1) / (std::sqrt(adam_v[p] / bc2) + config.epsilon);
      }
    }
    epoch_loss /= static_cast<double>(train.size());
    if (!std::isfinite(epoch_loss)) {
      fail(Errc::kNumerical, "LSTM loss became non-finite in epoch " + std::to_string(epoch + 1));
    }
    m.epoch_loss.push_back(epoch_loss);
  }
  for (double p : m.params) {
    if (!std::isfinite(p)) fail(Errc::kNumerical, "LSTM parameters became non-finite");
  }
  return m;
}

}  // namespace vendguard::learn
