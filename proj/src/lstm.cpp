// Copyright (c) 2026 ProsodID Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "prosodid/classifiers.hpp"
#include "prosodid/common.hpp"

namespace prosodid {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y = M v (+ y), M is rows x cols row-major
void gemv_add(const double* m, size_t rows, size_t cols, const double* v, double* y) {
  for (size_t r = 0; r < rows; ++r) {
    const double* row = m + r * cols;
    double acc = 0.0;
    for (size_t c = 0; c < cols; ++c) acc += row[c] * v[c];
    y[r] += acc;
  }
}

struct Tape {
  // per timestep: gate activations, cell states, tanh(c), hidden states
  std::vector<std::vector<double>> gates;  // 4H (i, f, g, o) after nonlinearity
  std::vector<std::vector<double>> c;
  std::vector<std::vector<double>> tanh_c;
  std::vector<std::vector<double>> h;
};

// forward pass over one sequence; fills the tape when given
void lstm_forward(const LstmModel& m, const std::vector<std::vector<double>>& seq, Tape* tape,
                  std::vector<std::vector<double>>* hidden_out) {
  const size_t h_sz = size_t(m.hidden);
  const size_t d = m.dim;
  const double* w = m.theta.data() + m.w_offset();
  const double* u = m.theta.data() + m.u_offset();
  const double* b = m.theta.data() + m.b_offset();

  std::vector<double> h_prev(h_sz, 0.0), c_prev(h_sz, 0.0);
  std::vector<double> z(4 * h_sz);
  for (size_t t = 0; t < seq.size(); ++t) {
    if (seq[t].size() != d) throw std::runtime_error("lstm: vector dimension mismatch");
    for (size_t r = 0; r < 4 * h_sz; ++r) z[r] = b[r];
    gemv_add(w, 4 * h_sz, d, seq[t].data(), z.data());
    gemv_add(u, 4 * h_sz, h_sz, h_prev.data(), z.data());

    std::vector<double> gates(4 * h_sz), c_t(h_sz), tanh_c(h_sz), h_t(h_sz);
    for (size_t j = 0; j < h_sz; ++j) {
      double ig = sigmoid(z[j]);
      double fg = sigmoid(z[h_sz + j]);
      double gg = std::tanh(z[2 * h_sz + j]);
      double og = sigmoid(z[3 * h_sz + j]);
      gates[j] = ig;
      gates[h_sz + j] = fg;
      gates[2 * h_sz + j] = gg;
      gates[3 * h_sz + j] = og;
      c_t[j] = fg * c_prev[j] + ig * gg;
      tanh_c[j] = std::tanh(c_t[j]);
      h_t[j] = og * tanh_c[j];
    }
    if (tape) {
      tape->gates.push_back(gates);
      tape->c.push_back(c_t);
      tape->tanh_c.push_back(tanh_c);
      tape->h.push_back(h_t);
    }
    if (hidden_out) hidden_out->push_back(h_t);
    h_prev.swap(h_t);
    c_prev.swap(c_t);
  }
}

std::vector<double> softmax(const double* logits, size_t k) {
  double mx = logits[0];
  for (size_t i = 1; i < k; ++i) mx = std::max(mx, logits[i]);
  double sum = 0.0;
  std::vector<double> p(k);
  for (size_t i = 0; i < k; ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

size_t readout_index(size_t t, size_t len, int delay) {
  return std::min(t + size_t(std::max(0, delay)), len - 1);
}

}  // namespace

void LstmModel::init(size_t d, int h, int classes, uint64_t seed) {
  dim = d;
  hidden = h;
  n_classes = classes;
  theta.assign(parameter_count(), 0.0);
  Rng rng(seed);
  for (auto& v : theta) v = rng.uniform(-0.08, 0.08);
  // forget-gate bias starts at +1 to keep early memory open
  double* b = theta.data() + b_offset();
  for (int j = 0; j < hidden; ++j) b[hidden + j] += 1.0;
}

std::vector<std::vector<double>> lstm_forward_probs(const LstmModel& m,
                                                    const std::vector<std::vector<double>>& seq) {
  if (seq.empty()) return {};
  const size_t h_sz = size_t(m.hidden);
  const size_t k = size_t(m.n_classes);
  std::vector<std::vector<double>> hidden;
  lstm_forward(m, seq, nullptr, &hidden);
  const double* wout = m.theta.data() + m.wout_offset();
  const double* bout = m.theta.data() + m.bout_offset();

  std::vector<std::vector<double>> probs(seq.size());
  for (size_t t = 0; t < seq.size(); ++t) {
    size_t r = readout_index(t, seq.size(), m.params.delay);
    std::vector<double> logits(bout, bout + k);
    gemv_add(wout, k, h_sz, hidden[r].data(), logits.data());
    probs[t] = softmax(logits.data(), k);
  }
  return probs;
}

std::vector<int> lstm_predict_sequence(const LstmModel& m,
                                       const std::vector<std::vector<double>>& seq) {
  std::vector<std::vector<double>> probs = lstm_forward_probs(m, seq);
  std::vector<int> labels(probs.size(), 0);
  for (size_t t = 0; t < probs.size(); ++t) {
    int arg = 0;
    for (int c = 1; c < m.n_classes; ++c)
      if (probs[t][size_t(c)] > probs[t][size_t(arg)]) arg = c;
    labels[t] = arg;
  }
  return labels;
}

double lstm_loss_grad(const LstmModel& m, const LabeledDataset& data,
                      const std::vector<size_t>& sequence_ids, std::vector<double>* grad) {
  const size_t h_sz = size_t(m.hidden);
  const size_t d = m.dim;
  const size_t k = size_t(m.n_classes);
  const double* u = m.theta.data() + m.u_offset();
  const double* wout = m.theta.data() + m.wout_offset();
  const double* bout = m.theta.data() + m.bout_offset();
  if (grad) grad->assign(m.theta.size(), 0.0);

  double loss = 0.0;
  size_t positions = 0;
  std::vector<std::vector<double>> seq;
  for (size_t sid : sequence_ids) {
    const std::vector<size_t>& ids = data.sequences.at(sid);
    if (ids.empty()) continue;
    seq.clear();
    for (size_t idx : ids) seq.push_back(data.vectors[idx]);
    const size_t len = seq.size();

    Tape tape;
    lstm_forward(m, seq, &tape, nullptr);

    // softmax losses and the readout error per hidden index
    std::vector<std::vector<double>> dh(len, std::vector<double>(h_sz, 0.0));
    for (size_t t = 0; t < len; ++t) {
      size_t r = readout_index(t, len, m.params.delay);
      std::vector<double> logits(bout, bout + k);
      gemv_add(wout, k, h_sz, tape.h[r].data(), logits.data());
      std::vector<double> p = softmax(logits.data(), k);
      int y = data.labels[ids[t]];
      loss -= std::log(std::max(p[size_t(y)], 1e-300));
      ++positions;
      if (!grad) continue;
      double* g_wout = grad->data() + m.wout_offset();
      double* g_bout = grad->data() + m.bout_offset();
      for (size_t c = 0; c < k; ++c) {
        double delta = p[c] - (int(c) == y ? 1.0 : 0.0);
        g_bout[c] += delta;
        for (size_t j = 0; j < h_sz; ++j) g_wout[c * h_sz + j] += delta * tape.h[r][j];
        const double* wrow = wout + c * h_sz;
        for (size_t j = 0; j < h_sz; ++j) dh[r][j] += delta * wrow[j];
      }
    }
    if (!grad) continue;

    // BPTT
    double* g_w = grad->data() + m.w_offset();
    double* g_u = grad->data() + m.u_offset();
    double* g_b = grad->data() + m.b_offset();
    const std::vector<double> zeros(h_sz, 0.0);
    std::vector<double> dc(h_sz, 0.0), dz(4 * h_sz);
    for (size_t t = len; t-- > 0;) {
      const std::vector<double>& gates = tape.gates[t];
      const std::vector<double>& c_prev_v = t > 0 ? tape.c[t - 1] : zeros;
      for (size_t j = 0; j < h_sz; ++j) {
        double ig = gates[j], fg = gates[h_sz + j], gg = gates[2 * h_sz + j],
               og = gates[3 * h_sz + j];
        double tc = tape.tanh_c[t][j];
        double dh_j = dh[t][j];
        double dc_j = dc[j] + dh_j * og * (1.0 - tc * tc);
        dz[j] = dc_j * gg * ig * (1.0 - ig);                    // input gate
        dz[h_sz + j] = dc_j * c_prev_v[j] * fg * (1.0 - fg);    // forget gate
        dz[2 * h_sz + j] = dc_j * ig * (1.0 - gg * gg);         // candidate
        dz[3 * h_sz + j] = dh_j * tc * og * (1.0 - og);         // output gate
        dc[j] = dc_j * fg;  // carries to t-1
      }
      const std::vector<double>& x = seq[t];
      for (size_t r = 0; r < 4 * h_sz; ++r) {
        g_b[r] += dz[r];
        double* wrow = g_w + r * d;
        for (size_t j = 0; j < d; ++j) wrow[j] += dz[r] * x[j];
      }
      if (t > 0) {
        const std::vector<double>& h_prev = tape.h[t - 1];
        for (size_t r = 0; r < 4 * h_sz; ++r) {
          double* urow = g_u + r * h_sz;
          for (size_t j = 0; j < h_sz; ++j) urow[j] += dz[r] * h_prev[j];
        }
        // dh_{t-1} += U^T dz
        for (size_t r = 0; r < 4 * h_sz; ++r) {
          const double* urow = u + r * h_sz;
          double dz_r = dz[r];
          for (size_t j = 0; j < h_sz; ++j) dh[t - 1][j] += dz_r * urow[j];
        }
      }
    }
  }

  if (positions == 0) throw std::runtime_error("lstm: no positions in batch");
  loss /= double(positions);
  if (grad)
    for (auto& g : *grad) g /= double(positions);
  if (!std::isfinite(loss)) throw std::runtime_error("lstm: non-finite loss");
  return loss;
}

namespace internal {

void lstm_fit(LstmModel& m, const LabeledDataset& data, uint64_t seed) {
  if (data.sequences.empty()) throw std::runtime_error("lstm: no training sequences");
  std::vector<size_t> order(data.sequences.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<double> grad, batch_grad;
  for (int epoch = 0; epoch < m.params.epochs; ++epoch) {
    Rng rng(mix_seed(seed, 0x4c53544du, uint64_t(epoch)));
    rng.shuffle(order);

    size_t pos = 0;
    while (pos < order.size()) {
      // accumulate whole sequences until the batch holds enough positions
      std::vector<size_t> batch;
      size_t batch_positions = 0;
      while (pos < order.size() && batch_positions < size_t(m.params.batch)) {
        batch.push_back(order[pos]);
        batch_positions += data.sequences[order[pos]].size();
        ++pos;
      }
      double loss = lstm_loss_grad(m, data, batch, &grad);
      if (!std::isfinite(loss))
        throw std::runtime_error("lstm: diverged at epoch " + std::to_string(epoch) +
                                 " (seed " + std::to_string(seed) + ")");
      double norm2 = 0.0;
      for (double g : grad) norm2 += g * g;
      double norm = std::sqrt(norm2);
      double scale = m.params.lr;
      if (norm > m.params.clip_norm) scale *= m.params.clip_norm / norm;
      for (size_t j = 0; j < m.theta.size(); ++j) m.theta[j] -= scale * grad[j];
    }
  }
}

}  // namespace internal

}  // namespace prosodid
