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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "prosodid/classifiers.hpp"
#include "prosodid/common.hpp"
#include "test_util.hpp"

using namespace prosodid;

namespace {

std::vector<std::vector<double>> random_sequence(size_t len, size_t dim, uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> seq(len, std::vector<double>(dim));
  for (auto& x : seq)
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
  return seq;
}

// Sequences whose label is readable from the current frame alone: a scaled
// one-hot plus noise. Easy to memorize, which is exactly what these tests ask.
LabeledDataset separable_sequences(int k, size_t n_seqs, size_t len, uint64_t seed) {
  LabeledDataset data;
  data.n_classes = k;
  data.dim = size_t(k);
  Rng rng(seed);
  for (size_t s = 0; s < n_seqs; ++s) {
    std::vector<size_t> ids;
    for (size_t t = 0; t < len; ++t) {
      int label = int(rng.next_u64() % uint64_t(k));
      std::vector<double> x(static_cast<size_t>(k));
      for (double& v : x) v = rng.uniform(-0.2, 0.2);
      x[size_t(label)] += 2.0;
      ids.push_back(data.vectors.size());
      data.vectors.push_back(x);
      data.labels.push_back(label);
    }
    data.sequences.push_back(ids);
  }
  data.validate();
  return data;
}

}  // namespace

TEST_CASE("parameter offsets partition the flat vector") {
  LstmModel m;
  m.init(3, 4, 5, 9);
  CHECK(m.w_offset() == 0);
  CHECK(m.u_offset() == size_t(4 * 4) * 3);
  CHECK(m.b_offset() == m.u_offset() + size_t(4 * 4) * 4);
  CHECK(m.wout_offset() == m.b_offset() + size_t(4 * 4));
  CHECK(m.bout_offset() == m.wout_offset() + size_t(5) * 4);
  CHECK(m.parameter_count() == m.bout_offset() + 5);
  CHECK(m.theta.size() == m.parameter_count());
}

TEST_CASE("forward probabilities are row-stochastic") {
  LstmModel m;
  m.init(3, 6, 4, 17);
  const auto seq = random_sequence(9, 3, 18);

  const auto probs = lstm_forward_probs(m, seq);
  REQUIRE(probs.size() == seq.size());
  for (const auto& row : probs) {
    REQUIRE(row.size() == 4);
    double sum = 0.0;
    for (double p : row) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-6);
  }
}

TEST_CASE("a delay past the end reads the final state everywhere") {
  LstmModel m;
  m.init(2, 5, 3, 23);
  m.params.delay = 100;
  const auto seq = random_sequence(4, 2, 24);

  const auto probs = lstm_forward_probs(m, seq);
  for (size_t t = 1; t < probs.size(); ++t)
    for (size_t c = 0; c < probs[t].size(); ++c)
      CHECK(probs[t][c] == probs[0][c]);

  // ...and a nonzero delay actually changes the readout alignment.
  LstmModel d0;
  d0.init(2, 5, 3, 23);
  d0.params.delay = 0;
  const auto base = lstm_forward_probs(d0, seq);
  double diff = 0.0;
  for (size_t c = 0; c < base[0].size(); ++c) diff += std::abs(base[0][c] - probs[0][c]);
  CHECK(diff > 0.0);
}

TEST_CASE("loss gradient matches central finite differences") {
  LabeledDataset data;
  data.n_classes = 2;
  data.dim = 2;
  Rng rng(31);
  for (size_t len : {3u, 2u}) {
    std::vector<size_t> ids;
    for (size_t t = 0; t < len; ++t) {
      ids.push_back(data.vectors.size());
      data.vectors.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
      data.labels.push_back(int(rng.next_u64() % 2));
    }
    data.sequences.push_back(ids);
  }
  data.validate();
  const std::vector<size_t> all_ids = {0, 1};

  for (int delay : {0, 1}) {
    CAPTURE(delay);
    LstmModel m;
    m.init(2, 2, 2, 33);
    m.params.delay = delay;

    std::vector<double> grad;
    lstm_loss_grad(m, data, all_ids, &grad);
    REQUIRE(grad.size() == m.theta.size());

    const double h = 1e-5;
    for (size_t i = 0; i < m.theta.size(); ++i) {
      LstmModel mp = m, mm = m;
      mp.theta[i] += h;
      mm.theta[i] -= h;
      double fd = (lstm_loss_grad(mp, data, all_ids, nullptr) -
                   lstm_loss_grad(mm, data, all_ids, nullptr)) /
                  (2.0 * h);
      CAPTURE(i);
      CHECK(std::abs(grad[i] - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("a 20-sequence toy is memorized within the default epochs") {
  LabeledDataset train = separable_sequences(3, 20, 8, 41);

  LstmModel m;
  m.init(train.dim, 128, train.n_classes, 42);
  internal::lstm_fit(m, train, 42);

  size_t correct = 0, total = 0;
  for (const auto& ids : train.sequences) {
    std::vector<std::vector<double>> seq;
    for (size_t idx : ids) seq.push_back(train.vectors[idx]);
    const std::vector<int> pred = lstm_predict_sequence(m, seq);
    REQUIRE(pred.size() == ids.size());
    for (size_t t = 0; t < ids.size(); ++t) {
      correct += size_t(pred[t] == train.labels[ids[t]]);
      ++total;
    }
  }
  CHECK(double(correct) >= 0.99 * double(total));
}

TEST_CASE("fitting is deterministic per seed") {
  LabeledDataset train = separable_sequences(2, 6, 5, 51);

  LstmModel a, b, c;
  a.init(train.dim, 8, train.n_classes, 7);
  b.init(train.dim, 8, train.n_classes, 7);
  c.init(train.dim, 8, train.n_classes, 8);
  a.params.epochs = b.params.epochs = c.params.epochs = 10;
  internal::lstm_fit(a, train, 7);
  internal::lstm_fit(b, train, 7);
  internal::lstm_fit(c, train, 8);

  CHECK(a.theta == b.theta);
  CHECK(a.theta != c.theta);
}

TEST_CASE("a non-finite loss is reported instead of propagated") {
  LabeledDataset data = separable_sequences(2, 1, 3, 61);
  LstmModel m;
  m.init(data.dim, 2, data.n_classes, 62);
  // A diverged parameter vector: NaN in the readout bias taints every logit.
  for (size_t i = m.bout_offset(); i < m.theta.size(); ++i)
    m.theta[i] = std::numeric_limits<double>::quiet_NaN();

  const std::vector<size_t> ids = {0};
  CHECK_THROWS_AS(lstm_loss_grad(m, data, ids, nullptr), std::runtime_error);
}
