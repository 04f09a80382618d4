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
#include <limits>
#include <stdexcept>

#include "prosodid/classifiers.hpp"

namespace prosodid {

int knn_classify(const LabeledDataset& train, const std::vector<double>& query, int k) {
  if (train.vectors.empty()) throw std::runtime_error("knn: empty training set");
  if (k <= 0 || size_t(k) > train.vectors.size())
    throw std::runtime_error("knn: k out of range for training set of size " +
                             std::to_string(train.vectors.size()));
  if (query.size() != train.dim) throw std::runtime_error("knn: query dimension mismatch");

  std::vector<std::pair<double, size_t>> dist(train.vectors.size());
  for (size_t i = 0; i < train.vectors.size(); ++i) {
    const auto& v = train.vectors[i];
    double d2 = 0.0;
    for (size_t j = 0; j < v.size(); ++j) {
      double diff = v[j] - query[j];
      d2 += diff * diff;
    }
    dist[i] = {d2, i};
  }
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

  std::vector<int> votes(size_t(train.n_classes), 0);
  std::vector<double> dist_sum(size_t(train.n_classes), 0.0);
  for (int i = 0; i < k; ++i) {
    int label = train.labels[dist[size_t(i)].second];
    votes[size_t(label)] += 1;
    dist_sum[size_t(label)] += std::sqrt(dist[size_t(i)].first);
  }

  int best = -1;
  int best_votes = 0;
  double best_mean = std::numeric_limits<double>::infinity();
  for (int c = 0; c < train.n_classes; ++c) {
    if (votes[size_t(c)] == 0) continue;
    double mean = dist_sum[size_t(c)] / votes[size_t(c)];
    if (votes[size_t(c)] > best_votes ||
        (votes[size_t(c)] == best_votes && mean < best_mean)) {
      best = c;
      best_votes = votes[size_t(c)];
      best_mean = mean;
    }
  }
  return best;
}

}  // namespace prosodid
