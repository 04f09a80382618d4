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

#include "prosodid/metrics.hpp"

#include <stdexcept>

namespace prosodid {

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.n_classes != n_classes)
    throw std::runtime_error("confusion matrix: class count mismatch in merge");
  for (size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
}

int64_t ConfusionMatrix::row_sum(int ref) const {
  int64_t sum = 0;
  for (int h = 0; h < n_classes; ++h) sum += at(ref, h);
  return sum;
}

int64_t ConfusionMatrix::total() const {
  int64_t sum = 0;
  for (int64_t c : counts) sum += c;
  return sum;
}

ConfusionMatrix ConfusionMatrix::from_labels(const std::vector<int>& reference,
                                             const std::vector<int>& hypothesis, int n_classes) {
  if (reference.size() != hypothesis.size())
    throw std::runtime_error("confusion matrix: reference/hypothesis length mismatch");
  ConfusionMatrix cm(n_classes);
  for (size_t i = 0; i < reference.size(); ++i) {
    if (reference[i] < 0 || reference[i] >= n_classes || hypothesis[i] < 0 ||
        hypothesis[i] >= n_classes)
      throw std::runtime_error("confusion matrix: label out of range");
    cm.add(reference[i], hypothesis[i]);
  }
  return cm;
}

double uar(const ConfusionMatrix& cm, std::vector<int>* excluded_classes) {
  if (excluded_classes) excluded_classes->clear();
  double recall_sum = 0.0;
  int present = 0;
  for (int c = 0; c < cm.n_classes; ++c) {
    int64_t row = cm.row_sum(c);
    if (row == 0) {
      if (excluded_classes) excluded_classes->push_back(c);
      continue;
    }
    recall_sum += double(cm.at(c, c)) / double(row);
    ++present;
  }
  if (present == 0) throw std::runtime_error("uar: all-zero confusion matrix");
  return recall_sum / double(present);
}

double accuracy(const ConfusionMatrix& cm) {
  int64_t total = cm.total();
  if (total == 0) throw std::runtime_error("accuracy: empty confusion matrix");
  int64_t trace = 0;
  for (int c = 0; c < cm.n_classes; ++c) trace += cm.at(c, c);
  return double(trace) / double(total);
}

}  // namespace prosodid
