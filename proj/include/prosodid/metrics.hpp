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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace prosodid {

/// Rows are reference classes, columns are hypotheses.
struct ConfusionMatrix {
  int n_classes = 0;
  std::vector<int64_t> counts;  // n_classes x n_classes, row-major

  explicit ConfusionMatrix(int classes = 0)
      : n_classes(classes), counts(size_t(classes) * size_t(classes), 0) {}

  int64_t& at(int ref, int hyp) { return counts[size_t(ref) * size_t(n_classes) + size_t(hyp)]; }
  int64_t at(int ref, int hyp) const {
    return counts[size_t(ref) * size_t(n_classes) + size_t(hyp)];
  }
  void add(int ref, int hyp) { at(ref, hyp) += 1; }
  void merge(const ConfusionMatrix& other);
  int64_t row_sum(int ref) const;
  int64_t total() const;

  static ConfusionMatrix from_labels(const std::vector<int>& reference,
                                     const std::vector<int>& hypothesis, int n_classes);
};

/// Mean per-class recall over the classes that have at least one reference
/// unit. Classes with empty rows are excluded from the mean; when
/// excluded_classes is non-null their indices are reported there.
/// Throws on an all-zero matrix.
double uar(const ConfusionMatrix& cm, std::vector<int>* excluded_classes = nullptr);

/// trace / total. Throws when total is 0.
double accuracy(const ConfusionMatrix& cm);

}  // namespace prosodid
