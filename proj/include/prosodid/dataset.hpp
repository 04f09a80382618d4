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

#include <map>
#include <string>
#include <vector>

#include "prosodid/types.hpp"

namespace prosodid {

/// Classifier input: flat vectors with integer labels, plus the grouping of
/// vector indices into per-recording sequences in unit order.
struct LabeledDataset {
  std::vector<std::vector<double>> vectors;
  std::vector<int> labels;
  std::vector<std::vector<size_t>> sequences;
  int n_classes = 0;
  size_t dim = 0;

  size_t size() const { return vectors.size(); }

  /// Checks label range, uniform dimension, and that every vector index
  /// appears in exactly one sequence.
  void validate() const;
};

/// Flattens per-recording descriptor vectors into a dataset. Dialect labels
/// come from the supplied class map; n_classes is the map size.
LabeledDataset build_dataset(const std::vector<std::vector<DescriptorVector>>& per_recording,
                             const std::map<std::string, int>& class_of_dialect);

/// Per-dimension z-scoring with train-fold statistics. Constant dimensions
/// get unit scale so they pass through centered.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // 1 / std

  bool fitted() const { return !mean.empty(); }
  void fit(const LabeledDataset& train);
  std::vector<double> apply(const std::vector<double>& v) const;
  LabeledDataset apply(const LabeledDataset& d) const;
};

}  // namespace prosodid
