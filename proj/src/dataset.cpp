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

#include "prosodid/dataset.hpp"

#include <cmath>
#include <stdexcept>

namespace prosodid {

void LabeledDataset::validate() const {
  if (vectors.size() != labels.size())
    throw std::runtime_error("dataset: vector/label count mismatch");
  for (const auto& v : vectors)
    if (v.size() != dim) throw std::runtime_error("dataset: inconsistent vector dimension");
  for (int l : labels)
    if (l < 0 || l >= n_classes) throw std::runtime_error("dataset: label out of range");
  std::vector<char> seen(vectors.size(), 0);
  for (const auto& seq : sequences) {
    for (size_t idx : seq) {
      if (idx >= vectors.size()) throw std::runtime_error("dataset: sequence index out of range");
      if (seen[idx]) throw std::runtime_error("dataset: vector in more than one sequence");
      seen[idx] = 1;
    }
  }
  for (size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw std::runtime_error("dataset: vector missing from all sequences");
}

LabeledDataset build_dataset(const std::vector<std::vector<DescriptorVector>>& per_recording,
                             const std::map<std::string, int>& class_of_dialect) {
  LabeledDataset d;
  d.n_classes = int(class_of_dialect.size());
  for (const auto& rec : per_recording) {
    std::vector<size_t> seq;
    for (const DescriptorVector& v : rec) {
      auto it = class_of_dialect.find(v.dialect);
      if (it == class_of_dialect.end())
        throw std::runtime_error("build_dataset: unknown dialect '" + v.dialect + "'");
      if (d.vectors.empty()) d.dim = v.values.size();
      seq.push_back(d.vectors.size());
      d.vectors.push_back(v.values);
      d.labels.push_back(it->second);
    }
    if (!seq.empty()) d.sequences.push_back(std::move(seq));
  }
  d.validate();
  return d;
}

void Standardizer::fit(const LabeledDataset& train) {
  if (train.vectors.empty()) throw std::runtime_error("standardizer: empty training set");
  const size_t dim = train.dim;
  mean.assign(dim, 0.0);
  scale.assign(dim, 1.0);
  for (const auto& v : train.vectors)
    for (size_t j = 0; j < dim; ++j) mean[j] += v[j];
  for (auto& m : mean) m /= double(train.vectors.size());
  std::vector<double> var(dim, 0.0);
  for (const auto& v : train.vectors)
    for (size_t j = 0; j < dim; ++j) var[j] += (v[j] - mean[j]) * (v[j] - mean[j]);
  for (size_t j = 0; j < dim; ++j) {
    double sd = std::sqrt(var[j] / double(train.vectors.size()));
    scale[j] = sd > 1e-10 ? 1.0 / sd : 1.0;
  }
}

std::vector<double> Standardizer::apply(const std::vector<double>& v) const {
  if (v.size() != mean.size()) throw std::runtime_error("standardizer: dimension mismatch");
  std::vector<double> out(v.size());
  for (size_t j = 0; j < v.size(); ++j) out[j] = (v[j] - mean[j]) * scale[j];
  return out;
}

LabeledDataset Standardizer::apply(const LabeledDataset& d) const {
  LabeledDataset out = d;
  for (auto& v : out.vectors) v = apply(v);
  return out;
}

}  // namespace prosodid
