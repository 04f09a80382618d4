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

namespace internal {

namespace {

int majority_label(const std::vector<int>& counts) {
  int best = 0;
  for (int c = 1; c < int(counts.size()); ++c)
    if (counts[size_t(c)] > counts[size_t(best)]) best = c;
  return best;
}

struct TreeBuilder {
  const LabeledDataset& data;
  const ForestParams& params;
  Rng& rng;
  int mtry;
  std::vector<TreeNode> nodes;

  // Gini impurity of a count vector, times the sample count (so the split
  // criterion is the summed child impurity without dividing twice).
  static double gini_times_n(const std::vector<int>& counts, int n) {
    if (n == 0) return 0.0;
    double sum_sq = 0.0;
    for (int c : counts) sum_sq += double(c) * double(c);
    return double(n) - sum_sq / double(n);
  }

  int build(std::vector<size_t>& idx, size_t begin, size_t end) {
    std::vector<int> counts(size_t(data.n_classes), 0);
    for (size_t i = begin; i < end; ++i) counts[size_t(data.labels[idx[i]])] += 1;
    const int n = int(end - begin);
    const int node_id = int(nodes.size());
    nodes.emplace_back();
    nodes[size_t(node_id)].label = majority_label(counts);

    bool pure = false;
    for (int c : counts)
      if (c == n) pure = true;
    if (pure || n < 2 * params.min_leaf) return node_id;

    // mtry features without replacement, in draw order
    std::vector<size_t> features(data.dim);
    for (size_t j = 0; j < data.dim; ++j) features[j] = j;
    for (int j = 0; j < mtry; ++j) {
      size_t pick = size_t(j) + size_t(rng.uniform_int(uint64_t(data.dim - size_t(j))));
      std::swap(features[size_t(j)], features[pick]);
    }

    double best_score = gini_times_n(counts, n) - 1e-12;  // must strictly improve
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, int>> col(static_cast<size_t>(n));
    std::vector<int> left_counts(size_t(data.n_classes));
    for (int j = 0; j < mtry; ++j) {
      size_t feature = features[size_t(j)];
      for (size_t i = begin; i < end; ++i)
        col[i - begin] = {data.vectors[idx[i]][feature], data.labels[idx[i]]};
      std::sort(col.begin(), col.end());
      std::fill(left_counts.begin(), left_counts.end(), 0);
      std::vector<int> right_counts = counts;
      for (int i = 0; i < n - 1; ++i) {
        int label = col[size_t(i)].second;
        left_counts[size_t(label)] += 1;
        right_counts[size_t(label)] -= 1;
        if (col[size_t(i)].first == col[size_t(i) + 1].first) continue;
        int n_left = i + 1, n_right = n - n_left;
        if (n_left < params.min_leaf || n_right < params.min_leaf) continue;
        double score = gini_times_n(left_counts, n_left) + gini_times_n(right_counts, n_right);
        if (score < best_score) {
          best_score = score;
          best_feature = int(feature);
          best_threshold = 0.5 * (col[size_t(i)].first + col[size_t(i) + 1].first);
        }
      }
    }
    if (best_feature < 0) return node_id;

    // partition in place, keeping relative order (stable) for determinism
    std::stable_partition(idx.begin() + long(begin), idx.begin() + long(end),
                          [&](size_t i) {
                            return data.vectors[i][size_t(best_feature)] <= best_threshold;
                          });
    size_t mid = begin;
    while (mid < end && data.vectors[idx[mid]][size_t(best_feature)] <= best_threshold) ++mid;

    nodes[size_t(node_id)].feature = best_feature;
    nodes[size_t(node_id)].threshold = best_threshold;
    int left = build(idx, begin, mid);
    nodes[size_t(node_id)].left = left;
    int right = build(idx, mid, end);
    nodes[size_t(node_id)].right = right;
    return node_id;
  }
};

}  // anonymous namespace

std::vector<TreeNode> build_tree(const LabeledDataset& data, const ForestParams& params,
                                 uint64_t tree_seed) {
  Rng rng(tree_seed);
  std::vector<size_t> idx(data.size());
  for (size_t i = 0; i < data.size(); ++i)
    idx[i] = size_t(rng.uniform_int(uint64_t(data.size())));  // bootstrap
  std::sort(idx.begin(), idx.end());

  TreeBuilder builder{data, params, rng,
                      std::max(1, int(std::lround(std::sqrt(double(data.dim))))),
                      {}};
  builder.build(idx, 0, idx.size());
  return std::move(builder.nodes);
}

}  // namespace internal

int tree_predict(const std::vector<TreeNode>& tree, const std::vector<double>& x) {
  int node = 0;
  while (tree[size_t(node)].feature >= 0) {
    const TreeNode& n = tree[size_t(node)];
    node = x[size_t(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return tree[size_t(node)].label;
}

}  // namespace prosodid
