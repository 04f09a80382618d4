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
#include <variant>
#include <vector>

#include "prosodid/dataset.hpp"

namespace prosodid {

enum class ModelKind { kKnn, kSvm, kForest, kCrf, kLstm, kMajority };

const char* model_kind_name(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

// ---------------------------------------------------------------------------
// Hyperparameters. Defaults are the toolkit's reference settings; every value
// is overridable through the experiment config.
// ---------------------------------------------------------------------------

struct KnnParams {
  int k = 10;
};

struct SvmParams {
  double c = 100.0;
  double sigma = 12.0790;
  double tol = 1e-3;  // KKT tolerance for SMO
};

struct ForestParams {
  int n_trees = 50;
  int min_leaf = 2;
};

struct CrfTrainParams {
  double l2 = 1.0;
  int max_iter = 100;
  double grad_tol = 1e-5;
};

struct LstmParams {
  int hidden = 128;
  int batch = 128;  // positions per gradient update
  int epochs = 200;
  double lr = 0.1;
  int delay = 0;  // prediction for unit t reads the state at min(t+delay, T-1)
  double clip_norm = 5.0;
};

struct TrainParams {
  KnnParams knn;
  SvmParams svm;
  ForestParams forest;
  CrfTrainParams crf;
  LstmParams lstm;
};

// ---------------------------------------------------------------------------
// kNN
// ---------------------------------------------------------------------------

/// Majority vote among the k Euclidean-nearest training vectors. Vote ties
/// break by smaller mean distance of the tied classes' neighbors, then by
/// lower class index. Neighbor-rank ties break by training index.
int knn_classify(const LabeledDataset& train, const std::vector<double>& query, int k = 10);

struct KnnModel {
  KnnParams params;
  Standardizer standardizer;
  LabeledDataset train;  // standardized
};

// ---------------------------------------------------------------------------
// SVM (one-vs-one RBF, trained by SMO)
// ---------------------------------------------------------------------------

double rbf_kernel(const std::vector<double>& a, const std::vector<double>& b, double sigma);

struct BinarySvm {
  int pos_class = 0;  // y = +1, always the lower class index
  int neg_class = 0;  // y = -1
  std::vector<std::vector<double>> support;
  std::vector<double> coeff;  // alpha_i * y_i per support vector
  double bias = 0.0;

  double decision(const std::vector<double>& x, double sigma) const;
};

struct SvmModel {
  SvmParams params;
  Standardizer standardizer;
  std::vector<BinarySvm> machines;
};

/// Trains one binary SMO problem on pre-standardized vectors with labels in
/// {+1, -1}. Returns alphas (box-constrained by c) and the bias. Exposed for
/// the dual-feasibility checks.
struct SmoResult {
  std::vector<double> alpha;
  double bias = 0.0;
  int passes = 0;
};
SmoResult smo_train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                    const SvmParams& params);

// ---------------------------------------------------------------------------
// Random forest (CART, Gini)
// ---------------------------------------------------------------------------

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = -1;  // valid on leaves
};

struct ForestModel {
  ForestParams params;
  int n_classes = 0;
  std::vector<std::vector<TreeNode>> trees;
};

int tree_predict(const std::vector<TreeNode>& tree, const std::vector<double>& x);

namespace internal {
/// One CART tree on a bootstrap draw of data, seeded independently.
std::vector<TreeNode> build_tree(const LabeledDataset& data, const ForestParams& params,
                                 uint64_t tree_seed);
}  // namespace internal

// ---------------------------------------------------------------------------
// Linear-chain CRF
// ---------------------------------------------------------------------------

/// Linear emission weights on the descriptor vector, per-label bias, and
/// label-pair transition weights.
struct CrfWeights {
  int n_classes = 0;
  size_t dim = 0;
  std::vector<double> emission;    // n_classes x dim, row-major
  std::vector<double> transition;  // n_classes x n_classes, [prev * K + next]
  std::vector<double> bias;        // n_classes

  void init(int classes, size_t d) {
    n_classes = classes;
    dim = d;
    emission.assign(size_t(classes) * d, 0.0);
    transition.assign(size_t(classes) * size_t(classes), 0.0);
    bias.assign(size_t(classes), 0.0);
  }
  size_t parameter_count() const { return emission.size() + transition.size() + bias.size(); }
  double emission_score(int label, const std::vector<double>& x) const;
};

std::vector<double> crf_flatten(const CrfWeights& w);
CrfWeights crf_unflatten(const std::vector<double>& theta, int n_classes, size_t dim);

struct CrfMarginals {
  double log_z = 0.0;
  std::vector<std::vector<double>> unary;     // [t][label]
  std::vector<std::vector<double>> pairwise;  // [t][prev * K + next], t = 0..L-2
};

/// Forward-backward in log space over one sequence of vectors.
CrfMarginals crf_forward_backward(const CrfWeights& w,
                                  const std::vector<std::vector<double>>& seq);

/// Max-product decoding; score ties resolve toward the lowest label index.
std::vector<int> viterbi_decode(const CrfWeights& w, const std::vector<std::vector<double>>& seq);

/// Regularized conditional log-likelihood of the dataset (sum over sequences
/// minus l2/2 * ||theta||^2) and, when grad is non-null, its gradient.
double crf_objective(const std::vector<double>& theta, int n_classes, size_t dim,
                     const LabeledDataset& data, double l2, std::vector<double>* grad);

struct CrfModel {
  CrfTrainParams params;
  CrfWeights weights;
  int iterations = 0;
  double final_objective = 0.0;
};

namespace internal {
/// L-BFGS ascent on the regularized conditional log-likelihood; returns the
/// number of iterations used and leaves the fitted weights in w.
int crf_fit(CrfWeights& w, const LabeledDataset& data, const CrfTrainParams& params,
            double* objective_out);
}  // namespace internal

// ---------------------------------------------------------------------------
// LSTM
// ---------------------------------------------------------------------------

/// Single-layer unidirectional LSTM with a softmax readout. Parameters live
/// in one flat vector: W [4H x D], U [4H x H], b [4H], W_out [K x H],
/// b_out [K]; gate order is input, forget, candidate, output.
struct LstmModel {
  LstmParams params;
  size_t dim = 0;
  int hidden = 0;
  int n_classes = 0;
  std::vector<double> theta;
  Standardizer standardizer;

  size_t w_offset() const { return 0; }
  size_t u_offset() const { return size_t(4 * hidden) * dim; }
  size_t b_offset() const { return u_offset() + size_t(4 * hidden) * size_t(hidden); }
  size_t wout_offset() const { return b_offset() + size_t(4 * hidden); }
  size_t bout_offset() const { return wout_offset() + size_t(n_classes) * size_t(hidden); }
  size_t parameter_count() const { return bout_offset() + size_t(n_classes); }

  void init(size_t d, int h, int classes, uint64_t seed);
};

/// Mean cross-entropy over the readout positions of the given sequences
/// (vector indices into data), with the delay applied. Fills grad (same
/// length as theta) when non-null. Inputs are used as stored in data; the
/// caller standardizes beforehand.
double lstm_loss_grad(const LstmModel& model, const LabeledDataset& data,
                      const std::vector<size_t>& sequence_ids, std::vector<double>* grad);

/// Per-position argmax labels for one sequence of (already standardized)
/// vectors; probability ties resolve toward the lowest class index.
std::vector<int> lstm_predict_sequence(const LstmModel& model,
                                       const std::vector<std::vector<double>>& seq);

/// Per-position softmax outputs for one sequence (row t = readout for unit t).
std::vector<std::vector<double>> lstm_forward_probs(const LstmModel& model,
                                                    const std::vector<std::vector<double>>& seq);

namespace internal {
/// Mini-batch SGD with gradient-norm clipping over the model's epochs;
/// sequence order reshuffles deterministically per epoch from the seed.
void lstm_fit(LstmModel& model, const LabeledDataset& data, uint64_t seed);
}  // namespace internal

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

struct MajorityModel {
  int label = 0;
};

/// A trained classifier of any kind, with everything needed to predict and
/// to serialize. Deserialized models predict identically.
struct TrainedModel {
  ModelKind kind = ModelKind::kMajority;
  size_t dim = 0;
  int n_classes = 0;
  uint64_t seed = 0;
  std::variant<MajorityModel, KnnModel, SvmModel, ForestModel, CrfModel, LstmModel> state;
};

TrainedModel train_model(ModelKind kind, const LabeledDataset& train, const TrainParams& params,
                         uint64_t seed);

/// One label per vector of data, in vector-index order. Sequence models
/// (CRF, LSTM) consume data.sequences in order; the rest ignore grouping.
std::vector<int> predict(const TrainedModel& model, const LabeledDataset& data);

void save_model(const std::string& path, const TrainedModel& model);
TrainedModel load_model(const std::string& path);

}  // namespace prosodid
