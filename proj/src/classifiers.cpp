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
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "prosodid/classifiers.hpp"
#include "prosodid/common.hpp"

namespace prosodid {

using nlohmann::json;

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kKnn: return "knn";
    case ModelKind::kSvm: return "svm";
    case ModelKind::kForest: return "rf";
    case ModelKind::kCrf: return "crf";
    case ModelKind::kLstm: return "lstm";
    case ModelKind::kMajority: return "majority";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "knn") return ModelKind::kKnn;
  if (name == "svm") return ModelKind::kSvm;
  if (name == "rf" || name == "forest") return ModelKind::kForest;
  if (name == "crf") return ModelKind::kCrf;
  if (name == "lstm") return ModelKind::kLstm;
  if (name == "majority") return ModelKind::kMajority;
  throw std::runtime_error("unknown classifier '" + name + "'");
}

namespace {

int majority_class(const LabeledDataset& data) {
  std::vector<size_t> counts(size_t(data.n_classes), 0);
  for (int l : data.labels) counts[size_t(l)] += 1;
  int best = 0;
  for (int c = 1; c < data.n_classes; ++c)
    if (counts[size_t(c)] > counts[size_t(best)]) best = c;
  return best;
}

SvmModel train_svm_impl(const LabeledDataset& train, const SvmParams& params) {
  std::vector<char> present(size_t(train.n_classes), 0);
  for (int l : train.labels) present[size_t(l)] = 1;
  int classes_present = 0;
  for (char p : present) classes_present += p;
  if (classes_present < 2) throw std::runtime_error("svm: training data has a single class");

  // SMO's scan path (and so the point where it stops at tolerance) depends on
  // the order examples are presented in. Sorting rows by (label, vector)
  // before anything touches them makes the trained machines a function of the
  // training set's content alone, not of how the caller happened to order it.
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
    if (train.labels[i] != train.labels[j]) return train.labels[i] < train.labels[j];
    return std::lexicographical_compare(train.vectors[i].begin(), train.vectors[i].end(),
                                        train.vectors[j].begin(), train.vectors[j].end());
  });
  LabeledDataset canon;
  canon.n_classes = train.n_classes;
  canon.dim = train.dim;
  canon.vectors.reserve(train.size());
  canon.labels.reserve(train.size());
  for (size_t i : order) {
    canon.vectors.push_back(train.vectors[i]);
    canon.labels.push_back(train.labels[i]);
  }

  SvmModel model;
  model.params = params;
  model.standardizer.fit(canon);
  const LabeledDataset std_train = model.standardizer.apply(canon);

  for (int a = 0; a < train.n_classes; ++a) {
    if (!present[size_t(a)]) continue;
    for (int b = a + 1; b < train.n_classes; ++b) {
      if (!present[size_t(b)]) continue;
      std::vector<std::vector<double>> x;
      std::vector<int> y;
      for (size_t i = 0; i < std_train.size(); ++i) {
        if (std_train.labels[i] == a) {
          x.push_back(std_train.vectors[i]);
          y.push_back(+1);
        } else if (std_train.labels[i] == b) {
          x.push_back(std_train.vectors[i]);
          y.push_back(-1);
        }
      }
      SmoResult smo = smo_train(x, y, params);
      BinarySvm machine;
      machine.pos_class = a;
      machine.neg_class = b;
      machine.bias = -smo.bias;  // decision f(x) = sum coeff K + bias
      for (size_t i = 0; i < x.size(); ++i) {
        if (smo.alpha[i] <= 0.0) continue;
        machine.support.push_back(x[i]);
        machine.coeff.push_back(smo.alpha[i] * y[i]);
      }
      model.machines.push_back(std::move(machine));
    }
  }
  return model;
}

int svm_vote(const SvmModel& model, const std::vector<double>& x, int n_classes) {
  std::vector<int> votes(size_t(n_classes), 0);
  for (const BinarySvm& m : model.machines) {
    double f = m.decision(x, model.params.sigma);
    votes[size_t(f >= 0.0 ? m.pos_class : m.neg_class)] += 1;
  }
  int best = 0;
  for (int c = 1; c < n_classes; ++c)
    if (votes[size_t(c)] > votes[size_t(best)]) best = c;
  return best;
}

}  // namespace

TrainedModel train_model(ModelKind kind, const LabeledDataset& train, const TrainParams& params,
                         uint64_t seed) {
  train.validate();
  if (train.vectors.empty()) throw std::runtime_error("train_model: empty training set");

  TrainedModel model;
  model.kind = kind;
  model.dim = train.dim;
  model.n_classes = train.n_classes;
  model.seed = seed;

  switch (kind) {
    case ModelKind::kMajority: {
      model.state = MajorityModel{majority_class(train)};
      break;
    }
    case ModelKind::kKnn: {
      KnnModel m;
      m.params = params.knn;
      if (m.params.k <= 0 || size_t(m.params.k) > train.size())
        throw std::runtime_error("knn: k out of range for training set of size " +
                                 std::to_string(train.size()));
      m.standardizer.fit(train);
      m.train = m.standardizer.apply(train);
      model.state = std::move(m);
      break;
    }
    case ModelKind::kSvm: {
      model.state = train_svm_impl(train, params.svm);
      break;
    }
    case ModelKind::kForest: {
      ForestModel m;
      m.params = params.forest;
      m.n_classes = train.n_classes;
      for (int t = 0; t < m.params.n_trees; ++t)
        m.trees.push_back(internal::build_tree(train, m.params, mix_seed(seed, uint64_t(t))));
      model.state = std::move(m);
      break;
    }
    case ModelKind::kCrf: {
      CrfModel m;
      m.params = params.crf;
      m.weights.init(train.n_classes, train.dim);
      m.iterations = internal::crf_fit(m.weights, train, m.params, &m.final_objective);
      model.state = std::move(m);
      break;
    }
    case ModelKind::kLstm: {
      LstmModel m;
      m.params = params.lstm;
      m.standardizer.fit(train);
      m.init(train.dim, m.params.hidden, train.n_classes, mix_seed(seed, 0x696e6974u));
      const LabeledDataset std_train = m.standardizer.apply(train);
      internal::lstm_fit(m, std_train, seed);
      model.state = std::move(m);
      break;
    }
  }
  return model;
}

std::vector<int> predict(const TrainedModel& model, const LabeledDataset& data) {
  if (data.vectors.empty()) return {};
  if (data.dim != model.dim)
    throw std::runtime_error("predict: vector dimension " + std::to_string(data.dim) +
                             " does not match model dimension " + std::to_string(model.dim));

  std::vector<int> out(data.size(), 0);
  switch (model.kind) {
    case ModelKind::kMajority: {
      const auto& m = std::get<MajorityModel>(model.state);
      std::fill(out.begin(), out.end(), m.label);
      break;
    }
    case ModelKind::kKnn: {
      const auto& m = std::get<KnnModel>(model.state);
      for (size_t i = 0; i < data.size(); ++i)
        out[i] = knn_classify(m.train, m.standardizer.apply(data.vectors[i]), m.params.k);
      break;
    }
    case ModelKind::kSvm: {
      const auto& m = std::get<SvmModel>(model.state);
      for (size_t i = 0; i < data.size(); ++i)
        out[i] = svm_vote(m, m.standardizer.apply(data.vectors[i]), model.n_classes);
      break;
    }
    case ModelKind::kForest: {
      const auto& m = std::get<ForestModel>(model.state);
      std::vector<int> votes(size_t(model.n_classes));
      for (size_t i = 0; i < data.size(); ++i) {
        std::fill(votes.begin(), votes.end(), 0);
        for (const auto& tree : m.trees) votes[size_t(tree_predict(tree, data.vectors[i]))] += 1;
        int best = 0;
        for (int c = 1; c < model.n_classes; ++c)
          if (votes[size_t(c)] > votes[size_t(best)]) best = c;
        out[i] = best;
      }
      break;
    }
    case ModelKind::kCrf: {
      const auto& m = std::get<CrfModel>(model.state);
      std::vector<std::vector<double>> seq;
      for (const auto& ids : data.sequences) {
        seq.clear();
        for (size_t idx : ids) seq.push_back(data.vectors[idx]);
        std::vector<int> labels = viterbi_decode(m.weights, seq);
        for (size_t t = 0; t < ids.size(); ++t) out[ids[t]] = labels[t];
      }
      break;
    }
    case ModelKind::kLstm: {
      const auto& m = std::get<LstmModel>(model.state);
      std::vector<std::vector<double>> seq;
      for (const auto& ids : data.sequences) {
        seq.clear();
        for (size_t idx : ids) seq.push_back(m.standardizer.apply(data.vectors[idx]));
        std::vector<int> labels = lstm_predict_sequence(m, seq);
        for (size_t t = 0; t < ids.size(); ++t) out[ids[t]] = labels[t];
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

json standardizer_to_json(const Standardizer& s) {
  return json{{"mean", s.mean}, {"scale", s.scale}};
}

Standardizer standardizer_from_json(const json& j) {
  Standardizer s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.scale = j.at("scale").get<std::vector<double>>();
  return s;
}

json dataset_to_json(const LabeledDataset& d) {
  return json{{"vectors", d.vectors},
              {"labels", d.labels},
              {"sequences", d.sequences},
              {"n_classes", d.n_classes},
              {"dim", d.dim}};
}

LabeledDataset dataset_from_json(const json& j) {
  LabeledDataset d;
  d.vectors = j.at("vectors").get<std::vector<std::vector<double>>>();
  d.labels = j.at("labels").get<std::vector<int>>();
  d.sequences = j.at("sequences").get<std::vector<std::vector<size_t>>>();
  d.n_classes = j.at("n_classes").get<int>();
  d.dim = j.at("dim").get<size_t>();
  return d;
}

}  // namespace

void save_model(const std::string& path, const TrainedModel& model) {
  json j;
  j["format"] = 1;
  j["kind"] = model_kind_name(model.kind);
  j["dim"] = model.dim;
  j["n_classes"] = model.n_classes;
  j["seed"] = model.seed;

  switch (model.kind) {
    case ModelKind::kMajority: {
      j["state"] = {{"label", std::get<MajorityModel>(model.state).label}};
      break;
    }
    case ModelKind::kKnn: {
      const auto& m = std::get<KnnModel>(model.state);
      j["state"] = {{"k", m.params.k},
                    {"standardizer", standardizer_to_json(m.standardizer)},
                    {"train", dataset_to_json(m.train)}};
      break;
    }
    case ModelKind::kSvm: {
      const auto& m = std::get<SvmModel>(model.state);
      json machines = json::array();
      for (const auto& b : m.machines)
        machines.push_back(json{{"pos", b.pos_class},
                                {"neg", b.neg_class},
                                {"support", b.support},
                                {"coeff", b.coeff},
                                {"bias", b.bias}});
      j["state"] = {{"c", m.params.c},
                    {"sigma", m.params.sigma},
                    {"tol", m.params.tol},
                    {"standardizer", standardizer_to_json(m.standardizer)},
                    {"machines", machines}};
      break;
    }
    case ModelKind::kForest: {
      const auto& m = std::get<ForestModel>(model.state);
      json trees = json::array();
      for (const auto& tree : m.trees) {
        json nodes = json::array();
        for (const TreeNode& n : tree)
          nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.label}));
        trees.push_back(std::move(nodes));
      }
      j["state"] = {{"n_trees", m.params.n_trees},
                    {"min_leaf", m.params.min_leaf},
                    {"trees", trees}};
      break;
    }
    case ModelKind::kCrf: {
      const auto& m = std::get<CrfModel>(model.state);
      j["state"] = {{"l2", m.params.l2},
                    {"max_iter", m.params.max_iter},
                    {"grad_tol", m.params.grad_tol},
                    {"iterations", m.iterations},
                    {"objective", m.final_objective},
                    {"emission", m.weights.emission},
                    {"transition", m.weights.transition},
                    {"bias", m.weights.bias}};
      break;
    }
    case ModelKind::kLstm: {
      const auto& m = std::get<LstmModel>(model.state);
      j["state"] = {{"hidden", m.hidden},
                    {"batch", m.params.batch},
                    {"epochs", m.params.epochs},
                    {"lr", m.params.lr},
                    {"delay", m.params.delay},
                    {"clip_norm", m.params.clip_norm},
                    {"standardizer", standardizer_to_json(m.standardizer)},
                    {"theta", m.theta}};
      break;
    }
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("short write: " + path);
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("bad model file " + path + ": " + e.what());
  }
  if (j.at("format").get<int>() != 1)
    throw std::runtime_error("unsupported model format in " + path);

  TrainedModel model;
  model.kind = model_kind_from_string(j.at("kind").get<std::string>());
  model.dim = j.at("dim").get<size_t>();
  model.n_classes = j.at("n_classes").get<int>();
  model.seed = j.at("seed").get<uint64_t>();
  const json& state = j.at("state");

  switch (model.kind) {
    case ModelKind::kMajority: {
      model.state = MajorityModel{state.at("label").get<int>()};
      break;
    }
    case ModelKind::kKnn: {
      KnnModel m;
      m.params.k = state.at("k").get<int>();
      m.standardizer = standardizer_from_json(state.at("standardizer"));
      m.train = dataset_from_json(state.at("train"));
      model.state = std::move(m);
      break;
    }
    case ModelKind::kSvm: {
      SvmModel m;
      m.params.c = state.at("c").get<double>();
      m.params.sigma = state.at("sigma").get<double>();
      m.params.tol = state.at("tol").get<double>();
      m.standardizer = standardizer_from_json(state.at("standardizer"));
      for (const json& b : state.at("machines")) {
        BinarySvm machine;
        machine.pos_class = b.at("pos").get<int>();
        machine.neg_class = b.at("neg").get<int>();
        machine.support = b.at("support").get<std::vector<std::vector<double>>>();
        machine.coeff = b.at("coeff").get<std::vector<double>>();
        machine.bias = b.at("bias").get<double>();
        m.machines.push_back(std::move(machine));
      }
      model.state = std::move(m);
      break;
    }
    case ModelKind::kForest: {
      ForestModel m;
      m.params.n_trees = state.at("n_trees").get<int>();
      m.params.min_leaf = state.at("min_leaf").get<int>();
      m.n_classes = model.n_classes;
      for (const json& tree : state.at("trees")) {
        std::vector<TreeNode> nodes;
        for (const json& n : tree) {
          TreeNode node;
          node.feature = n.at(0).get<int>();
          node.threshold = n.at(1).get<double>();
          node.left = n.at(2).get<int>();
          node.right = n.at(3).get<int>();
          node.label = n.at(4).get<int>();
          nodes.push_back(node);
        }
        m.trees.push_back(std::move(nodes));
      }
      model.state = std::move(m);
      break;
    }
    case ModelKind::kCrf: {
      CrfModel m;
      m.params.l2 = state.at("l2").get<double>();
      m.params.max_iter = state.at("max_iter").get<int>();
      m.params.grad_tol = state.at("grad_tol").get<double>();
      m.iterations = state.at("iterations").get<int>();
      m.final_objective = state.at("objective").get<double>();
      m.weights.init(model.n_classes, model.dim);
      m.weights.emission = state.at("emission").get<std::vector<double>>();
      m.weights.transition = state.at("transition").get<std::vector<double>>();
      m.weights.bias = state.at("bias").get<std::vector<double>>();
      model.state = std::move(m);
      break;
    }
    case ModelKind::kLstm: {
      LstmModel m;
      m.params.hidden = state.at("hidden").get<int>();
      m.params.batch = state.at("batch").get<int>();
      m.params.epochs = state.at("epochs").get<int>();
      m.params.lr = state.at("lr").get<double>();
      m.params.delay = state.at("delay").get<int>();
      m.params.clip_norm = state.at("clip_norm").get<double>();
      m.standardizer = standardizer_from_json(state.at("standardizer"));
      m.dim = model.dim;
      m.hidden = m.params.hidden;
      m.n_classes = model.n_classes;
      m.theta = state.at("theta").get<std::vector<double>>();
      if (m.theta.size() != m.parameter_count())
        throw std::runtime_error("lstm: theta length mismatch in " + path);
      model.state = std::move(m);
      break;
    }
  }
  return model;
}

}  // namespace prosodid
