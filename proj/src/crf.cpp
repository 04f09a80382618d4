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
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "prosodid/classifiers.hpp"
#include "prosodid/common.hpp"

namespace prosodid {

double CrfWeights::emission_score(int label, const std::vector<double>& x) const {
  if (x.size() != dim) throw std::runtime_error("crf: vector dimension mismatch");
  const double* row = emission.data() + size_t(label) * dim;
  double s = bias[size_t(label)];
  for (size_t j = 0; j < dim; ++j) s += row[j] * x[j];
  return s;
}

std::vector<double> crf_flatten(const CrfWeights& w) {
  std::vector<double> theta;
  theta.reserve(w.parameter_count());
  theta.insert(theta.end(), w.emission.begin(), w.emission.end());
  theta.insert(theta.end(), w.transition.begin(), w.transition.end());
  theta.insert(theta.end(), w.bias.begin(), w.bias.end());
  return theta;
}

CrfWeights crf_unflatten(const std::vector<double>& theta, int n_classes, size_t dim) {
  CrfWeights w;
  w.init(n_classes, dim);
  if (theta.size() != w.parameter_count())
    throw std::runtime_error("crf: parameter vector has the wrong length");
  auto it = theta.begin();
  std::copy(it, it + long(w.emission.size()), w.emission.begin());
  it += long(w.emission.size());
  std::copy(it, it + long(w.transition.size()), w.transition.begin());
  it += long(w.transition.size());
  std::copy(it, theta.end(), w.bias.begin());
  return w;
}

namespace {

// emission scores for one sequence: [t][label]
std::vector<std::vector<double>> emission_scores(const CrfWeights& w,
                                                 const std::vector<std::vector<double>>& seq) {
  std::vector<std::vector<double>> scores(seq.size(), std::vector<double>(size_t(w.n_classes)));
  for (size_t t = 0; t < seq.size(); ++t)
    for (int y = 0; y < w.n_classes; ++y) scores[t][size_t(y)] = w.emission_score(y, seq[t]);
  return scores;
}

CrfMarginals forward_backward_scores(const CrfWeights& w,
                                     const std::vector<std::vector<double>>& scores) {
  const size_t len = scores.size();
  const int k = w.n_classes;
  CrfMarginals out;
  std::vector<std::vector<double>> log_a(len, std::vector<double>(size_t(k)));
  std::vector<std::vector<double>> log_b(len, std::vector<double>(size_t(k), 0.0));
  std::vector<double> work(static_cast<size_t>(k));

  log_a[0] = scores[0];
  for (size_t t = 1; t < len; ++t) {
    for (int y = 0; y < k; ++y) {
      for (int p = 0; p < k; ++p)
        work[size_t(p)] = log_a[t - 1][size_t(p)] + w.transition[size_t(p) * size_t(k) + size_t(y)];
      log_a[t][size_t(y)] = scores[t][size_t(y)] + log_sum_exp(work.data(), size_t(k));
    }
  }
  out.log_z = log_sum_exp(log_a[len - 1].data(), size_t(k));

  for (size_t t = len - 1; t-- > 0;) {
    for (int y = 0; y < k; ++y) {
      for (int n = 0; n < k; ++n)
        work[size_t(n)] = w.transition[size_t(y) * size_t(k) + size_t(n)] +
                          scores[t + 1][size_t(n)] + log_b[t + 1][size_t(n)];
      log_b[t][size_t(y)] = log_sum_exp(work.data(), size_t(k));
    }
  }

  out.unary.assign(len, std::vector<double>(size_t(k)));
  for (size_t t = 0; t < len; ++t)
    for (int y = 0; y < k; ++y)
      out.unary[t][size_t(y)] = std::exp(log_a[t][size_t(y)] + log_b[t][size_t(y)] - out.log_z);

  if (len > 1) {
    out.pairwise.assign(len - 1, std::vector<double>(size_t(k) * size_t(k)));
    for (size_t t = 0; t + 1 < len; ++t)
      for (int p = 0; p < k; ++p)
        for (int y = 0; y < k; ++y)
          out.pairwise[t][size_t(p) * size_t(k) + size_t(y)] =
              std::exp(log_a[t][size_t(p)] + w.transition[size_t(p) * size_t(k) + size_t(y)] +
                       scores[t + 1][size_t(y)] + log_b[t + 1][size_t(y)] - out.log_z);
  }
  return out;
}

}  // namespace

CrfMarginals crf_forward_backward(const CrfWeights& w,
                                  const std::vector<std::vector<double>>& seq) {
  if (seq.empty()) throw std::runtime_error("crf_forward_backward: empty sequence");
  return forward_backward_scores(w, emission_scores(w, seq));
}

std::vector<int> viterbi_decode(const CrfWeights& w, const std::vector<std::vector<double>>& seq) {
  if (seq.empty()) return {};
  const std::vector<std::vector<double>> scores = emission_scores(w, seq);
  const size_t len = seq.size();
  const int k = w.n_classes;
  std::vector<std::vector<double>> best(len, std::vector<double>(size_t(k)));
  std::vector<std::vector<int>> from(len, std::vector<int>(size_t(k), -1));

  best[0] = scores[0];
  for (size_t t = 1; t < len; ++t) {
    for (int y = 0; y < k; ++y) {
      double top = -std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int p = 0; p < k; ++p) {
        double v = best[t - 1][size_t(p)] + w.transition[size_t(p) * size_t(k) + size_t(y)];
        if (v > top) {  // strict: ties keep the lowest predecessor index
          top = v;
          arg = p;
        }
      }
      best[t][size_t(y)] = top + scores[t][size_t(y)];
      from[t][size_t(y)] = arg;
    }
  }

  int label = 0;
  for (int y = 1; y < k; ++y)
    if (best[len - 1][size_t(y)] > best[len - 1][size_t(label)]) label = y;
  std::vector<int> path(len);
  for (size_t t = len; t-- > 0;) {
    path[t] = label;
    if (t > 0) label = from[t][size_t(label)];
  }
  return path;
}

double crf_objective(const std::vector<double>& theta, int n_classes, size_t dim,
                     const LabeledDataset& data, double l2, std::vector<double>* grad) {
  const CrfWeights w = crf_unflatten(theta, n_classes, dim);
  const size_t k = size_t(n_classes);
  const size_t em_size = k * dim;
  double ll = 0.0;
  if (grad) grad->assign(theta.size(), 0.0);

  std::vector<std::vector<double>> seq;
  for (const auto& ids : data.sequences) {
    if (ids.empty()) continue;
    seq.clear();
    for (size_t idx : ids) seq.push_back(data.vectors[idx]);
    const std::vector<std::vector<double>> scores = emission_scores(w, seq);
    const CrfMarginals fb = forward_backward_scores(w, scores);

    double path_score = 0.0;
    for (size_t t = 0; t < ids.size(); ++t) {
      int y = data.labels[ids[t]];
      path_score += scores[t][size_t(y)];
      if (t > 0) {
        int p = data.labels[ids[t - 1]];
        path_score += w.transition[size_t(p) * k + size_t(y)];
      }
    }
    ll += path_score - fb.log_z;

    if (!grad) continue;
    for (size_t t = 0; t < ids.size(); ++t) {
      int y = data.labels[ids[t]];
      const std::vector<double>& x = seq[t];
      double* em_grad = grad->data();
      for (size_t j = 0; j < dim; ++j) em_grad[size_t(y) * dim + j] += x[j];
      (*grad)[em_size + k * k + size_t(y)] += 1.0;  // bias block
      for (int c = 0; c < n_classes; ++c) {
        double p = fb.unary[t][size_t(c)];
        for (size_t j = 0; j < dim; ++j) em_grad[size_t(c) * dim + j] -= p * x[j];
        (*grad)[em_size + k * k + size_t(c)] -= p;
      }
      if (t > 0) {
        int p_lab = data.labels[ids[t - 1]];
        (*grad)[em_size + size_t(p_lab) * k + size_t(y)] += 1.0;
        for (size_t pc = 0; pc < k; ++pc)
          for (size_t yc = 0; yc < k; ++yc)
            (*grad)[em_size + pc * k + yc] -= fb.pairwise[t - 1][pc * k + yc];
      }
    }
  }

  double reg = 0.0;
  for (double v : theta) reg += v * v;
  ll -= 0.5 * l2 * reg;
  if (grad)
    for (size_t i = 0; i < theta.size(); ++i) (*grad)[i] -= l2 * theta[i];
  if (!std::isfinite(ll))
    throw std::runtime_error("crf: non-finite objective (check feature scaling)");
  return ll;
}

namespace internal {

// L-BFGS (history 10) maximizing the regularized conditional log-likelihood,
// with Armijo backtracking. Returns the iteration count actually used.
int crf_fit(CrfWeights& w, const LabeledDataset& data, const CrfTrainParams& params,
            double* objective_out) {
  const int k = w.n_classes;
  const size_t dim = w.dim;
  std::vector<double> theta = crf_flatten(w);
  std::vector<double> grad;
  double obj = crf_objective(theta, k, dim, data, params.l2, &grad);

  const size_t history = 10;
  std::deque<std::vector<double>> s_list, y_list;
  std::deque<double> rho_list;
  std::vector<double> theta_new, grad_new, direction;
  int iter = 0;

  auto inf_norm = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };

  for (; iter < params.max_iter; ++iter) {
    if (inf_norm(grad) < params.grad_tol) break;

    // two-loop recursion on the negative objective: d = H * grad (ascent)
    direction = grad;
    std::vector<double> alpha(s_list.size());
    for (size_t i = s_list.size(); i-- > 0;) {
      double a = rho_list[i] * std::inner_product(s_list[i].begin(), s_list[i].end(),
                                                  direction.begin(), 0.0);
      alpha[i] = a;
      for (size_t j = 0; j < direction.size(); ++j) direction[j] -= a * y_list[i][j];
    }
    if (!s_list.empty()) {
      const auto& s = s_list.back();
      const auto& y = y_list.back();
      double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
      double yy = std::inner_product(y.begin(), y.end(), y.begin(), 0.0);
      if (yy > 0.0) {
        double gamma = sy / yy;
        for (auto& d : direction) d *= gamma;
      }
    }
    for (size_t i = 0; i < s_list.size(); ++i) {
      double b = rho_list[i] * std::inner_product(y_list[i].begin(), y_list[i].end(),
                                                  direction.begin(), 0.0);
      for (size_t j = 0; j < direction.size(); ++j)
        direction[j] += (alpha[i] - b) * s_list[i][j];
    }

    double dg = std::inner_product(direction.begin(), direction.end(), grad.begin(), 0.0);
    if (dg <= 0.0) {  // not an ascent direction; restart from steepest ascent
      direction = grad;
      dg = std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0);
      s_list.clear();
      y_list.clear();
      rho_list.clear();
    }

    // Armijo backtracking on the ascent direction
    double step = s_list.empty() ? std::min(1.0, 1.0 / std::sqrt(dg)) : 1.0;
    const double c1 = 1e-4;
    double obj_new = obj;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      theta_new.assign(theta.begin(), theta.end());
      for (size_t j = 0; j < theta.size(); ++j) theta_new[j] += step * direction[j];
      obj_new = crf_objective(theta_new, k, dim, data, params.l2, &grad_new);
      if (obj_new >= obj + c1 * step * dg) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no ascent possible at machine precision

    std::vector<double> s(theta.size()), yv(theta.size());
    for (size_t j = 0; j < theta.size(); ++j) {
      s[j] = theta_new[j] - theta[j];
      yv[j] = -(grad_new[j] - grad[j]);  // curvature pair of the negative objective
    }
    double sy = std::inner_product(s.begin(), s.end(), yv.begin(), 0.0);
    if (sy > 1e-12) {
      if (s_list.size() == history) {
        s_list.pop_front();
        y_list.pop_front();
        rho_list.pop_front();
      }
      s_list.push_back(std::move(s));
      y_list.push_back(std::move(yv));
      rho_list.push_back(1.0 / sy);
    }
    theta.swap(theta_new);
    grad.swap(grad_new);
    obj = obj_new;
  }

  w = crf_unflatten(theta, k, dim);
  if (objective_out) *objective_out = obj;
  return iter;
}

}  // namespace internal

}  // namespace prosodid
