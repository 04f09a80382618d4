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

namespace prosodid {

double rbf_kernel(const std::vector<double>& a, const std::vector<double>& b, double sigma) {
  if (a.size() != b.size()) throw std::runtime_error("rbf_kernel: dimension mismatch");
  double d2 = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double diff = a[i] - b[i];
    d2 += diff * diff;
  }
  return std::exp(-d2 / (2.0 * sigma * sigma));
}

double BinarySvm::decision(const std::vector<double>& x, double sigma) const {
  double f = bias;
  for (size_t i = 0; i < support.size(); ++i) f += coeff[i] * rbf_kernel(support[i], x, sigma);
  return f;
}

namespace {

// Platt's SMO with a full error cache and a precomputed kernel matrix.
// Pair selection is deterministic: the second-choice heuristic maximizes
// |E1 - E2| over non-bound alphas (lowest index on ties), then falls back to
// a scan in index order.
class Smo {
 public:
  Smo(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
      const SvmParams& params)
      : x_(x), y_(y), c_(params.c), tol_(params.tol), n_(x.size()) {
    kernel_.assign(n_ * n_, 0.0);
    for (size_t i = 0; i < n_; ++i)
      for (size_t j = i; j < n_; ++j) {
        double k = rbf_kernel(x_[i], x_[j], params.sigma);
        kernel_[i * n_ + j] = k;
        kernel_[j * n_ + i] = k;
      }
    alpha_.assign(n_, 0.0);
    error_.resize(n_);
    for (size_t i = 0; i < n_; ++i) error_[i] = -double(y_[i]);  // f = 0 initially
  }

  SmoResult run() {
    int passes = 0;
    bool examine_all = true;
    int changed = 0;
    const int max_passes = 10000;
    do {
      changed = 0;
      for (size_t i = 0; i < n_; ++i) {
        if (!examine_all && !non_bound(i)) continue;
        changed += examine(i);
      }
      if (examine_all) examine_all = false;
      else if (changed == 0) examine_all = true;
      ++passes;
    } while ((changed > 0 || !examine_all) && passes < max_passes);

    SmoResult result;
    result.alpha = alpha_;
    result.bias = b_;
    result.passes = passes;
    return result;
  }

 private:
  bool non_bound(size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < c_; }

  int examine(size_t i2) {
    double y2 = y_[i2];
    double e2 = error_[i2];
    double r2 = e2 * y2;
    if (!((r2 < -tol_ && alpha_[i2] < c_) || (r2 > tol_ && alpha_[i2] > 0.0))) return 0;

    // heuristic 1: maximize |E1 - E2| over non-bound points
    size_t best = n_;
    double best_gap = -1.0;
    for (size_t i = 0; i < n_; ++i) {
      if (i == i2 || !non_bound(i)) continue;
      double gap = std::abs(error_[i] - e2);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best < n_ && step(best, i2)) return 1;
    // heuristic 2: all non-bound, then everything, in index order
    for (size_t i = 0; i < n_; ++i)
      if (i != i2 && non_bound(i) && step(i, i2)) return 1;
    for (size_t i = 0; i < n_; ++i)
      if (i != i2 && !non_bound(i) && step(i, i2)) return 1;
    return 0;
  }

  bool step(size_t i1, size_t i2) {
    double y1 = y_[i1], y2 = y_[i2];
    double a1 = alpha_[i1], a2 = alpha_[i2];
    double e1 = error_[i1], e2 = error_[i2];
    double s = y1 * y2;
    double lo, hi;
    if (s < 0) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c_, c_ + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c_);
      hi = std::min(c_, a1 + a2);
    }
    if (lo >= hi) return false;

    double k11 = kernel_[i1 * n_ + i1];
    double k12 = kernel_[i1 * n_ + i2];
    double k22 = kernel_[i2 * n_ + i2];
    double eta = k11 + k22 - 2.0 * k12;
    double a2_new;
    if (eta > 1e-12) {
      a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // flat direction: evaluate the objective at both clip ends
      double f1 = y1 * (e1 + b_) - a1 * k11 - s * a2 * k12;
      double f2 = y2 * (e2 + b_) - s * a1 * k12 - a2 * k22;
      double l1 = a1 + s * (a2 - lo);
      double h1 = a1 + s * (a2 - hi);
      double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                      s * lo * l1 * k12;
      double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                      s * hi * h1 * k12;
      if (obj_lo < obj_hi - 1e-12) a2_new = lo;
      else if (obj_hi < obj_lo - 1e-12) a2_new = hi;
      else return false;
    }
    if (std::abs(a2_new - a2) < 1e-12 * (a2_new + a2 + 1e-12)) return false;
    double a1_new = a1 + s * (a2 - a2_new);

    // bias so that non-bound KKT holds with equality
    double b1 = e1 + y1 * (a1_new - a1) * k11 + y2 * (a2_new - a2) * k12 + b_;
    double b2 = e2 + y1 * (a1_new - a1) * k12 + y2 * (a2_new - a2) * k22 + b_;
    double b_new;
    if (a1_new > 0.0 && a1_new < c_) b_new = b1;
    else if (a2_new > 0.0 && a2_new < c_) b_new = b2;
    else b_new = 0.5 * (b1 + b2);

    double d1 = y1 * (a1_new - a1), d2 = y2 * (a2_new - a2), db = b_new - b_;
    for (size_t i = 0; i < n_; ++i)
      error_[i] += d1 * kernel_[i1 * n_ + i] + d2 * kernel_[i2 * n_ + i] - db;
    alpha_[i1] = a1_new;
    alpha_[i2] = a2_new;
    b_ = b_new;
    return true;
  }

  const std::vector<std::vector<double>>& x_;
  const std::vector<int>& y_;
  double c_;
  double tol_;
  size_t n_;
  std::vector<double> kernel_;
  std::vector<double> alpha_;
  std::vector<double> error_;
  double b_ = 0.0;  // f(x) = sum coeff K - b_ during training
};

}  // namespace

SmoResult smo_train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                    const SvmParams& params) {
  if (x.empty() || x.size() != y.size()) throw std::runtime_error("smo: bad training data");
  bool has_pos = false, has_neg = false;
  for (int v : y) {
    if (v == 1) has_pos = true;
    else if (v == -1) has_neg = true;
    else throw std::runtime_error("smo: labels must be +1/-1");
  }
  if (!has_pos || !has_neg) throw std::runtime_error("smo: single-class input");
  Smo solver(x, y, params);
  return solver.run();
}

}  // namespace prosodid
