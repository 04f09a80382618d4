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

#include "prosodid/pitch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace prosodid {

namespace {

struct Candidate {
  double f0 = 0.0;
  double score = 0.0;  // lag-bias adjusted NCCF peak
};

constexpr double kCandidateFloor = 0.2;

}  // namespace

PitchResult track_f0(const AudioRecording& rec, const FrameSpec& spec, const PitchConfig& cfg) {
  spec.validate();
  if (rec.sample_rate != spec.sample_rate)
    throw std::runtime_error("track_f0: recording not at the analysis rate");
  if (cfg.f0_min <= 0.0 || cfg.f0_max <= cfg.f0_min)
    throw std::runtime_error("track_f0: invalid F0 range");

  const double fs = spec.sample_rate;
  const long corr_len = std::lround(cfg.corr_window * fs);
  const long tau_min = std::max<long>(2, long(fs / cfg.f0_max));
  const long tau_max = long(std::ceil(fs / cfg.f0_min));
  if (tau_max <= tau_min + 2) throw std::runtime_error("track_f0: degenerate lag range");
  const long hop = spec.hop_samples();
  const size_t n_frames = spec.frame_count(rec.samples.size());

  // work on a zero-padded copy so segments near the edges never index out
  const long pad = corr_len + tau_max;
  std::vector<double> x(size_t(2 * pad) + rec.samples.size(), 0.0);
  std::copy(rec.samples.begin(), rec.samples.end(), x.begin() + pad);
  std::vector<double> psum(x.size() + 1, 0.0);  // prefix sums of x^2
  for (size_t i = 0; i < x.size(); ++i) psum[i + 1] = psum[i] + x[i] * x[i];

  std::vector<std::vector<Candidate>> cands(n_frames);
  std::vector<double> nccf(size_t(tau_max) + 1, 0.0);
  for (size_t f = 0; f < n_frames; ++f) {
    long center = long(f) * hop;
    long base = pad + center - (corr_len + tau_max) / 2;
    double e0 = psum[size_t(base + corr_len)] - psum[size_t(base)];
    if (e0 <= 0.0) continue;
    for (long tau = tau_min; tau <= tau_max; ++tau) {
      double cross = 0.0;
      const double* a = x.data() + base;
      const double* b = x.data() + base + tau;
      for (long j = 0; j < corr_len; ++j) cross += a[j] * b[j];
      double et = psum[size_t(base + tau + corr_len)] - psum[size_t(base + tau)];
      nccf[size_t(tau)] = cross / std::sqrt((e0 + 1e-12) * (et + 1e-12));
    }
    // local maxima, refined by parabolic interpolation around the peak lag
    std::vector<Candidate>& list = cands[f];
    for (long tau = tau_min + 1; tau < tau_max; ++tau) {
      double s = nccf[size_t(tau)];
      if (s <= kCandidateFloor) continue;
      double sl = nccf[size_t(tau) - 1], sr = nccf[size_t(tau) + 1];
      if (s < sl || s <= sr) continue;
      double denom = sl - 2.0 * s + sr;
      double delta = denom < 0.0 ? std::clamp(0.5 * (sl - sr) / denom, -0.5, 0.5) : 0.0;
      double peak = s - 0.25 * (sl - sr) * delta;
      double lag = double(tau) + delta;
      double bias = 1.0 - cfg.lag_bias * (lag - tau_min) / double(tau_max - tau_min);
      Candidate c;
      c.f0 = std::clamp(fs / lag, cfg.f0_min, cfg.f0_max);
      c.score = std::min(peak, 1.0) * bias;
      list.push_back(c);
    }
    if (long(list.size()) > cfg.max_candidates) {
      std::sort(list.begin(), list.end(),
                [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
      list.resize(size_t(cfg.max_candidates));
    }
    std::sort(list.begin(), list.end(),
              [](const Candidate& a, const Candidate& b) { return a.f0 < b.f0; });
  }

  // DP over candidates plus one unvoiced state per frame; cost is
  // (1 - score) locally plus octave / voicing-switch transition penalties
  const double inf = std::numeric_limits<double>::infinity();
  const double uv_cost = 1.0 - cfg.voicing_threshold;
  std::vector<std::vector<double>> cost(n_frames);
  std::vector<std::vector<int>> back(n_frames);
  for (size_t f = 0; f < n_frames; ++f) {
    size_t n_states = cands[f].size() + 1;  // candidates, then unvoiced last
    cost[f].assign(n_states, inf);
    back[f].assign(n_states, -1);
    for (size_t s = 0; s < n_states; ++s) {
      bool voiced = s < cands[f].size();
      double local = voiced ? 1.0 - cands[f][s].score : uv_cost;
      if (f == 0) {
        cost[f][s] = local;
        continue;
      }
      size_t n_prev = cands[f - 1].size() + 1;
      for (size_t p = 0; p < n_prev; ++p) {
        bool prev_voiced = p < cands[f - 1].size();
        double trans;
        if (voiced && prev_voiced)
          trans = cfg.octave_penalty * std::abs(std::log2(cands[f][s].f0 / cands[f - 1][p].f0));
        else if (voiced != prev_voiced)
          trans = cfg.vuv_penalty;
        else
          trans = 0.0;
        double total = cost[f - 1][p] + trans + local;
        if (total < cost[f][s]) {
          cost[f][s] = total;
          back[f][s] = int(p);
        }
      }
    }
  }

  PitchResult result;
  result.f0.assign(n_frames, 0.0);
  result.voiced.assign(n_frames, 0);
  if (n_frames == 0) return result;
  size_t best = 0;
  for (size_t s = 1; s < cost[n_frames - 1].size(); ++s)
    if (cost[n_frames - 1][s] < cost[n_frames - 1][best]) best = s;
  for (size_t f = n_frames; f-- > 0;) {
    if (best < cands[f].size()) {
      result.f0[f] = cands[f][best].f0;
      result.voiced[f] = 1;
    }
    if (f > 0) best = size_t(back[f][best]);
  }
  return result;
}

}  // namespace prosodid
