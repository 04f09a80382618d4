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

#include "prosodid/syllabifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace prosodid {

std::vector<double> compute_envelope(const AudioRecording& rec, const OscillatorConfig& cfg) {
  cfg.validate();
  if (rec.sample_rate <= 0) throw std::runtime_error("compute_envelope: invalid sample rate");
  const double fs = rec.sample_rate;
  const size_t n = rec.samples.size();

  // biquad low-pass at 30 Hz (Butterworth Q = 1/sqrt(2)), bilinear transform
  const double fc = 30.0;
  const double w0 = 2.0 * M_PI * fc / fs;
  const double alpha = std::sin(w0) / (2.0 * (1.0 / std::sqrt(2.0)));
  const double cw = std::cos(w0);
  const double a0 = 1.0 + alpha;
  const double b0 = (1.0 - cw) / 2.0 / a0;
  const double b1 = (1.0 - cw) / a0;
  const double b2 = b0;
  const double a1 = -2.0 * cw / a0;
  const double a2 = (1.0 - alpha) / a0;

  std::vector<double> filtered(n, 0.0);
  double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double x0 = std::abs(rec.samples[i]);
    double y0 = b0 * x0 + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    filtered[i] = y0;
    x2 = x1;
    x1 = x0;
    y2 = y1;
    y1 = y0;
  }

  const size_t n_env = size_t(std::floor(double(n) * cfg.envelope_rate / fs));
  std::vector<double> env(n_env, 0.0);
  for (size_t m = 0; m < n_env; ++m) {
    size_t idx = std::min(n - 1, size_t(std::llround(double(m) * fs / cfg.envelope_rate)));
    env[m] = std::max(0.0, filtered[idx]);
  }
  return env;
}

std::vector<double> oscillate(const std::vector<double>& envelope, const OscillatorConfig& cfg) {
  cfg.validate();
  const double omega = 2.0 * M_PI * cfg.center_freq;
  const double k = omega * omega;  // unit DC gain: steady state k/omega^2 = 1
  const double damping = omega / cfg.q_factor;
  const double dt = 1.0 / cfg.envelope_rate;

  std::vector<double> x(envelope.size(), 0.0);
  double pos = 0.0, vel = 0.0;
  for (size_t i = 0; i < envelope.size(); ++i) {
    vel += dt * (k * envelope[i] - damping * vel - omega * omega * pos);
    pos += dt * vel;
    x[i] = pos;
  }
  return x;
}

std::vector<UnitSegment> detect_syllables(const std::vector<double>& displacement,
                                          const OscillatorConfig& cfg, double min_dur) {
  cfg.validate();
  if (min_dur < 0.0) throw std::runtime_error("detect_syllables: negative min_dur");
  const size_t n = displacement.size();
  const double duration = double(n) / cfg.envelope_rate;

  std::vector<size_t> maxima;
  for (size_t i = 1; i + 1 < n; ++i) {
    if (displacement[i] > displacement[i - 1] && displacement[i] > displacement[i + 1])
      maxima.push_back(i);
  }
  if (maxima.empty()) return {};

  // internal boundaries at the deepest point between successive maxima;
  // outer boundaries pin the first and last segment to the signal edges
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> bounds{0.0};
  std::vector<double> strength{inf};  // displacement at the boundary; lower = stronger
  for (size_t m = 0; m + 1 < maxima.size(); ++m) {
    size_t arg = maxima[m];
    for (size_t i = maxima[m] + 1; i <= maxima[m + 1]; ++i)
      if (displacement[i] < displacement[arg]) arg = i;
    bounds.push_back(double(arg) / cfg.envelope_rate);
    strength.push_back(displacement[arg]);
  }
  bounds.push_back(duration);
  strength.push_back(inf);

  // merge segments below min_dur across their shallower boundary
  while (bounds.size() > 2) {
    size_t victim = 0;
    bool found = false;
    for (size_t s = 0; s + 1 < bounds.size(); ++s) {
      if (bounds[s + 1] - bounds[s] < min_dur) {
        victim = s;
        found = true;
        break;
      }
    }
    if (!found) break;
    double left = strength[victim], right = strength[victim + 1];
    size_t drop;
    if (left == inf) drop = victim + 1;        // signal edges stay put
    else if (right == inf) drop = victim;
    else drop = left >= right ? victim : victim + 1;
    bounds.erase(bounds.begin() + long(drop));
    strength.erase(strength.begin() + long(drop));
  }
  if (bounds.size() == 2 && bounds[1] - bounds[0] < min_dur) return {};

  std::vector<UnitSegment> segments;
  for (size_t s = 0; s + 1 < bounds.size(); ++s) {
    UnitSegment seg;
    seg.start = bounds[s];
    seg.end = bounds[s + 1];
    seg.tier = Tier::kSyllable;
    seg.text = "syl";
    segments.push_back(seg);
  }
  return segments;
}

std::vector<UnitSegment> syllabify_recording(const AudioRecording& rec,
                                             const OscillatorConfig& cfg, double min_dur) {
  std::vector<double> env = compute_envelope(rec, cfg);
  std::vector<double> disp = oscillate(env, cfg);
  std::vector<UnitSegment> segments = detect_syllables(disp, cfg, min_dur);
  for (auto& s : segments) s.recording_id = rec.recording_id;
  return segments;
}

}  // namespace prosodid
