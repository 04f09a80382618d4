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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "prosodid/syllabifier.hpp"
#include "test_util.hpp"

using namespace prosodid;
using testutil::make_am_tone;
using testutil::make_recording;

namespace {

// Dominant envelope frequency measured by counting mean-crossing cycles,
// which resolves far below the FFT bin width for long signals.
double cycle_frequency(const std::vector<double>& env, double rate,
                       size_t skip) {
  double mean = 0.0;
  for (size_t i = skip; i < env.size(); ++i) mean += env[i];
  mean /= double(env.size() - skip);
  std::vector<double> ups;
  for (size_t i = skip + 1; i < env.size(); ++i) {
    if (env[i - 1] < mean && env[i] >= mean) {
      // linear interpolation of the crossing instant
      const double frac = (mean - env[i - 1]) / (env[i] - env[i - 1]);
      ups.push_back((double(i - 1) + frac) / rate);
    }
  }
  if (ups.size() < 2) return 0.0;
  return double(ups.size() - 1) / (ups.back() - ups.front());
}

std::vector<double> boundaries(const std::vector<UnitSegment>& segs) {
  std::vector<double> b;
  for (const auto& s : segs) b.push_back(s.start);
  if (!segs.empty()) b.push_back(segs.back().end);
  return b;
}

}  // namespace

TEST_CASE("compute_envelope of silence is silence") {
  AudioRecording rec = make_recording(std::vector<double>(8000, 0.0), 8000);
  for (double v : compute_envelope(rec)) CHECK(v == 0.0);
}

TEST_CASE("compute_envelope of a steady tone is flat after settling") {
  OscillatorConfig cfg;
  AudioRecording rec = make_recording(testutil::make_sine(1000.0, 1.0, 8000, 0.4), 8000);
  std::vector<double> env = compute_envelope(rec, cfg);
  REQUIRE(std::abs(long(env.size()) - 1000L) <= 1);
  const size_t settle = size_t(0.05 * cfg.envelope_rate);
  double lo = 1e9, hi = -1e9;
  for (size_t i = settle; i + settle < env.size(); ++i) {
    lo = std::min(lo, env[i]);
    hi = std::max(hi, env[i]);
  }
  INFO("lo=", lo, " hi=", hi);
  CHECK(hi / lo <= 1.05);
  CHECK(lo > 0.0);
}

TEST_CASE("compute_envelope follows the AM rate") {
  OscillatorConfig cfg;
  AudioRecording rec = make_recording(make_am_tone(500.0, 4.0, 10.0, 8000), 8000);
  std::vector<double> env = compute_envelope(rec, cfg);
  const double hz = cycle_frequency(env, cfg.envelope_rate, size_t(0.5 * cfg.envelope_rate));
  INFO("measured=", hz);
  CHECK(std::abs(hz - 4.0) <= 0.02 * 4.0);
}

TEST_CASE("oscillate reproduces the analytic second-order response") {
  OscillatorConfig cfg;  // 5 Hz, Q = 0.5, 1 kHz
  const double w0 = 2.0 * M_PI * cfg.center_freq;

  SUBCASE("zero input, zero output") {
    std::vector<double> x = oscillate(std::vector<double>(2000, 0.0), cfg);
    for (double v : x) CHECK(v == 0.0);
  }

  SUBCASE("unit step settles at the DC gain of one without overshoot") {
    std::vector<double> x = oscillate(std::vector<double>(3000, 1.0), cfg);
    double peak = 0.0;
    for (double v : x) peak = std::max(peak, v);
    CHECK(peak <= 1.05);
    CHECK(x.back() == doctest::Approx(1.0).epsilon(0.01));
  }

  SUBCASE("sine drives match |H| at 1, 5 and 20 Hz") {
    for (double f : {1.0, 5.0, 20.0}) {
      CAPTURE(f);
      const double w = 2.0 * M_PI * f;
      const double analytic =
          w0 * w0 / std::sqrt((w0 * w0 - w * w) * (w0 * w0 - w * w) +
                              (w0 * w / cfg.q_factor) * (w0 * w / cfg.q_factor));
      // Offset drive keeps the envelope non-negative; the oscillation rides
      // on the DC response.
      const size_t n = size_t(6.0 * cfg.envelope_rate);
      std::vector<double> e(n);
      for (size_t i = 0; i < n; ++i) {
        e[i] = 0.5 + 0.4 * std::sin(w * double(i) / cfg.envelope_rate);
      }
      std::vector<double> x = oscillate(e, cfg);
      double lo = 1e9, hi = -1e9;
      for (size_t i = n / 2; i < n; ++i) {
        lo = std::min(lo, x[i]);
        hi = std::max(hi, x[i]);
      }
      const double measured = (hi - lo) / 2.0 / 0.4;
      INFO("analytic=", analytic, " measured=", measured);
      CHECK(measured == doctest::Approx(analytic).epsilon(0.05));
    }
  }
}

TEST_CASE("detect_syllables counts AM pulses") {
  OscillatorConfig cfg;
  SUBCASE("4 Hz over 2 s gives 8 +- 1 syllables with 250 ms spacing") {
    AudioRecording rec = make_recording(make_am_tone(500.0, 4.0, 2.0, 8000), 8000);
    auto segs = syllabify_recording(rec, cfg);
    INFO("count=", segs.size());
    CHECK(std::abs(long(segs.size()) - 8L) <= 1);
    // Interior segments: 250 ms +- 20%.
    for (size_t i = 1; i + 1 < segs.size(); ++i) {
      const double dur = segs[i].end - segs[i].start;
      CHECK(dur >= 0.25 * 0.8);
      CHECK(dur <= 0.25 * 1.2);
    }
  }
  SUBCASE("6 Hz over 2 s gives 12 +- 2 syllables") {
    AudioRecording rec = make_recording(make_am_tone(500.0, 6.0, 2.0, 8000), 8000);
    auto segs = syllabify_recording(rec, cfg);
    INFO("count=", segs.size());
    CHECK(std::abs(long(segs.size()) - 12L) <= 2);
  }
}

TEST_CASE("detect_syllables basic contracts") {
  OscillatorConfig cfg;
  SUBCASE("flat displacement has no syllables") {
    CHECK(detect_syllables(std::vector<double>(1000, 0.0), cfg).empty());
    CHECK(detect_syllables(std::vector<double>(1000, 0.7), cfg).empty());
  }
  SUBCASE("segments are ordered, tight and tile the full duration") {
    AudioRecording rec = make_recording(make_am_tone(500.0, 5.0, 3.0, 8000), 8000);
    auto segs = syllabify_recording(rec, cfg, 0.05);
    REQUIRE(!segs.empty());
    CHECK(segs.front().start == 0.0);
    CHECK(segs.back().end == doctest::Approx(3.0).epsilon(1e-6));
    for (size_t i = 0; i < segs.size(); ++i) {
      CHECK(segs[i].end > segs[i].start);
      CHECK(segs[i].end - segs[i].start >= 0.05 - 1e-9);
      CHECK(segs[i].tier == Tier::kSyllable);
      CHECK(segs[i].recording_id == "test");
      if (i > 0) CHECK(segs[i].start == segs[i - 1].end);
    }
  }
  SUBCASE("close maxima are merged by min_dur") {
    // Three humps 30 ms apart put two boundaries only 30 ms from each other;
    // the short segment between them must be merged away at min_dur 50 ms.
    const double rate = 1000.0;
    std::vector<double> x(900, 0.0);
    auto hump = [&](double center_sec, double width_sec, double amp) {
      for (size_t i = 0; i < x.size(); ++i) {
        const double t = double(i) / rate - center_sec;
        x[i] += amp * std::exp(-t * t / (2.0 * width_sec * width_sec));
      }
    };
    hump(0.200, 0.010, 1.0);
    hump(0.230, 0.010, 0.95);
    hump(0.260, 0.010, 1.0);
    hump(0.650, 0.030, 1.0);
    auto split = detect_syllables(x, cfg, 0.005);
    auto merged = detect_syllables(x, cfg, 0.05);
    CHECK(split.size() == 4);
    CHECK(split.size() == merged.size() + 1);
    for (const auto& s : merged) CHECK(s.end - s.start >= 0.05 - 1e-9);
  }
}

TEST_CASE("detect_syllables shifts with the signal") {
  OscillatorConfig cfg;
  const int rate = 8000;
  const double shift = 0.1;
  std::vector<double> tone = make_am_tone(500.0, 4.0, 2.0, rate);
  std::vector<double> shifted(size_t(shift * rate), 0.0);
  shifted.insert(shifted.end(), tone.begin(), tone.end());

  auto a = syllabify_recording(make_recording(tone, rate), cfg);
  auto b = syllabify_recording(make_recording(shifted, rate), cfg);
  REQUIRE(!a.empty());
  REQUIRE(a.size() == b.size());
  std::vector<double> ba = boundaries(a);
  std::vector<double> bb = boundaries(b);
  // Interior boundaries move by exactly the shift, within one envelope
  // sample of slack; the outer boundaries are pinned to the recording edges.
  for (size_t i = 1; i + 1 < ba.size(); ++i) {
    CHECK(std::abs(bb[i] - (ba[i] + shift)) <= 1.0 / cfg.envelope_rate + 1e-9);
  }
}

TEST_CASE("detect_syllables is robust to gain") {
  OscillatorConfig cfg;
  const int rate = 8000;
  std::vector<double> tone = make_am_tone(500.0, 4.0, 2.0, rate);
  std::vector<double> loud = tone;
  for (auto& v : loud) v *= 2.0;
  auto a = syllabify_recording(make_recording(tone, rate), cfg);
  auto b = syllabify_recording(make_recording(loud, rate), cfg);
  CHECK(std::abs(long(a.size()) - long(b.size())) <= 1);
}
