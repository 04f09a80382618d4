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

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "prosodid/common.hpp"
#include "prosodid/types.hpp"

namespace testutil {

// Scratch directory that cleans up after itself.  Each instance gets a
// unique path so tests can run in parallel.
class TempDir {
 public:
  TempDir() {
    static std::atomic<uint64_t> counter{0};
    const uint64_t id = counter.fetch_add(1);
    path_ = std::filesystem::temp_directory_path() /
            ("prosodid_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(id));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::vector<double> make_sine(double freq_hz, double dur_sec,
                                     int sample_rate, double amp = 0.5,
                                     double phase = 0.0) {
  const size_t n = static_cast<size_t>(std::llround(dur_sec * sample_rate));
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) {
    out[i] = amp * std::sin(2.0 * M_PI * freq_hz * static_cast<double>(i) /
                                sample_rate +
                            phase);
  }
  return out;
}

// Carrier tone with sinusoidal amplitude modulation; the envelope dips to
// (1 - depth) and peaks at (1 + depth) around the carrier amplitude.
inline std::vector<double> make_am_tone(double carrier_hz, double mod_hz,
                                        double dur_sec, int sample_rate,
                                        double amp = 0.4, double depth = 1.0) {
  const size_t n = static_cast<size_t>(std::llround(dur_sec * sample_rate));
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double env =
        0.5 * (1.0 + depth * std::sin(2.0 * M_PI * mod_hz * t - M_PI / 2.0));
    out[i] = amp * env * std::sin(2.0 * M_PI * carrier_hz * t);
  }
  return out;
}

// Crude vowel-like signal: glottal pulse train shaped by a decaying
// exponential per period, which has a rich harmonic spectrum and a
// well-defined F0.  Good enough to exercise the pitch tracker.
inline std::vector<double> make_vowel(double f0_hz, double dur_sec,
                                      int sample_rate, double amp = 0.4) {
  const size_t n = static_cast<size_t>(std::llround(dur_sec * sample_rate));
  std::vector<double> out(n, 0.0);
  const double period = sample_rate / f0_hz;
  for (size_t i = 0; i < n; ++i) {
    const double pos = std::fmod(static_cast<double>(i), period) / period;
    // Sawtooth-ish pulse with a soft decay: strong harmonics, no clicks.
    out[i] = amp * (std::exp(-3.0 * pos) * std::sin(2.0 * M_PI * 2.0 * pos) +
                    0.3 * std::sin(2.0 * M_PI * pos));
  }
  return out;
}

inline std::vector<double> white_noise(size_t n, uint64_t seed,
                                       double amp = 0.3) {
  prosodid::Rng rng(seed);
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = amp * (2.0 * rng.uniform() - 1.0);
  return out;
}

inline prosodid::AudioRecording make_recording(std::vector<double> samples,
                                               int sample_rate,
                                               std::string id = "test") {
  prosodid::AudioRecording rec;
  rec.recording_id = std::move(id);
  rec.sample_rate = sample_rate;
  rec.samples = std::move(samples);
  return rec;
}

inline double rms(const std::vector<double>& x, size_t begin = 0,
                  size_t end = SIZE_MAX) {
  if (end > x.size()) end = x.size();
  if (begin >= end) return 0.0;
  double acc = 0.0;
  for (size_t i = begin; i < end; ++i) acc += x[i] * x[i];
  return std::sqrt(acc / static_cast<double>(end - begin));
}

inline double max_abs(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

inline double rel_err(double got, double want) {
  const double denom = std::max(std::abs(want), 1e-12);
  return std::abs(got - want) / denom;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::string out;
  FILE* f = std::fopen(p.string().c_str(), "rb");
  if (!f) return out;
  char buf[4096];
  size_t got;
  while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0) out.append(buf, got);
  std::fclose(f);
  return out;
}

inline void write_file(const std::filesystem::path& p, const std::string& s) {
  std::filesystem::create_directories(p.parent_path());
  FILE* f = std::fopen(p.string().c_str(), "wb");
  if (!f) return;
  std::fwrite(s.data(), 1, s.size(), f);
  std::fclose(f);
}

}  // namespace testutil
