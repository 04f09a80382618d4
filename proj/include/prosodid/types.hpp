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

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace prosodid {

/// A mono recording with linear amplitude in [-1, 1].
struct AudioRecording {
  std::vector<double> samples;
  int sample_rate = 0;
  std::string recording_id;
  std::string speaker_id;
  std::string dialect;

  double duration() const {
    return sample_rate > 0 ? double(samples.size()) / sample_rate : 0.0;
  }
};

enum class Tier { kWord, kSyllable };

inline const char* tier_name(Tier t) { return t == Tier::kWord ? "word" : "syllable"; }

inline Tier tier_from_string(const std::string& s) {
  if (s == "word") return Tier::kWord;
  if (s == "syllable") return Tier::kSyllable;
  throw std::runtime_error("unknown tier: '" + s + "'");
}

/// One annotated word or syllable. Times are seconds from recording start.
struct UnitSegment {
  double start = 0.0;
  double end = 0.0;
  Tier tier = Tier::kWord;
  std::string text;
  std::string recording_id;

  bool operator==(const UnitSegment& o) const {
    return start == o.start && end == o.end && tier == o.tier && text == o.text &&
           recording_id == o.recording_id;
  }
};

/// Frame geometry for all frame-level analyses.
struct FrameSpec {
  double window_len = 0.025;  // seconds
  double hop = 0.005;         // seconds
  int sample_rate = 8000;     // analysis rate, input is resampled to this

  int window_samples() const { return int(std::lround(window_len * sample_rate)); }
  int hop_samples() const { return int(std::lround(hop * sample_rate)); }

  void validate() const {
    if (sample_rate <= 0) throw std::runtime_error("frame spec: sample_rate must be > 0");
    if (!(hop > 0.0) || hop > window_len)
      throw std::runtime_error("frame spec: need 0 < hop <= window_len");
    if (window_samples() < 2) throw std::runtime_error("frame spec: window shorter than 2 samples");
    if (hop_samples() < 1) throw std::runtime_error("frame spec: hop shorter than 1 sample");
  }

  /// Number of frames for a signal of n samples: centers at 0, hop, 2*hop, ...
  size_t frame_count(size_t n) const {
    if (n == 0) return 0;
    return (n - 1) / size_t(hop_samples()) + 1;
  }
};

/// Per-frame streams, all the same length. For a raw track f0 is in Hz with
/// 0 on unvoiced frames; after normalization energy is log, f0 is semitones
/// re speaker median and tilt is z-scored.
struct ProsodicTrack {
  std::vector<double> frame_times;
  std::vector<double> energy;
  std::vector<double> f0;
  std::vector<uint8_t> voiced;
  std::vector<double> tilt;
  std::string recording_id;

  size_t size() const { return frame_times.size(); }

  void check_aligned() const {
    size_t n = frame_times.size();
    if (energy.size() != n || f0.size() != n || voiced.size() != n || tilt.size() != n)
      throw std::runtime_error("prosodic track streams have unequal lengths");
  }
};

/// Damped-oscillator syllabifier settings.
struct OscillatorConfig {
  double center_freq = 5.0;   // Hz
  double q_factor = 0.5;      // 0.5 = critical damping
  double envelope_rate = 1000.0;  // Hz

  void validate() const {
    if (!(center_freq > 0.0)) throw std::runtime_error("oscillator: center_freq must be > 0");
    if (!(q_factor > 0.0)) throw std::runtime_error("oscillator: q_factor must be > 0");
    if (!(envelope_rate > 0.0)) throw std::runtime_error("oscillator: envelope_rate must be > 0");
  }
};

/// Per-speaker normalization statistics, pooled over all of the speaker's
/// recordings.
struct SpeakerStats {
  std::string speaker_id;
  double f0_median = 0.0;  // Hz, over voiced frames
  double tilt_mean = 0.0;
  double tilt_std = 0.0;
};

enum class Feature : int { kEnergy = 0, kF0 = 1, kTilt = 2, kDuration = 3 };

inline const char* feature_name(Feature f) {
  switch (f) {
    case Feature::kEnergy: return "EN";
    case Feature::kF0: return "F0";
    case Feature::kTilt: return "ST";
    case Feature::kDuration: return "DUR";
  }
  return "?";
}

/// Non-empty subset of {EN, F0, ST, DUR}, stored as a bitmask.
struct FeatureCombo {
  unsigned mask = 0;

  bool has(Feature f) const { return (mask >> unsigned(f)) & 1u; }
  void add(Feature f) { mask |= 1u << unsigned(f); }
  bool empty() const { return mask == 0; }

  std::string name() const {
    std::string out;
    for (Feature f : {Feature::kEnergy, Feature::kF0, Feature::kTilt, Feature::kDuration}) {
      if (has(f)) {
        if (!out.empty()) out += "+";
        out += feature_name(f);
      }
    }
    return out;
  }

  static FeatureCombo parse(const std::string& s);
  /// All 15 non-empty subsets, in mask order.
  static std::vector<FeatureCombo> all();

  bool operator==(const FeatureCombo& o) const { return mask == o.mask; }
};

/// Names one slot of a descriptor vector, e.g. ("EN", "mean").
struct LayoutEntry {
  Feature feature;
  std::string descriptor;
};

using Layout = std::vector<LayoutEntry>;

/// Builds the declared layout for a combo: features in EN, F0, ST, DUR order,
/// five descriptors (mean, std, min, max, range) each, duration a single slot.
Layout make_layout(FeatureCombo combo);

/// The normalized statistical descriptors of one unit. Fully-unvoiced units
/// keep their F0 slots (as zeros) so dimensionality is fixed; the condition
/// is flagged here instead of inside the vector.
struct DescriptorVector {
  UnitSegment unit;
  std::vector<double> values;
  std::shared_ptr<const Layout> layout;
  std::string dialect;
  bool f0_missing = false;
};

}  // namespace prosodid
