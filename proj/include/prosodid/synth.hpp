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
#include <vector>

namespace prosodid {

/// Prosodic control parameters of one synthetic dialect. The F0 base is
/// removed downstream by per-speaker median normalization, so the separating
/// signal lives in the range, depth, tilt dynamics, and rate parameters.
struct DialectParams {
  std::string name;
  double f0_base = 140.0;        // Hz
  double f0_range_st = 4.0;      // peak-to-peak slow F0 movement, semitones
  double energy_mod_depth = 0.6; // syllable AM depth in [0, 1)
  double tilt_offset = 0.0;      // shifts the pre-emphasis setting
  double tilt_dynamics = 0.5;    // 0 = tilt alternates across syllables,
                                 // 1 = tilt sweeps within each syllable
  double syllable_rate = 4.0;    // Hz

  void validate() const;
};

struct SynthConfig {
  std::vector<DialectParams> dialects;  // default: separated_dialects()
  int speakers_per_dialect = 4;
  int recordings_per_speaker = 3;
  double recording_duration = 10.0;  // seconds
  int sample_rate = 16000;

  /// Five well-separated rows (>= 4 semitone F0 base gaps).
  static std::vector<DialectParams> separated_dialects();
  /// Five identical rows: no dialect signal at all.
  static std::vector<DialectParams> null_dialects();

  void validate() const;
};

/// Writes a complete corpus directory (WAVs, per-recording annotation TSVs
/// with word and syllable tiers, speakers.tsv) deterministically from the
/// seed. Returns the recording count.
size_t generate_synthetic_corpus(const std::string& root, const SynthConfig& config,
                                 uint64_t seed);

}  // namespace prosodid
