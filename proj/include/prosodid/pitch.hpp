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

#include <vector>

#include "prosodid/types.hpp"

namespace prosodid {

/// NCCF candidate generation with a dynamic-programming path through the
/// candidates. Continuity is enforced by an octave-jump penalty.
struct PitchConfig {
  double f0_min = 60.0;
  double f0_max = 400.0;
  double corr_window = 0.02;      // seconds of signal correlated per lag
  double voicing_threshold = 0.3; // NCCF peak below this prefers unvoiced
  double octave_penalty = 0.35;   // lambda * |log2(f_t / f_{t-1})|
  double vuv_penalty = 0.2;       // voiced <-> unvoiced switch cost
  double lag_bias = 0.02;         // favors shorter lags to suppress subharmonics
  int max_candidates = 5;
};

struct PitchResult {
  std::vector<double> f0;        // Hz, 0 on unvoiced frames
  std::vector<uint8_t> voiced;
};

/// F0 per frame of the analysis grid. Voiced frames carry F0 in
/// [f0_min, f0_max]; unvoiced frames carry 0.
PitchResult track_f0(const AudioRecording& rec, const FrameSpec& spec,
                     const PitchConfig& cfg = {});

}  // namespace prosodid
