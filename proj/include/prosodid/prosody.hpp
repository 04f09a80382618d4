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

#include <string>
#include <vector>

#include "prosodid/types.hpp"

namespace prosodid {

/// Normalization statistics pooled over all of one speaker's tracks:
/// F0 median over voiced frames, tilt mean/std over all frames.
/// Throws when the speaker has no voiced frame at all.
SpeakerStats speaker_stats(const std::vector<const ProsodicTrack*>& tracks,
                           const std::string& speaker_id);

/// Semitones relative to the speaker median: 12 * log2(f0 / median).
/// Throws on a non-positive (unvoiced) f0.
double normalize_f0(double f0, const SpeakerStats& stats);

/// Per-speaker normalization at the frame level: energy -> log (floored),
/// F0 -> semitones on voiced frames (0 on unvoiced, flag preserved),
/// tilt -> z-score.
ProsodicTrack normalize_tracks(const ProsodicTrack& track, const SpeakerStats& stats);

/// Five descriptors (mean, population std, min, max, range) per selected
/// frame feature over the frames whose centers fall in [start, end), in the
/// fixed EN, F0, ST, DUR layout order; duration is the single slot
/// log(end - start). F0 descriptors use voiced frames only; a fully-unvoiced
/// unit gets an all-zero F0 block and the f0_missing flag.
/// Throws when the unit covers no frame centers.
DescriptorVector unit_descriptors(const ProsodicTrack& track, const UnitSegment& unit,
                                  FeatureCombo combo,
                                  const std::shared_ptr<const Layout>& layout,
                                  const std::string& dialect);

/// Concatenates [v_{i-2}, v_{i-1}, v_i, v_{i+1}, v_{i+2}] per unit within one
/// recording; positions beyond the edges are zero blocks. Output dimension is
/// (2 * width + 1) times the input dimension.
std::vector<DescriptorVector> stack_context(const std::vector<DescriptorVector>& vectors,
                                            int width = 2);

/// One row per unit: recording_id, unit index, start, end, dialect, then the
/// descriptor values in layout order.
void export_feature_matrix(const std::string& path,
                           const std::vector<DescriptorVector>& vectors);

}  // namespace prosodid
