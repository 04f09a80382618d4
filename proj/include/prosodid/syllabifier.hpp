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

/// Amplitude envelope: full-wave rectify, second-order Butterworth low-pass
/// at 30 Hz, then decimate to cfg.envelope_rate samples per second.
std::vector<double> compute_envelope(const AudioRecording& rec, const OscillatorConfig& cfg = {});

/// Drives the damped oscillator x'' + (omega/Q) x' + omega^2 x = k e(t) with
/// k = omega^2 (unit DC gain) by semi-implicit Euler at the envelope rate.
/// Returns the displacement trace, same length as the envelope.
std::vector<double> oscillate(const std::vector<double>& envelope,
                              const OscillatorConfig& cfg = {});

/// Syllable nuclei are displacement maxima; boundaries sit at the deepest
/// minima between successive maxima. Segments shorter than min_dur are merged
/// with the neighbor across the weaker (shallower) boundary. No maxima means
/// no syllables. Segments tile [0, len/envelope_rate) on the syllable tier.
std::vector<UnitSegment> detect_syllables(const std::vector<double>& displacement,
                                          const OscillatorConfig& cfg = {},
                                          double min_dur = 0.05);

/// envelope -> oscillator -> boundary detection in one call; fills in the
/// recording id on the returned segments.
std::vector<UnitSegment> syllabify_recording(const AudioRecording& rec,
                                             const OscillatorConfig& cfg = {},
                                             double min_dur = 0.05);

}  // namespace prosodid
