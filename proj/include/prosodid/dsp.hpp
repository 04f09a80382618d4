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

#include "prosodid/pitch.hpp"
#include "prosodid/types.hpp"

namespace prosodid {

/// Boll-style magnitude spectral subtraction parameters.
struct DenoiseConfig {
  double over_subtraction = 2.0;  // alpha
  double spectral_floor = 0.02;   // beta
  double noise_quantile = 0.1;    // fraction of lowest-energy frames in the profile
  double gate_factor = 2.0;       // frames below gate_factor * noise energy go to the floor
};

/// Magnitude spectral subtraction with the noise profile estimated from the
/// lowest-energy decile of frames. Output has the same length and rate as
/// the input. Requires at least one second of audio.
AudioRecording denoise(const AudioRecording& rec, const DenoiseConfig& cfg = {});

/// Scales so the peak absolute amplitude is 0.95. Silence is returned as is.
AudioRecording level_normalize(const AudioRecording& rec);

/// Windowed-sinc downsampling with the anti-alias cutoff at 0.45 * target.
/// Upsampling is out of contract and throws.
AudioRecording resample(const AudioRecording& rec, int target_rate = 8000);

/// Frame energy: for each frame center t (at hop intervals from sample 0),
/// the sum of |x(t+tau)|^2 over tau in [-w/2, w/2-1], edges zero-padded.
std::vector<double> frame_energy(const AudioRecording& rec, const FrameSpec& spec);

/// Spectral tilt per frame: Hamming window, power spectrum, mel filterbank
/// (unit-area filters over 0..sample_rate/2), floored log, DCT-II, C1.
std::vector<double> spectral_tilt(const AudioRecording& rec, const FrameSpec& spec,
                                  int n_mels = 26, int n_fft = 256);

/// The shared front end: denoise -> level normalize -> resample to the
/// analysis rate. Everything downstream (tracks and syllabification)
/// consumes this signal.
AudioRecording preprocess(const AudioRecording& rec, const FrameSpec& spec,
                          const DenoiseConfig& dn = {});

/// Energy, F0 and tilt on one shared frame grid, computed from audio that is
/// already at spec.sample_rate (see preprocess).
ProsodicTrack analyze_preprocessed(const AudioRecording& pre, const FrameSpec& spec,
                                   const PitchConfig& pitch = {});

/// preprocess + analyze_preprocessed in one call.
ProsodicTrack extract_tracks(const AudioRecording& rec, const FrameSpec& spec,
                             const PitchConfig& pitch = {}, const DenoiseConfig& dn = {});

/// CSV dump of a track: frame_time,energy,f0,voiced,tilt.
void save_track_csv(const std::string& path, const ProsodicTrack& track);
ProsodicTrack load_track_csv(const std::string& path, const std::string& recording_id);

}  // namespace prosodid
