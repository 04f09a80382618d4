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

#include "prosodid/types.hpp"

namespace prosodid {

/// Reads a RIFF PCM WAV file (8 or 16 bit, any channel count). Multi-channel
/// audio is averaged to mono; samples are scaled to [-1, 1]. The recording_id
/// is the file's basename without extension.
AudioRecording load_wav(const std::string& path);

/// Duration in seconds from the header alone, without decoding samples.
double wav_duration_seconds(const std::string& path);

/// Writes mono 16-bit PCM. Samples are clipped to [-1, 1].
void save_wav(const std::string& path, const std::vector<double>& samples, int sample_rate);

}  // namespace prosodid
