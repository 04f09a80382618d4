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

#include <map>
#include <string>
#include <vector>

namespace prosodid {

struct RecordingRef {
  std::string recording_id;
  std::string wav_path;
  std::string annotation_path;
  std::string speaker_id;
  std::string dialect;
  double duration_sec = 0.0;
};

/// Inventory of a corpus directory: recordings, speaker->dialect map and
/// per-dialect duration totals in minutes.
struct CorpusManifest {
  std::vector<RecordingRef> recordings;       // sorted by recording_id
  std::map<std::string, std::string> speakers;  // speaker_id -> dialect
  std::map<std::string, double> totals_min;     // dialect -> minutes

  /// Dialect labels in sorted order; their positions are the class indices.
  std::vector<std::string> dialects() const;
  int dialect_index(const std::string& dialect) const;

  /// Total duration in seconds of one speaker's recordings.
  double speaker_duration(const std::string& speaker_id) const;

  std::string to_json() const;
  static CorpusManifest from_json(const std::string& text);
  void save(const std::string& path) const;
  static CorpusManifest load(const std::string& path);
};

/// Scans a corpus directory: every "<id>.wav" with its "<id>.tsv" annotation
/// file, plus a "speakers.tsv" metadata file with lines
///   speaker_id<TAB>dialect<TAB>recording_id
/// Durations come from the WAV headers.
CorpusManifest build_manifest(const std::string& root);

}  // namespace prosodid
