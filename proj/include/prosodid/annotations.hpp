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

/// True for labels that mark pauses rather than speech ("<p>", "sil", empty).
bool is_pause_label(const std::string& label);

/// Parses the tab-separated annotation format
///   start_sec<TAB>end_sec<TAB>tier<TAB>label
/// returning the requested tier's units in time order with pauses removed.
/// Lines starting with '#' and blank lines are ignored. Units of the
/// requested tier must be non-overlapping and have end > start.
std::vector<UnitSegment> parse_annotations(const std::string& path, Tier tier,
                                           const std::string& recording_id = "");

/// Writes units in the same format, one per line, times in shortest
/// round-trip decimal form so that parsing the file reproduces the input.
void write_annotations(const std::string& path, const std::vector<UnitSegment>& units);

}  // namespace prosodid
