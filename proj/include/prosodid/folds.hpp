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
#include <map>
#include <set>
#include <string>
#include <vector>

#include "prosodid/manifest.hpp"

namespace prosodid {

/// Speaker groups per dialect for every repeat of the k-fold protocol.
/// Group g of repeat r forms the test set of split (r, g); the remaining
/// groups train. Speakers never cross groups within a repeat, so every
/// split is speaker-disjoint by construction.
struct FoldPlan {
  int k = 4;
  int repeats = 5;
  uint64_t seed = 0;
  // assignments[repeat][dialect] -> k groups of speaker ids
  std::vector<std::map<std::string, std::vector<std::vector<std::string>>>> assignments;
  std::vector<std::string> warnings;  // e.g. dialects with fewer speakers than k

  std::set<std::string> test_speakers(int repeat, int fold) const;
  std::set<std::string> train_speakers(int repeat, int fold) const;

  /// Throws if any group overlaps or any speaker is missing from its dialect.
  void validate(const CorpusManifest& manifest) const;
};

/// Greedy longest-duration-first assignment of each dialect's speakers into
/// k groups of approximately equal total duration. Ties (equal durations,
/// equally loaded groups) are broken randomly from a per-repeat stream, so
/// each repeat yields its own assignment while staying deterministic in the
/// seed. Dialects with fewer than k speakers get empty groups and a warning.
FoldPlan split_folds(const CorpusManifest& manifest, int k = 4, int repeats = 5,
                     uint64_t seed = 0);

/// max(group durations) - min(group durations) for one dialect's groups.
double group_duration_spread(const CorpusManifest& manifest,
                             const std::vector<std::vector<std::string>>& groups);

}  // namespace prosodid
