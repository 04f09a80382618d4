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

#include "prosodid/folds.hpp"

#include <algorithm>
#include <stdexcept>

#include "prosodid/common.hpp"

namespace prosodid {

std::set<std::string> FoldPlan::test_speakers(int repeat, int fold) const {
  if (repeat < 0 || repeat >= repeats || fold < 0 || fold >= k)
    throw std::out_of_range("fold plan: split index out of range");
  std::set<std::string> out;
  for (const auto& [dialect, groups] : assignments[size_t(repeat)])
    for (const auto& spk : groups[size_t(fold)]) out.insert(spk);
  return out;
}

std::set<std::string> FoldPlan::train_speakers(int repeat, int fold) const {
  std::set<std::string> test = test_speakers(repeat, fold);
  std::set<std::string> out;
  for (const auto& [dialect, groups] : assignments[size_t(repeat)])
    for (const auto& group : groups)
      for (const auto& spk : group)
        if (!test.count(spk)) out.insert(spk);
  return out;
}

void FoldPlan::validate(const CorpusManifest& manifest) const {
  if (int(assignments.size()) != repeats)
    throw std::runtime_error("fold plan: repeat count mismatch");
  // speakers per dialect from the manifest
  std::map<std::string, std::set<std::string>> by_dialect;
  for (const auto& [spk, dia] : manifest.speakers) by_dialect[dia].insert(spk);

  for (const auto& repeat_assign : assignments) {
    for (const auto& [dialect, groups] : repeat_assign) {
      if (int(groups.size()) != k) throw std::runtime_error("fold plan: group count mismatch");
      std::set<std::string> seen;
      for (const auto& group : groups)
        for (const auto& spk : group)
          if (!seen.insert(spk).second)
            throw std::runtime_error("fold plan: speaker '" + spk + "' in two groups");
      if (seen != by_dialect.at(dialect))
        throw std::runtime_error("fold plan: groups of dialect '" + dialect +
                                 "' do not cover its speakers");
    }
  }
}

double group_duration_spread(const CorpusManifest& manifest,
                             const std::vector<std::vector<std::string>>& groups) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& group : groups) {
    double total = 0.0;
    for (const auto& spk : group) total += manifest.speaker_duration(spk);
    if (first) {
      lo = hi = total;
      first = false;
    } else {
      lo = std::min(lo, total);
      hi = std::max(hi, total);
    }
  }
  return hi - lo;
}

FoldPlan split_folds(const CorpusManifest& manifest, int k, int repeats, uint64_t seed) {
  if (k < 2) throw std::runtime_error("split_folds: k must be >= 2");
  if (repeats < 1) throw std::runtime_error("split_folds: repeats must be >= 1");

  std::map<std::string, std::vector<std::string>> by_dialect;
  for (const auto& [spk, dia] : manifest.speakers) by_dialect[dia].push_back(spk);

  FoldPlan plan;
  plan.k = k;
  plan.repeats = repeats;
  plan.seed = seed;

  for (const auto& [dialect, speakers] : by_dialect)
    if (int(speakers.size()) < k)
      plan.warnings.push_back("dialect '" + dialect + "' has " +
                              std::to_string(speakers.size()) + " speakers for " +
                              std::to_string(k) + " folds; some groups will be empty");

  for (int r = 0; r < repeats; ++r) {
    Rng rng(mix_seed(seed, uint64_t(r)));
    std::map<std::string, std::vector<std::vector<std::string>>> assign;
    for (const auto& [dialect, speakers_in] : by_dialect) {
      std::vector<std::string> speakers = speakers_in;
      std::sort(speakers.begin(), speakers.end());
      // shuffle first so that equal-duration speakers land in a per-repeat
      // order, then stable-sort by duration: longest first
      rng.shuffle(speakers);
      std::stable_sort(speakers.begin(), speakers.end(),
                       [&manifest](const std::string& a, const std::string& b) {
                         return manifest.speaker_duration(a) > manifest.speaker_duration(b);
                       });

      std::vector<std::vector<std::string>> groups(static_cast<size_t>(k));
      std::vector<double> load(size_t(k), 0.0);
      for (const auto& spk : speakers) {
        double best = *std::min_element(load.begin(), load.end());
        std::vector<size_t> candidates;
        for (size_t g = 0; g < load.size(); ++g)
          if (load[g] == best) candidates.push_back(g);
        size_t pick = candidates[size_t(rng.uniform_int(candidates.size()))];
        groups[pick].push_back(spk);
        load[pick] += manifest.speaker_duration(spk);
      }
      for (auto& g : groups) std::sort(g.begin(), g.end());
      assign[dialect] = std::move(groups);
    }
    plan.assignments.push_back(std::move(assign));
  }

  plan.validate(manifest);
  return plan;
}

}  // namespace prosodid
