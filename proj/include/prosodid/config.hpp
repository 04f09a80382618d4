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

#include "prosodid/classifiers.hpp"
#include "prosodid/dsp.hpp"
#include "prosodid/pitch.hpp"
#include "prosodid/synth.hpp"
#include "prosodid/types.hpp"

namespace prosodid {

/// One experiment manifest: corpus location, grid axes, DSP settings and
/// classifier hyperparameters. Defaults are the toolkit's reference values;
/// a config file overrides fields selectively and unknown keys are rejected.
struct ExperimentConfig {
  std::string corpus_root;
  std::string output_dir = "out";
  std::string cache_dir;  // empty = <output_dir>/cache

  std::vector<std::string> tiers = {"word", "syllable"};
  std::vector<std::string> combos = {"all"};  // "all" or explicit combo names
  std::vector<std::string> contexts = {"off", "on"};
  std::vector<std::string> classifiers = {"knn", "svm", "rf", "crf", "lstm"};

  int folds = 4;
  int repeats = 5;
  uint64_t seed = 1;
  int workers = 0;  // 0 = hardware concurrency
  int context_width = 2;
  double min_syllable_dur = 0.05;

  FrameSpec frame;
  OscillatorConfig oscillator;
  PitchConfig pitch;
  DenoiseConfig denoise;
  TrainParams train;

  SynthConfig synth;
  std::string synth_preset = "separated";  // or "null"

  /// Expands "all" and validates names.
  std::vector<FeatureCombo> combo_list() const;
  std::vector<bool> context_list() const;
  std::vector<Tier> tier_list() const;
  std::vector<ModelKind> classifier_list() const;
  std::string resolved_cache_dir() const;
  SynthConfig resolved_synth() const;  // applies the preset unless rows are explicit

  void validate() const;

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  void save(const std::string& path) const;
  static ExperimentConfig load(const std::string& path);
};

}  // namespace prosodid
