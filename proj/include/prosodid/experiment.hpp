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
#include <functional>
#include <string>
#include <vector>

#include "prosodid/classifiers.hpp"
#include "prosodid/config.hpp"
#include "prosodid/folds.hpp"
#include "prosodid/manifest.hpp"
#include "prosodid/metrics.hpp"
#include "prosodid/types.hpp"

namespace prosodid {

// ---------------------------------------------------------------------------
// Feature cache
//
// Tracks, detected syllable tiers and per-tier descriptor matrices are cached
// on disk, keyed by (recording, hash of the settings that influence them).
// Writes go to a temp file and are renamed into place, so concurrent readers
// and writers are safe.
// ---------------------------------------------------------------------------

struct CacheSettings {
  std::string dir;
  FrameSpec frame;
  PitchConfig pitch;
  DenoiseConfig denoise;
  OscillatorConfig oscillator;
  double min_syllable_dur = 0.05;

  static CacheSettings from_config(const ExperimentConfig& config);
};

/// Hash tag for the track cache (frame grid + pitch + denoise settings).
std::string track_cache_tag(const CacheSettings& s);
/// Hash tag for the detected-syllable cache (track tag + oscillator settings).
std::string syllable_cache_tag(const CacheSettings& s);
/// Hash tag for one recording's descriptor matrix on one tier. Includes the
/// speaker's recording set because the per-speaker normalization pools over it.
std::string descriptor_cache_tag(const CacheSettings& s, Tier tier,
                                 const std::string& speaker_id,
                                 const std::vector<std::string>& speaker_recordings);

/// Writes content to path via a temp file + rename. Creates parent dirs.
void atomic_write_file(const std::string& path, const std::string& content);

// ---------------------------------------------------------------------------
// Feature assembly
// ---------------------------------------------------------------------------

/// All of one recording's units on one tier, as full descriptor vectors
/// (EN+F0+ST+DUR, unstacked). Grid cells subset columns and stack context
/// from these without touching audio again.
struct RecordingUnits {
  std::string recording_id;
  std::string speaker_id;
  int dialect = 0;  // class index in CorpusManifest::dialects()
  std::vector<DescriptorVector> vectors;
};

struct TierFeatures {
  Tier tier = Tier::kWord;
  std::vector<RecordingUnits> recordings;  // manifest order
};

struct FeatureBundle {
  std::vector<std::string> dialects;
  std::vector<TierFeatures> tiers;

  const TierFeatures& tier(Tier t) const;
};

/// Per-recording outcome of feature building: whether every cached artifact
/// was reusable and, on failure, why extraction failed.
struct BuildItem {
  std::string recording_id;
  bool cached = false;
  std::string error;
};

struct BuildReport {
  std::vector<BuildItem> items;  // manifest order
  size_t cache_hits() const;
  size_t failures() const;
};

/// Loads or computes tracks, detected syllable tiers and descriptor matrices
/// for every recording in the manifest, on the requested tiers. Recordings
/// that fail are reported and skipped; everything else proceeds. The tier
/// "syllable" uses annotated syllables when the annotation file has any, and
/// the detected tier otherwise. `workers` caps extraction parallelism
/// (0 = hardware concurrency); `progress` (if set) is called once per
/// recording as its extraction finishes.
FeatureBundle build_features(const CorpusManifest& manifest, const std::vector<Tier>& tiers,
                             const CacheSettings& cache, int workers = 0,
                             BuildReport* report = nullptr,
                             const std::function<void(const BuildItem&)>& progress = {});

// ---------------------------------------------------------------------------
// Experiment grid
// ---------------------------------------------------------------------------

struct CellKey {
  Tier tier = Tier::kWord;
  FeatureCombo combo;
  bool context = false;
  ModelKind classifier = ModelKind::kMajority;

  std::string name() const;  // "word/EN+F0/ctx=on/crf"
};

struct SplitResult {
  int repeat = 0;
  int fold = 0;
  ConfusionMatrix cm;
  double uar = 0.0;
  double accuracy = 0.0;
  std::vector<int> excluded_classes;  // classes with no reference units in this split
};

struct CellResult {
  CellKey key;
  std::vector<SplitResult> splits;  // repeat-major, fold-minor
  ConfusionMatrix pooled;           // counts summed over splits
  double mean_uar = 0.0;            // mean over folds within repeat, then over repeats
  double mean_accuracy = 0.0;
  std::string error;                // nonempty when the cell failed

  bool ok() const { return error.empty(); }
};

struct EvalReport {
  std::vector<std::string> dialects;
  int folds = 0;
  int repeats = 0;
  uint64_t seed = 0;
  std::vector<CellResult> cells;  // tier-major, then combo, context, classifier

  bool any_error() const;
};

/// One grid cell: trains and scores every (repeat, fold) split. Train folds
/// are the plan's other k-1 groups; speaker-disjointness is re-asserted on
/// the actual unit sets before any training. Deterministic in seed.
CellResult run_experiment(const CorpusManifest& manifest, const FoldPlan& plan,
                          const FeatureBundle& features, const CellKey& key,
                          const TrainParams& params, int context_width, uint64_t seed);

/// The full grid from the config's tier/combo/context/classifier lists.
/// Cells run as independent jobs on a worker pool; results are collected in
/// grid order, so the report does not depend on scheduling.
EvalReport sweep(const CorpusManifest& manifest, const FoldPlan& plan,
                 const FeatureBundle& features, const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

/// One row per cell per split plus one aggregate row per cell
/// (repeat = fold = -1). Byte-identical for identical reports.
std::string render_results_csv(const EvalReport& report);

/// Pooled confusion matrix per cell as CSV blocks.
std::string render_confusions_csv(const EvalReport& report);

/// Human-readable summary: grid shape, errors, best combo per classifier and
/// best cell overall by aggregate UAR (ties break in grid order).
std::string render_summary(const EvalReport& report);

/// results.csv, confusions.csv and summary.txt under out_dir.
void write_report_files(const EvalReport& report, const std::string& out_dir);

/// Rebuilds a report skeleton (aggregates only, no confusion counts) from a
/// results.csv, enough to re-render the summary.
EvalReport load_results_csv(const std::string& path);

}  // namespace prosodid
