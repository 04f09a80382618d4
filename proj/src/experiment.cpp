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

#include "prosodid/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <unistd.h>

#include "prosodid/annotations.hpp"
#include "prosodid/common.hpp"
#include "prosodid/dsp.hpp"
#include "prosodid/prosody.hpp"
#include "prosodid/syllabifier.hpp"
#include "prosodid/wav.hpp"

namespace prosodid {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Cache keys and atomic writes
// ---------------------------------------------------------------------------

namespace {

std::string track_settings_string(const CacheSettings& s) {
  std::ostringstream ss;
  ss << "frame:" << format_double(s.frame.window_len) << ',' << format_double(s.frame.hop)
     << ',' << s.frame.sample_rate;
  ss << "|pitch:" << format_double(s.pitch.f0_min) << ',' << format_double(s.pitch.f0_max)
     << ',' << format_double(s.pitch.corr_window) << ','
     << format_double(s.pitch.voicing_threshold) << ',' << format_double(s.pitch.octave_penalty)
     << ',' << format_double(s.pitch.vuv_penalty) << ',' << format_double(s.pitch.lag_bias)
     << ',' << s.pitch.max_candidates;
  ss << "|denoise:" << format_double(s.denoise.over_subtraction) << ','
     << format_double(s.denoise.spectral_floor) << ',' << format_double(s.denoise.noise_quantile)
     << ',' << format_double(s.denoise.gate_factor);
  return ss.str();
}

std::string syllable_settings_string(const CacheSettings& s) {
  std::ostringstream ss;
  ss << track_settings_string(s) << "|osc:" << format_double(s.oscillator.center_freq) << ','
     << format_double(s.oscillator.q_factor) << ',' << format_double(s.oscillator.envelope_rate)
     << "|mindur:" << format_double(s.min_syllable_dur);
  return ss.str();
}

std::string unique_tmp_path(const std::string& path) {
  static std::atomic<uint64_t> counter{0};
  std::ostringstream ss;
  ss << path << ".tmp." << ::getpid() << '.' << counter.fetch_add(1);
  return ss.str();
}

void commit_tmp(const std::string& tmp, const std::string& path) {
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    throw std::runtime_error("cache: rename to " + path + " failed: " + ec.message());
  }
}

void ensure_parent_dir(const std::string& path) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

}  // namespace

CacheSettings CacheSettings::from_config(const ExperimentConfig& config) {
  CacheSettings s;
  s.dir = config.resolved_cache_dir();
  s.frame = config.frame;
  s.pitch = config.pitch;
  s.denoise = config.denoise;
  s.oscillator = config.oscillator;
  s.min_syllable_dur = config.min_syllable_dur;
  return s;
}

std::string track_cache_tag(const CacheSettings& s) {
  return hex64(fnv1a(track_settings_string(s)));
}

std::string syllable_cache_tag(const CacheSettings& s) {
  return hex64(fnv1a(syllable_settings_string(s)));
}

std::string descriptor_cache_tag(const CacheSettings& s, Tier tier,
                                 const std::string& speaker_id,
                                 const std::vector<std::string>& speaker_recordings) {
  std::ostringstream ss;
  ss << syllable_settings_string(s) << "|tier:" << tier_name(tier) << "|speaker:" << speaker_id
     << "|recs:";
  for (const auto& r : speaker_recordings) ss << r << ';';
  return hex64(fnv1a(ss.str()));
}

void atomic_write_file(const std::string& path, const std::string& content) {
  ensure_parent_dir(path);
  std::string tmp = unique_tmp_path(path);
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cache: cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignore;
      fs::remove(tmp, ignore);
      throw std::runtime_error("cache: write to " + tmp + " failed");
    }
  }
  commit_tmp(tmp, path);
}

// ---------------------------------------------------------------------------
// Descriptor matrix cache format (TSV: cache-internal, labels never contain
// tabs because the annotation format is itself tab-separated)
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kDescMagic = "prosodid-descriptors";
constexpr int kDescVersion = 1;

std::string descriptor_tsv_string(const std::vector<DescriptorVector>& vectors,
                                  size_t n_values) {
  std::ostringstream out;
  out << kDescMagic << '\t' << kDescVersion << '\t' << n_values << '\n';
  for (size_t i = 0; i < vectors.size(); ++i) {
    const DescriptorVector& v = vectors[i];
    if (v.values.size() != n_values)
      throw std::runtime_error("descriptor cache: vector dimension mismatch");
    out << i << '\t' << tier_name(v.unit.tier) << '\t' << v.unit.text << '\t'
        << format_double(v.unit.start) << '\t' << format_double(v.unit.end) << '\t'
        << (v.f0_missing ? 1 : 0);
    for (double x : v.values) out << '\t' << format_double(x);
    out << '\n';
  }
  return out.str();
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t pos = 0;
  for (;;) {
    size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return fields;
}

std::vector<DescriptorVector> load_descriptor_tsv(const std::string& path,
                                                  const std::string& recording_id,
                                                  const std::shared_ptr<const Layout>& layout) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("descriptor cache: cannot read " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("descriptor cache: empty file " + path);
  auto head = split_tabs(line);
  if (head.size() != 3 || head[0] != kDescMagic ||
      head[1] != std::to_string(kDescVersion) ||
      head[2] != std::to_string(layout->size())) {
    throw std::runtime_error("descriptor cache: bad header in " + path);
  }
  const size_t n_values = layout->size();
  std::vector<DescriptorVector> out;
  size_t expect_idx = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_tabs(line);
    if (f.size() != 6 + n_values)
      throw std::runtime_error("descriptor cache: bad row in " + path);
    if (f[0] != std::to_string(expect_idx))
      throw std::runtime_error("descriptor cache: rows out of order in " + path);
    ++expect_idx;
    DescriptorVector v;
    v.unit.tier = tier_from_string(f[1]);
    v.unit.text = f[2];
    v.unit.start = parse_double(f[3]);
    v.unit.end = parse_double(f[4]);
    v.unit.recording_id = recording_id;
    v.f0_missing = f[5] == "1";
    v.layout = layout;
    v.values.reserve(n_values);
    for (size_t i = 0; i < n_values; ++i) v.values.push_back(parse_double(f[6 + i]));
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Feature assembly
// ---------------------------------------------------------------------------

const TierFeatures& FeatureBundle::tier(Tier t) const {
  for (const auto& tf : tiers)
    if (tf.tier == t) return tf;
  throw std::runtime_error(std::string("feature bundle has no tier '") + tier_name(t) + "'");
}

size_t BuildReport::cache_hits() const {
  size_t n = 0;
  for (const auto& item : items)
    if (item.error.empty() && item.cached) ++n;
  return n;
}

size_t BuildReport::failures() const {
  size_t n = 0;
  for (const auto& item : items)
    if (!item.error.empty()) ++n;
  return n;
}

namespace {

struct RecordingArtifacts {
  ProsodicTrack track;
  std::vector<UnitSegment> detected;  // syllable tier from the oscillator
  bool track_hit = false;
  bool syl_hit = false;
  std::string error;
};

FeatureCombo full_combo() {
  FeatureCombo c;
  c.add(Feature::kEnergy);
  c.add(Feature::kF0);
  c.add(Feature::kTilt);
  c.add(Feature::kDuration);
  return c;
}

}  // namespace

FeatureBundle build_features(const CorpusManifest& manifest, const std::vector<Tier>& tiers,
                             const CacheSettings& cache, int workers, BuildReport* report,
                             const std::function<void(const BuildItem&)>& progress) {
  const size_t n = manifest.recordings.size();
  const auto dialects = manifest.dialects();
  std::vector<RecordingArtifacts> arts(n);

  const std::string ttag = track_cache_tag(cache);
  const std::string stag = syllable_cache_tag(cache);

  // Phase 1: per-recording tracks and detected syllables, cache-first. This
  // is the expensive part, so it runs on a worker pool.
  std::atomic<size_t> next{0};
  std::mutex progress_mu;
  auto work = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      const RecordingRef& ref = manifest.recordings[i];
      RecordingArtifacts& a = arts[i];
      try {
        const std::string tpath =
            cache.dir + "/tracks/" + ref.recording_id + "." + ttag + ".csv";
        const std::string spath =
            cache.dir + "/syllables/" + ref.recording_id + "." + stag + ".tsv";
        if (fs::exists(tpath)) {
          try {
            a.track = load_track_csv(tpath, ref.recording_id);
            a.track_hit = true;
          } catch (const std::exception&) {
            a.track_hit = false;  // unreadable cache entry: recompute below
          }
        }
        if (fs::exists(spath)) {
          try {
            a.detected = parse_annotations(spath, Tier::kSyllable, ref.recording_id);
            a.syl_hit = true;
          } catch (const std::exception&) {
            a.syl_hit = false;
          }
        }
        if (!a.track_hit || !a.syl_hit) {
          AudioRecording raw = load_wav(ref.wav_path);
          raw.recording_id = ref.recording_id;
          AudioRecording pre = preprocess(raw, cache.frame, cache.denoise);
          if (!a.track_hit) {
            a.track = analyze_preprocessed(pre, cache.frame, cache.pitch);
            ensure_parent_dir(tpath);
            std::string tmp = unique_tmp_path(tpath);
            save_track_csv(tmp, a.track);
            commit_tmp(tmp, tpath);
          }
          if (!a.syl_hit) {
            a.detected = syllabify_recording(pre, cache.oscillator, cache.min_syllable_dur);
            ensure_parent_dir(spath);
            std::string tmp = unique_tmp_path(spath);
            write_annotations(tmp, a.detected);
            commit_tmp(tmp, spath);
          }
        }
      } catch (const std::exception& e) {
        a.error = e.what();
      }
      if (progress) {
        BuildItem item{ref.recording_id, a.track_hit && a.syl_hit, a.error};
        std::lock_guard<std::mutex> lock(progress_mu);
        progress(item);
      }
    }
  };

  int n_workers = workers > 0 ? workers : int(std::thread::hardware_concurrency());
  n_workers = std::max(1, std::min<int>(n_workers, int(n)));
  if (n_workers <= 1 || n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(size_t(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  // Phase 2 (serial, cheap relative to extraction): per-speaker statistics,
  // normalization, per-tier units and descriptor matrices.
  std::map<std::string, std::vector<size_t>> speaker_recs;  // speaker -> indices with tracks
  for (size_t i = 0; i < n; ++i) {
    if (arts[i].error.empty()) speaker_recs[manifest.recordings[i].speaker_id].push_back(i);
  }
  std::map<std::string, SpeakerStats> stats;
  std::map<std::string, std::vector<std::string>> speaker_rec_ids;
  for (const auto& [spk, indices] : speaker_recs) {
    std::vector<const ProsodicTrack*> tracks;
    std::vector<std::string> ids;
    for (size_t i : indices) {
      tracks.push_back(&arts[i].track);
      ids.push_back(manifest.recordings[i].recording_id);
    }
    try {
      stats[spk] = speaker_stats(tracks, spk);
      speaker_rec_ids[spk] = std::move(ids);
    } catch (const std::exception& e) {
      for (size_t i : indices) arts[i].error = e.what();
    }
  }

  auto layout = std::make_shared<const Layout>(make_layout(full_combo()));
  FeatureBundle bundle;
  bundle.dialects = dialects;
  std::vector<bool> desc_all_hit(n, true);

  for (Tier t : tiers) {
    TierFeatures tf;
    tf.tier = t;
    for (size_t i = 0; i < n; ++i) {
      if (!arts[i].error.empty()) continue;
      const RecordingRef& ref = manifest.recordings[i];
      const std::string dtag =
          descriptor_cache_tag(cache, t, ref.speaker_id, speaker_rec_ids[ref.speaker_id]);
      const std::string dpath = cache.dir + "/descriptors/" + ref.recording_id + "." +
                                tier_name(t) + "." + dtag + ".tsv";
      std::vector<DescriptorVector> vectors;
      bool hit = false;
      if (fs::exists(dpath)) {
        try {
          vectors = load_descriptor_tsv(dpath, ref.recording_id, layout);
          hit = true;
        } catch (const std::exception&) {
          hit = false;
        }
      }
      if (!hit) {
        desc_all_hit[i] = false;
        try {
          std::vector<UnitSegment> units =
              parse_annotations(ref.annotation_path, t, ref.recording_id);
          if (t == Tier::kSyllable && units.empty()) units = arts[i].detected;
          ProsodicTrack norm = normalize_tracks(arts[i].track, stats[ref.speaker_id]);
          vectors.reserve(units.size());
          for (const UnitSegment& u : units)
            vectors.push_back(unit_descriptors(norm, u, full_combo(), layout, ref.dialect));
          atomic_write_file(dpath, descriptor_tsv_string(vectors, layout->size()));
        } catch (const std::exception& e) {
          arts[i].error = e.what();
          continue;
        }
      }
      RecordingUnits ru;
      ru.recording_id = ref.recording_id;
      ru.speaker_id = ref.speaker_id;
      ru.dialect = manifest.dialect_index(ref.dialect);
      for (auto& v : vectors) v.dialect = ref.dialect;
      ru.vectors = std::move(vectors);
      tf.recordings.push_back(std::move(ru));
    }
    bundle.tiers.push_back(std::move(tf));
  }

  // A failure discovered on a later tier means the recording must not appear
  // under any tier (its descriptors may be stale with respect to the error).
  for (auto& tf : bundle.tiers) {
    std::vector<RecordingUnits> kept;
    kept.reserve(tf.recordings.size());
    std::set<std::string> failed;
    for (size_t i = 0; i < n; ++i)
      if (!arts[i].error.empty()) failed.insert(manifest.recordings[i].recording_id);
    for (auto& ru : tf.recordings)
      if (failed.find(ru.recording_id) == failed.end()) kept.push_back(std::move(ru));
    tf.recordings = std::move(kept);
  }

  if (report) {
    report->items.clear();
    report->items.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      BuildItem item;
      item.recording_id = manifest.recordings[i].recording_id;
      item.cached = arts[i].track_hit && arts[i].syl_hit && desc_all_hit[i];
      item.error = arts[i].error;
      report->items.push_back(std::move(item));
    }
  }
  return bundle;
}

// ---------------------------------------------------------------------------
// Experiment grid
// ---------------------------------------------------------------------------

std::string CellKey::name() const {
  std::ostringstream ss;
  ss << tier_name(tier) << '/' << combo.name() << "/ctx=" << (context ? "on" : "off") << '/'
     << model_kind_name(classifier);
  return ss.str();
}

bool EvalReport::any_error() const {
  for (const auto& c : cells)
    if (!c.ok()) return true;
  return false;
}

namespace {

// Column indices of a combo inside the full EN+F0+ST+DUR layout
// (EN 0-4, F0 5-9, ST 10-14, DUR 15).
std::vector<size_t> combo_columns(FeatureCombo combo) {
  std::vector<size_t> cols;
  if (combo.has(Feature::kEnergy))
    for (size_t i = 0; i < 5; ++i) cols.push_back(i);
  if (combo.has(Feature::kF0))
    for (size_t i = 5; i < 10; ++i) cols.push_back(i);
  if (combo.has(Feature::kTilt))
    for (size_t i = 10; i < 15; ++i) cols.push_back(i);
  if (combo.has(Feature::kDuration)) cols.push_back(15);
  return cols;
}

std::vector<DescriptorVector> cell_vectors(const RecordingUnits& rec,
                                           const std::vector<size_t>& cols,
                                           const std::shared_ptr<const Layout>& sub_layout,
                                           bool context, int width) {
  std::vector<DescriptorVector> out;
  out.reserve(rec.vectors.size());
  for (const DescriptorVector& v : rec.vectors) {
    DescriptorVector s;
    s.unit = v.unit;
    s.dialect = v.dialect;
    s.f0_missing = v.f0_missing;
    s.layout = sub_layout;
    s.values.reserve(cols.size());
    for (size_t c : cols) s.values.push_back(v.values.at(c));
    out.push_back(std::move(s));
  }
  if (context && !out.empty()) out = stack_context(out, width);
  return out;
}

LabeledDataset make_split_dataset(const std::vector<std::vector<DescriptorVector>>& per_rec,
                                  const TierFeatures& tf, const std::set<std::string>& speakers,
                                  int n_classes) {
  LabeledDataset d;
  d.n_classes = n_classes;
  for (size_t i = 0; i < tf.recordings.size(); ++i) {
    const RecordingUnits& ru = tf.recordings[i];
    if (speakers.find(ru.speaker_id) == speakers.end()) continue;
    std::vector<size_t> seq;
    seq.reserve(per_rec[i].size());
    for (const DescriptorVector& v : per_rec[i]) {
      seq.push_back(d.vectors.size());
      d.vectors.push_back(v.values);
      d.labels.push_back(ru.dialect);
    }
    if (!seq.empty()) d.sequences.push_back(std::move(seq));
  }
  if (!d.vectors.empty()) d.dim = d.vectors[0].size();
  d.validate();
  return d;
}

}  // namespace

CellResult run_experiment(const CorpusManifest& manifest, const FoldPlan& plan,
                          const FeatureBundle& features, const CellKey& key,
                          const TrainParams& params, int context_width, uint64_t seed) {
  // A plan that has been edited since it was made (speakers duplicated,
  // dropped, or moved across dialects) must fail loudly, not quietly shape
  // the splits. train_speakers() alone would mask a duplicate.
  plan.validate(manifest);
  const TierFeatures& tf = features.tier(key.tier);
  const int n_classes = int(features.dialects.size());
  if (n_classes == 0) throw std::runtime_error("run_experiment: no dialects");

  const auto cols = combo_columns(key.combo);
  auto sub_layout = std::make_shared<const Layout>(make_layout(key.combo));
  std::vector<std::vector<DescriptorVector>> per_rec(tf.recordings.size());
  for (size_t i = 0; i < tf.recordings.size(); ++i)
    per_rec[i] = cell_vectors(tf.recordings[i], cols, sub_layout, key.context, context_width);

  CellResult result;
  result.key = key;
  result.pooled = ConfusionMatrix(n_classes);

  for (int r = 0; r < plan.repeats; ++r) {
    for (int f = 0; f < plan.k; ++f) {
      std::set<std::string> test_set = plan.test_speakers(r, f);
      std::set<std::string> train_set = plan.train_speakers(r, f);
      // Speaker-disjointness is re-asserted on the actual split, not
      // only trusted from the fold plan.
      for (const auto& spk : test_set) {
        if (train_set.count(spk))
          throw std::runtime_error("split (" + std::to_string(r) + "," + std::to_string(f) +
                                   "): speaker '" + spk + "' in both train and test");
      }
      for (const auto& ru : tf.recordings) {
        bool in_test = test_set.count(ru.speaker_id) > 0;
        bool in_train = train_set.count(ru.speaker_id) > 0;
        if (in_test == in_train)
          throw std::runtime_error("split (" + std::to_string(r) + "," + std::to_string(f) +
                                   "): speaker '" + ru.speaker_id +
                                   "' not in exactly one of train/test");
      }

      LabeledDataset train_ds = make_split_dataset(per_rec, tf, train_set, n_classes);
      LabeledDataset test_ds = make_split_dataset(per_rec, tf, test_set, n_classes);
      if (test_ds.size() == 0)
        throw std::runtime_error("split (" + std::to_string(r) + "," + std::to_string(f) +
                                 "): empty test fold");
      if (train_ds.size() == 0)
        throw std::runtime_error("split (" + std::to_string(r) + "," + std::to_string(f) +
                                 "): empty train fold");

      uint64_t model_seed =
          mix_seed(seed, fnv1a(tier_name(key.tier)), uint64_t(key.combo.mask),
                   key.context ? 1u : 0u, fnv1a(model_kind_name(key.classifier)), uint64_t(r),
                   uint64_t(f));
      TrainedModel model = train_model(key.classifier, train_ds, params, model_seed);
      std::vector<int> hyp = predict(model, test_ds);

      SplitResult sr;
      sr.repeat = r;
      sr.fold = f;
      sr.cm = ConfusionMatrix::from_labels(test_ds.labels, hyp, n_classes);
      sr.uar = uar(sr.cm, &sr.excluded_classes);
      sr.accuracy = accuracy(sr.cm);
      result.pooled.merge(sr.cm);
      result.splits.push_back(std::move(sr));
    }
  }

  // Mean over folds within each repeat, then over repeats. With complete
  // splits this equals the grand mean; the two-stage form is the contract.
  double uar_sum = 0.0, acc_sum = 0.0;
  for (int r = 0; r < plan.repeats; ++r) {
    double ru = 0.0, ra = 0.0;
    for (int f = 0; f < plan.k; ++f) {
      const SplitResult& s = result.splits[size_t(r) * size_t(plan.k) + size_t(f)];
      ru += s.uar;
      ra += s.accuracy;
    }
    uar_sum += ru / plan.k;
    acc_sum += ra / plan.k;
  }
  result.mean_uar = uar_sum / plan.repeats;
  result.mean_accuracy = acc_sum / plan.repeats;
  (void)manifest;
  return result;
}

EvalReport sweep(const CorpusManifest& manifest, const FoldPlan& plan,
                 const FeatureBundle& features, const ExperimentConfig& config) {
  EvalReport report;
  report.dialects = features.dialects;
  report.folds = plan.k;
  report.repeats = plan.repeats;
  report.seed = config.seed;

  std::vector<CellKey> keys;
  for (Tier t : config.tier_list())
    for (const FeatureCombo& combo : config.combo_list())
      for (bool ctx : config.context_list())
        for (ModelKind kind : config.classifier_list())
          keys.push_back(CellKey{t, combo, ctx, kind});

  report.cells.resize(keys.size());
  if (keys.empty()) return report;

  std::atomic<size_t> next{0};
  auto run_cells = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= keys.size()) return;
      try {
        report.cells[i] = run_experiment(manifest, plan, features, keys[i], config.train,
                                         config.context_width, config.seed);
      } catch (const std::exception& e) {
        CellResult failed;
        failed.key = keys[i];
        failed.error = e.what();
        report.cells[i] = std::move(failed);
      }
    }
  };

  int n_workers = config.workers > 0 ? config.workers : int(std::thread::hardware_concurrency());
  n_workers = std::max(1, std::min<int>(n_workers, int(keys.size())));
  if (n_workers <= 1) {
    run_cells();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(size_t(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(run_cells);
    for (auto& t : pool) t.join();
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

namespace {

std::string excluded_names(const std::vector<int>& classes,
                           const std::vector<std::string>& dialects) {
  std::string out;
  for (int c : classes) {
    if (!out.empty()) out += ';';
    out += (c >= 0 && size_t(c) < dialects.size()) ? dialects[size_t(c)] : std::to_string(c);
  }
  return out;
}

// Error messages go into one CSV field: strip the characters that would
// break the row or the file.
std::string sanitize_csv_field(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

const char* kResultsHeader = "tier,combo,context,classifier,repeat,fold,uar,accuracy,n_test,excluded,error";

}  // namespace

std::string render_results_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "# dialects";
  for (const auto& d : report.dialects) out << ',' << d;
  out << '\n';
  out << "# folds," << report.folds << '\n';
  out << "# repeats," << report.repeats << '\n';
  out << "# seed," << report.seed << '\n';
  out << kResultsHeader << '\n';
  for (const CellResult& cell : report.cells) {
    std::ostringstream prefix;
    prefix << tier_name(cell.key.tier) << ',' << cell.key.combo.name() << ','
           << (cell.key.context ? "on" : "off") << ',' << model_kind_name(cell.key.classifier);
    std::set<int> excluded_union;
    for (const SplitResult& s : cell.splits) {
      out << prefix.str() << ',' << s.repeat << ',' << s.fold << ',' << format_double(s.uar)
          << ',' << format_double(s.accuracy) << ',' << s.cm.total() << ','
          << excluded_names(s.excluded_classes, report.dialects) << ",\n";
      excluded_union.insert(s.excluded_classes.begin(), s.excluded_classes.end());
    }
    if (cell.ok()) {
      std::vector<int> agg_excluded(excluded_union.begin(), excluded_union.end());
      out << prefix.str() << ",-1,-1," << format_double(cell.mean_uar) << ','
          << format_double(cell.mean_accuracy) << ',' << cell.pooled.total() << ','
          << excluded_names(agg_excluded, report.dialects) << ",\n";
    } else {
      out << prefix.str() << ",-1,-1,,,0,," << sanitize_csv_field(cell.error) << '\n';
    }
  }
  return out.str();
}

std::string render_confusions_csv(const EvalReport& report) {
  std::ostringstream out;
  for (const CellResult& cell : report.cells) {
    if (!cell.ok()) continue;
    out << "cell," << tier_name(cell.key.tier) << ',' << cell.key.combo.name() << ','
        << (cell.key.context ? "on" : "off") << ',' << model_kind_name(cell.key.classifier)
        << '\n';
    out << "ref";
    for (const auto& d : report.dialects) out << ',' << d;
    out << '\n';
    for (int i = 0; i < cell.pooled.n_classes; ++i) {
      out << report.dialects[size_t(i)];
      for (int j = 0; j < cell.pooled.n_classes; ++j) out << ',' << cell.pooled.at(i, j);
      out << '\n';
    }
    out << '\n';
  }
  return out.str();
}

std::string render_summary(const EvalReport& report) {
  std::ostringstream out;
  size_t n_err = 0;
  for (const auto& c : report.cells)
    if (!c.ok()) ++n_err;

  out << "prosodid sweep summary\n";
  out << "dialects:";
  for (const auto& d : report.dialects) out << ' ' << d;
  out << '\n';
  out << "folds: " << report.folds << "  repeats: " << report.repeats << "  seed: " << report.seed
      << '\n';
  out << "grid cells: " << report.cells.size() << "  errors: " << n_err << "\n\n";

  if (n_err > 0) {
    for (const auto& c : report.cells)
      if (!c.ok()) out << "error: " << c.key.name() << ": " << c.error << '\n';
    out << '\n';
  }

  // Best cell per classifier, in first-appearance order; ties keep the
  // earliest grid cell so the line is deterministic.
  std::vector<ModelKind> kinds;
  for (const auto& c : report.cells) {
    if (std::find(kinds.begin(), kinds.end(), c.key.classifier) == kinds.end())
      kinds.push_back(c.key.classifier);
  }
  out << "best per classifier (aggregate UAR):\n";
  const CellResult* overall = nullptr;
  for (ModelKind kind : kinds) {
    const CellResult* best = nullptr;
    for (const auto& c : report.cells) {
      if (c.key.classifier != kind || !c.ok()) continue;
      if (!best || c.mean_uar > best->mean_uar) best = &c;
    }
    if (!best) {
      out << "  " << model_kind_name(kind) << ": no successful cells\n";
      continue;
    }
    out << "  " << model_kind_name(kind) << ": tier=" << tier_name(best->key.tier)
        << " combo=" << best->key.combo.name() << " context=" << (best->key.context ? "on" : "off")
        << " uar=" << format_double(best->mean_uar)
        << " accuracy=" << format_double(best->mean_accuracy) << '\n';
    if (!overall || best->mean_uar > overall->mean_uar) overall = best;
  }
  out << '\n';
  if (overall) {
    out << "best overall: classifier=" << model_kind_name(overall->key.classifier)
        << " tier=" << tier_name(overall->key.tier) << " combo=" << overall->key.combo.name()
        << " context=" << (overall->key.context ? "on" : "off")
        << " uar=" << format_double(overall->mean_uar) << '\n';
  } else {
    out << "best overall: no successful cells\n";
  }
  return out.str();
}

void write_report_files(const EvalReport& report, const std::string& out_dir) {
  fs::create_directories(out_dir);
  atomic_write_file(out_dir + "/results.csv", render_results_csv(report));
  atomic_write_file(out_dir + "/confusions.csv", render_confusions_csv(report));
  atomic_write_file(out_dir + "/summary.txt", render_summary(report));
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  size_t pos = 0;
  for (;;) {
    size_t c = line.find(',', pos);
    if (c == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, c - pos));
    pos = c + 1;
  }
  return fields;
}

}  // namespace

EvalReport load_results_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("report: cannot read " + path);
  EvalReport report;
  std::string line;
  bool header_seen = false;
  std::vector<SplitResult> pending;
  std::string pending_prefix;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto f = split_commas(line);
      if (f[0] == "# dialects") {
        report.dialects.assign(f.begin() + 1, f.end());
      } else if (f[0] == "# folds" && f.size() == 2) {
        report.folds = int(parse_double(f[1]));
      } else if (f[0] == "# repeats" && f.size() == 2) {
        report.repeats = int(parse_double(f[1]));
      } else if (f[0] == "# seed" && f.size() == 2) {
        report.seed = uint64_t(std::stoull(f[1]));
      }
      continue;
    }
    if (!header_seen) {
      if (line != kResultsHeader)
        throw std::runtime_error("report: unexpected header in " + path);
      header_seen = true;
      continue;
    }
    auto f = split_commas(line);
    if (f.size() != 11) throw std::runtime_error("report: bad row in " + path + ": " + line);
    const std::string prefix = f[0] + "," + f[1] + "," + f[2] + "," + f[3];
    int repeat = int(parse_double(f[4]));
    int fold = int(parse_double(f[5]));
    if (repeat >= 0) {
      if (!pending.empty() && prefix != pending_prefix)
        throw std::runtime_error("report: interleaved cells in " + path);
      pending_prefix = prefix;
      SplitResult s;
      s.repeat = repeat;
      s.fold = fold;
      s.uar = parse_double(f[6]);
      s.accuracy = parse_double(f[7]);
      pending.push_back(std::move(s));
      continue;
    }
    // aggregate row closes the cell
    if (!pending.empty() && prefix != pending_prefix)
      throw std::runtime_error("report: aggregate row does not match its splits in " + path);
    CellResult cell;
    cell.key.tier = tier_from_string(f[0]);
    cell.key.combo = FeatureCombo::parse(f[1]);
    if (f[2] != "on" && f[2] != "off")
      throw std::runtime_error("report: bad context field in " + path);
    cell.key.context = f[2] == "on";
    cell.key.classifier = model_kind_from_string(f[3]);
    cell.splits = std::move(pending);
    pending.clear();
    pending_prefix.clear();
    cell.error = f[10];
    if (cell.ok()) {
      cell.mean_uar = parse_double(f[6]);
      cell.mean_accuracy = parse_double(f[7]);
    }
    report.cells.push_back(std::move(cell));
  }
  if (!header_seen) throw std::runtime_error("report: no header in " + path);
  if (!pending.empty()) throw std::runtime_error("report: trailing split rows in " + path);
  return report;
}

}  // namespace prosodid
