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

#include "prosodid/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "prosodid/common.hpp"

namespace prosodid {

using nlohmann::json;

namespace {

// Strict schema check: every key present in `j` must be in `allowed`.
void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) {
    throw std::runtime_error("config: expected object at " + where);
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (allowed.find(it.key()) == allowed.end()) {
      throw std::runtime_error("config: unknown key '" + it.key() + "' in " +
                               where);
    }
  }
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json dialect_to_json(const DialectParams& d) {
  json j;
  j["name"] = d.name;
  j["f0_base"] = d.f0_base;
  j["f0_range_st"] = d.f0_range_st;
  j["energy_mod_depth"] = d.energy_mod_depth;
  j["tilt_offset"] = d.tilt_offset;
  j["tilt_dynamics"] = d.tilt_dynamics;
  j["syllable_rate"] = d.syllable_rate;
  return j;
}

DialectParams dialect_from_json(const json& j, const std::string& where) {
  check_keys(j, where,
             {"name", "f0_base", "f0_range_st", "energy_mod_depth",
              "tilt_offset", "tilt_dynamics", "syllable_rate"});
  DialectParams d;
  read_field(j, "name", d.name);
  read_field(j, "f0_base", d.f0_base);
  read_field(j, "f0_range_st", d.f0_range_st);
  read_field(j, "energy_mod_depth", d.energy_mod_depth);
  read_field(j, "tilt_offset", d.tilt_offset);
  read_field(j, "tilt_dynamics", d.tilt_dynamics);
  read_field(j, "syllable_rate", d.syllable_rate);
  return d;
}

}  // namespace

std::vector<FeatureCombo> ExperimentConfig::combo_list() const {
  std::vector<FeatureCombo> out;
  for (const auto& name : combos) {
    if (name == "all") {
      auto every = FeatureCombo::all();
      out.insert(out.end(), every.begin(), every.end());
    } else {
      out.push_back(FeatureCombo::parse(name));
    }
  }
  return out;
}

std::vector<bool> ExperimentConfig::context_list() const {
  std::vector<bool> out;
  for (const auto& c : contexts) {
    if (c == "off") {
      out.push_back(false);
    } else if (c == "on") {
      out.push_back(true);
    } else {
      throw std::runtime_error("config: context must be 'on' or 'off', got '" +
                               c + "'");
    }
  }
  return out;
}

std::vector<Tier> ExperimentConfig::tier_list() const {
  std::vector<Tier> out;
  for (const auto& t : tiers) out.push_back(tier_from_string(t));
  return out;
}

std::vector<ModelKind> ExperimentConfig::classifier_list() const {
  std::vector<ModelKind> out;
  for (const auto& c : classifiers) out.push_back(model_kind_from_string(c));
  return out;
}

std::string ExperimentConfig::resolved_cache_dir() const {
  if (!cache_dir.empty()) return cache_dir;
  return output_dir + "/cache";
}

SynthConfig ExperimentConfig::resolved_synth() const {
  SynthConfig cfg = synth;
  if (cfg.dialects.empty()) {
    cfg.dialects = synth_preset == "null" ? SynthConfig::null_dialects()
                                          : SynthConfig::separated_dialects();
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  if (folds < 2) throw std::runtime_error("config: folds must be >= 2");
  if (repeats < 1) throw std::runtime_error("config: repeats must be >= 1");
  if (workers < 0) throw std::runtime_error("config: workers must be >= 0");
  if (context_width < 1) {
    throw std::runtime_error("config: context_width must be >= 1");
  }
  if (min_syllable_dur <= 0.0) {
    throw std::runtime_error("config: min_syllable_dur must be positive");
  }
  if (synth_preset != "separated" && synth_preset != "null") {
    throw std::runtime_error("config: synth_preset must be 'separated' or 'null'");
  }
  frame.validate();
  oscillator.validate();
  if (tiers.empty()) throw std::runtime_error("config: tiers is empty");
  if (combos.empty()) throw std::runtime_error("config: combos is empty");
  if (contexts.empty()) throw std::runtime_error("config: contexts is empty");
  if (classifiers.empty()) {
    throw std::runtime_error("config: classifiers is empty");
  }
  // Force name validation early so a bad config fails before any work starts.
  tier_list();
  combo_list();
  context_list();
  classifier_list();
  if (train.knn.k < 1) throw std::runtime_error("config: knn.k must be >= 1");
  if (train.svm.c <= 0.0 || train.svm.sigma <= 0.0) {
    throw std::runtime_error("config: svm.c and svm.sigma must be positive");
  }
  if (train.forest.n_trees < 1) {
    throw std::runtime_error("config: rf.n_trees must be >= 1");
  }
  if (train.crf.l2 < 0.0) throw std::runtime_error("config: crf.l2 must be >= 0");
  if (train.crf.max_iter < 1) {
    throw std::runtime_error("config: crf.max_iter must be >= 1");
  }
  if (train.lstm.hidden < 1 || train.lstm.epochs < 1 || train.lstm.batch < 1) {
    throw std::runtime_error("config: lstm sizes must be >= 1");
  }
  if (train.lstm.lr <= 0.0) {
    throw std::runtime_error("config: lstm.lr must be positive");
  }
  for (const auto& d : resolved_synth().dialects) d.validate();
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["corpus_root"] = corpus_root;
  j["output_dir"] = output_dir;
  j["cache_dir"] = cache_dir;
  j["tiers"] = tiers;
  j["combos"] = combos;
  j["contexts"] = contexts;
  j["classifiers"] = classifiers;
  j["folds"] = folds;
  j["repeats"] = repeats;
  j["seed"] = seed;
  j["workers"] = workers;
  j["context_width"] = context_width;
  j["min_syllable_dur"] = min_syllable_dur;

  json frame_j;
  frame_j["window_len"] = frame.window_len;
  frame_j["hop"] = frame.hop;
  frame_j["sample_rate"] = frame.sample_rate;
  j["frame"] = frame_j;

  json osc_j;
  osc_j["center_freq"] = oscillator.center_freq;
  osc_j["q_factor"] = oscillator.q_factor;
  osc_j["envelope_rate"] = oscillator.envelope_rate;
  j["oscillator"] = osc_j;

  json pitch_j;
  pitch_j["f0_min"] = pitch.f0_min;
  pitch_j["f0_max"] = pitch.f0_max;
  pitch_j["corr_window"] = pitch.corr_window;
  pitch_j["voicing_threshold"] = pitch.voicing_threshold;
  pitch_j["octave_penalty"] = pitch.octave_penalty;
  pitch_j["vuv_penalty"] = pitch.vuv_penalty;
  pitch_j["lag_bias"] = pitch.lag_bias;
  pitch_j["max_candidates"] = pitch.max_candidates;
  j["pitch"] = pitch_j;

  json den_j;
  den_j["over_subtraction"] = denoise.over_subtraction;
  den_j["spectral_floor"] = denoise.spectral_floor;
  den_j["noise_quantile"] = denoise.noise_quantile;
  den_j["gate_factor"] = denoise.gate_factor;
  j["denoise"] = den_j;

  json knn_j;
  knn_j["k"] = train.knn.k;
  j["knn"] = knn_j;

  json svm_j;
  svm_j["c"] = train.svm.c;
  svm_j["sigma"] = train.svm.sigma;
  svm_j["tol"] = train.svm.tol;
  j["svm"] = svm_j;

  json rf_j;
  rf_j["n_trees"] = train.forest.n_trees;
  rf_j["min_leaf"] = train.forest.min_leaf;
  j["rf"] = rf_j;

  json crf_j;
  crf_j["l2"] = train.crf.l2;
  crf_j["max_iter"] = train.crf.max_iter;
  crf_j["grad_tol"] = train.crf.grad_tol;
  j["crf"] = crf_j;

  json lstm_j;
  lstm_j["hidden"] = train.lstm.hidden;
  lstm_j["batch"] = train.lstm.batch;
  lstm_j["epochs"] = train.lstm.epochs;
  lstm_j["lr"] = train.lstm.lr;
  lstm_j["delay"] = train.lstm.delay;
  lstm_j["clip_norm"] = train.lstm.clip_norm;
  j["lstm"] = lstm_j;

  json synth_j;
  synth_j["preset"] = synth_preset;
  synth_j["speakers_per_dialect"] = synth.speakers_per_dialect;
  synth_j["recordings_per_speaker"] = synth.recordings_per_speaker;
  synth_j["recording_duration"] = synth.recording_duration;
  synth_j["sample_rate"] = synth.sample_rate;
  json rows = json::array();
  for (const auto& d : synth.dialects) rows.push_back(dialect_to_json(d));
  synth_j["dialects"] = rows;
  j["synth"] = synth_j;

  return j.dump(2) + "\n";
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j = json::parse(text);
  check_keys(j, "root",
             {"corpus_root", "output_dir", "cache_dir", "tiers", "combos",
              "contexts", "classifiers", "folds", "repeats", "seed", "workers",
              "context_width", "min_syllable_dur", "frame", "oscillator",
              "pitch", "denoise", "knn", "svm", "rf", "crf", "lstm", "synth"});

  ExperimentConfig cfg;
  read_field(j, "corpus_root", cfg.corpus_root);
  read_field(j, "output_dir", cfg.output_dir);
  read_field(j, "cache_dir", cfg.cache_dir);
  read_field(j, "tiers", cfg.tiers);
  read_field(j, "combos", cfg.combos);
  read_field(j, "contexts", cfg.contexts);
  read_field(j, "classifiers", cfg.classifiers);
  read_field(j, "folds", cfg.folds);
  read_field(j, "repeats", cfg.repeats);
  read_field(j, "seed", cfg.seed);
  read_field(j, "workers", cfg.workers);
  read_field(j, "context_width", cfg.context_width);
  read_field(j, "min_syllable_dur", cfg.min_syllable_dur);

  if (j.contains("frame")) {
    const json& f = j.at("frame");
    check_keys(f, "frame", {"window_len", "hop", "sample_rate"});
    read_field(f, "window_len", cfg.frame.window_len);
    read_field(f, "hop", cfg.frame.hop);
    read_field(f, "sample_rate", cfg.frame.sample_rate);
  }
  if (j.contains("oscillator")) {
    const json& o = j.at("oscillator");
    check_keys(o, "oscillator", {"center_freq", "q_factor", "envelope_rate"});
    read_field(o, "center_freq", cfg.oscillator.center_freq);
    read_field(o, "q_factor", cfg.oscillator.q_factor);
    read_field(o, "envelope_rate", cfg.oscillator.envelope_rate);
  }
  if (j.contains("pitch")) {
    const json& p = j.at("pitch");
    check_keys(p, "pitch",
               {"f0_min", "f0_max", "corr_window", "voicing_threshold",
                "octave_penalty", "vuv_penalty", "lag_bias", "max_candidates"});
    read_field(p, "f0_min", cfg.pitch.f0_min);
    read_field(p, "f0_max", cfg.pitch.f0_max);
    read_field(p, "corr_window", cfg.pitch.corr_window);
    read_field(p, "voicing_threshold", cfg.pitch.voicing_threshold);
    read_field(p, "octave_penalty", cfg.pitch.octave_penalty);
    read_field(p, "vuv_penalty", cfg.pitch.vuv_penalty);
    read_field(p, "lag_bias", cfg.pitch.lag_bias);
    read_field(p, "max_candidates", cfg.pitch.max_candidates);
  }
  if (j.contains("denoise")) {
    const json& d = j.at("denoise");
    check_keys(d, "denoise",
               {"over_subtraction", "spectral_floor", "noise_quantile",
                "gate_factor"});
    read_field(d, "over_subtraction", cfg.denoise.over_subtraction);
    read_field(d, "spectral_floor", cfg.denoise.spectral_floor);
    read_field(d, "noise_quantile", cfg.denoise.noise_quantile);
    read_field(d, "gate_factor", cfg.denoise.gate_factor);
  }
  if (j.contains("knn")) {
    const json& k = j.at("knn");
    check_keys(k, "knn", {"k"});
    read_field(k, "k", cfg.train.knn.k);
  }
  if (j.contains("svm")) {
    const json& s = j.at("svm");
    check_keys(s, "svm", {"c", "sigma", "tol"});
    read_field(s, "c", cfg.train.svm.c);
    read_field(s, "sigma", cfg.train.svm.sigma);
    read_field(s, "tol", cfg.train.svm.tol);
  }
  if (j.contains("rf")) {
    const json& r = j.at("rf");
    check_keys(r, "rf", {"n_trees", "min_leaf"});
    read_field(r, "n_trees", cfg.train.forest.n_trees);
    read_field(r, "min_leaf", cfg.train.forest.min_leaf);
  }
  if (j.contains("crf")) {
    const json& c = j.at("crf");
    check_keys(c, "crf", {"l2", "max_iter", "grad_tol"});
    read_field(c, "l2", cfg.train.crf.l2);
    read_field(c, "max_iter", cfg.train.crf.max_iter);
    read_field(c, "grad_tol", cfg.train.crf.grad_tol);
  }
  if (j.contains("lstm")) {
    const json& l = j.at("lstm");
    check_keys(l, "lstm",
               {"hidden", "batch", "epochs", "lr", "delay", "clip_norm"});
    read_field(l, "hidden", cfg.train.lstm.hidden);
    read_field(l, "batch", cfg.train.lstm.batch);
    read_field(l, "epochs", cfg.train.lstm.epochs);
    read_field(l, "lr", cfg.train.lstm.lr);
    read_field(l, "delay", cfg.train.lstm.delay);
    read_field(l, "clip_norm", cfg.train.lstm.clip_norm);
  }
  if (j.contains("synth")) {
    const json& s = j.at("synth");
    check_keys(s, "synth",
               {"preset", "speakers_per_dialect", "recordings_per_speaker",
                "recording_duration", "sample_rate", "dialects"});
    read_field(s, "preset", cfg.synth_preset);
    read_field(s, "speakers_per_dialect", cfg.synth.speakers_per_dialect);
    read_field(s, "recordings_per_speaker", cfg.synth.recordings_per_speaker);
    read_field(s, "recording_duration", cfg.synth.recording_duration);
    read_field(s, "sample_rate", cfg.synth.sample_rate);
    if (s.contains("dialects")) {
      const json& rows = s.at("dialects");
      if (!rows.is_array()) {
        throw std::runtime_error("config: synth.dialects must be an array");
      }
      cfg.synth.dialects.clear();
      for (size_t i = 0; i < rows.size(); ++i) {
        cfg.synth.dialects.push_back(dialect_from_json(
            rows[i], "synth.dialects[" + std::to_string(i) + "]"));
      }
    }
  }
  cfg.validate();
  return cfg;
}

void ExperimentConfig::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("config: cannot write " + path);
  out << to_json();
  if (!out) throw std::runtime_error("config: write failed for " + path);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("config: cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace prosodid
