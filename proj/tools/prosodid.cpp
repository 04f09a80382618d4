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

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prosodid/annotations.hpp"
#include "prosodid/config.hpp"
#include "prosodid/dsp.hpp"
#include "prosodid/experiment.hpp"
#include "prosodid/folds.hpp"
#include "prosodid/manifest.hpp"
#include "prosodid/syllabifier.hpp"
#include "prosodid/synth.hpp"
#include "prosodid/wav.hpp"

namespace fs = std::filesystem;
using namespace prosodid;

namespace {

// Exit codes: 0 ok, 1 operational failure, 2 configuration/usage error.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void error_record(const std::string& command, const std::string& message) {
  std::string msg = message;
  for (char& c : msg)
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  std::cerr << "error\t" << command << '\t' << msg << '\n';
}

struct Flags {
  std::string config_path;
  std::string corpus;
  std::string out;
  std::string tier;
  std::string combo;
  std::string context;
  std::string classifier;
  uint64_t seed = 0;
  int workers = -1;
  bool seed_set = false;
  bool workers_set = false;
};

void add_common_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "Experiment config JSON (defaults when omitted)");
  cmd->add_option("--corpus", f.corpus, "Corpus root directory (overrides config)");
  cmd->add_option("--out", f.out, "Output directory (overrides config)");
  cmd->add_option("--seed", f.seed, "Random seed (overrides config)");
  cmd->add_option("--workers", f.workers, "Worker threads, 0 = all cores");
  cmd->add_option("--tier", f.tier, "Single tier: word or syllable")
      ->check(CLI::IsMember({"word", "syllable"}));
  cmd->add_option("--combo", f.combo,
                  "One feature combination, features joined by ',' or '+' (e.g. EN,F0,ST)");
  cmd->add_option("--context", f.context, "Context stacking: on or off")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--classifier", f.classifier,
                  "Comma-separated classifiers (knn, svm, rf, crf, lstm)");
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t c = s.find(sep, pos);
    if (c == std::string::npos) {
      out.push_back(s.substr(pos));
      break;
    }
    out.push_back(s.substr(pos, c - pos));
    pos = c + 1;
  }
  return out;
}

// Config file < environment < flags.
ExperimentConfig effective_config(const Flags& f) {
  ExperimentConfig cfg;
  if (!f.config_path.empty()) cfg = ExperimentConfig::load(f.config_path);
  if (const char* env = std::getenv("PROSODID_CACHE"); env && *env) cfg.cache_dir = env;
  if (!f.corpus.empty()) cfg.corpus_root = f.corpus;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.seed_set) cfg.seed = f.seed;
  if (f.workers_set) cfg.workers = f.workers;
  if (!f.tier.empty()) cfg.tiers = {f.tier};
  if (!f.combo.empty()) {
    // the flag names a single combination; commas and '+' both join features
    std::string name = f.combo;
    for (char& c : name)
      if (c == ',') c = '+';
    cfg.combos = {name};
  }
  if (!f.context.empty()) cfg.contexts = {f.context};
  if (!f.classifier.empty()) cfg.classifiers = split_list(f.classifier, ',');
  cfg.validate();
  return cfg;
}

int cmd_extract(const ExperimentConfig& cfg) {
  if (cfg.corpus_root.empty()) {
    error_record("extract", "no corpus root (set corpus_root in the config or pass --corpus)");
    return kExitUsage;
  }
  CorpusManifest manifest = build_manifest(cfg.corpus_root);
  CacheSettings cache = CacheSettings::from_config(cfg);
  BuildReport report;
  build_features(manifest, cfg.tier_list(), cache, cfg.workers, &report,
                 [](const BuildItem& item) {
                   if (item.error.empty()) {
                     std::cout << "extract\t" << item.recording_id << '\t'
                               << (item.cached ? "cached" : "computed") << '\n';
                   }
                 });
  for (const auto& item : report.items)
    if (!item.error.empty()) error_record("extract", item.recording_id + ": " + item.error);
  std::cout << "extract-summary\t" << report.items.size() << "\t" << report.cache_hits()
            << " cached\t" << report.failures() << " failed\n";
  return report.failures() > 0 ? kExitFailure : kExitOk;
}

int cmd_syllabify(const ExperimentConfig& cfg, const std::vector<std::string>& wavs,
                  const std::string& out_dir) {
  int failed = 0;
  for (const std::string& wav : wavs) {
    try {
      AudioRecording raw = load_wav(wav);
      AudioRecording pre = preprocess(raw, cfg.frame, cfg.denoise);
      std::vector<UnitSegment> segments =
          syllabify_recording(pre, cfg.oscillator, cfg.min_syllable_dur);
      fs::path dir = out_dir.empty() ? fs::path(wav).parent_path() : fs::path(out_dir);
      if (!dir.empty()) fs::create_directories(dir);
      fs::path out_path = dir / (raw.recording_id + ".syllables.tsv");
      write_annotations(out_path.string(), segments);
      std::cout << "syllabify\t" << raw.recording_id << '\t' << segments.size() << '\t'
                << out_path.string() << '\n';
    } catch (const std::exception& e) {
      error_record("syllabify", wav + ": " + e.what());
      ++failed;
    }
  }
  return failed > 0 ? kExitFailure : kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  if (cfg.corpus_root.empty()) {
    error_record("sweep", "no corpus root (set corpus_root in the config or pass --corpus)");
    return kExitUsage;
  }
  CorpusManifest manifest = build_manifest(cfg.corpus_root);
  FoldPlan plan = split_folds(manifest, cfg.folds, cfg.repeats, cfg.seed);
  plan.validate(manifest);
  for (const auto& w : plan.warnings) std::cerr << "warning\tsweep\t" << w << '\n';

  fs::create_directories(cfg.output_dir);
  cfg.save(cfg.output_dir + "/config.json");  // effective config, re-runnable

  CacheSettings cache = CacheSettings::from_config(cfg);
  BuildReport build;
  FeatureBundle features =
      build_features(manifest, cfg.tier_list(), cache, cfg.workers, &build,
                     [](const BuildItem& item) {
                       if (item.error.empty()) {
                         std::cout << "extract\t" << item.recording_id << '\t'
                                   << (item.cached ? "cached" : "computed") << '\n';
                       }
                     });
  if (build.failures() > 0) {
    for (const auto& item : build.items)
      if (!item.error.empty()) error_record("sweep", item.recording_id + ": " + item.error);
    return kExitFailure;
  }

  EvalReport report = sweep(manifest, plan, features, cfg);
  write_report_files(report, cfg.output_dir);
  std::cout << "report\t" << cfg.output_dir << "/results.csv\n";
  std::cout << "report\t" << cfg.output_dir << "/confusions.csv\n";
  std::cout << "report\t" << cfg.output_dir << "/summary.txt\n";
  std::cout << render_summary(report);
  if (report.any_error()) {
    for (const auto& cell : report.cells)
      if (!cell.ok()) error_record("sweep", cell.key.name() + ": " + cell.error);
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_synth(const ExperimentConfig& cfg) {
  if (cfg.corpus_root.empty()) {
    error_record("synth", "no destination (set corpus_root in the config or pass --corpus)");
    return kExitUsage;
  }
  SynthConfig synth_cfg = cfg.resolved_synth();
  generate_synthetic_corpus(cfg.corpus_root, synth_cfg, cfg.seed);
  size_t n = synth_cfg.dialects.size() * size_t(synth_cfg.speakers_per_dialect) *
             size_t(synth_cfg.recordings_per_speaker);
  std::cout << "synth\t" << cfg.corpus_root << '\t' << synth_cfg.dialects.size() << " dialects\t"
            << n << " recordings\n";
  return kExitOk;
}

int cmd_report(const ExperimentConfig& cfg) {
  const std::string path = cfg.output_dir + "/results.csv";
  EvalReport report = load_results_csv(path);
  atomic_write_file(cfg.output_dir + "/summary.txt", render_summary(report));
  std::cout << "report\t" << cfg.output_dir << "/summary.txt\n";
  std::cout << render_summary(report);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prosodid: prosodic dialect identification toolkit"};
  app.require_subcommand(1);

  Flags flags;
  std::vector<std::string> wav_paths;

  CLI::App* extract = app.add_subcommand("extract", "Extract and cache features for a corpus");
  add_common_flags(extract, flags);

  CLI::App* syllabify = app.add_subcommand("syllabify", "Detect syllables in WAV files");
  add_common_flags(syllabify, flags);
  syllabify->add_option("wavs", wav_paths, "WAV files to syllabify")->required();

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run the experiment grid and write reports");
  add_common_flags(sweep_cmd, flags);

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  add_common_flags(synth, flags);

  CLI::App* report_cmd =
      app.add_subcommand("report", "Re-render the summary from an existing results.csv");
  add_common_flags(report_cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_record("cli", e.what());
    return kExitUsage;
  }

  CLI::App* parsed = app.get_subcommands().front();
  const std::string command = parsed->get_name();
  flags.seed_set = parsed->count("--seed") > 0;
  flags.workers_set = parsed->count("--workers") > 0;
  ExperimentConfig cfg;
  try {
    cfg = effective_config(flags);
  } catch (const std::exception& e) {
    error_record(command, e.what());
    return kExitUsage;
  }

  try {
    if (extract->parsed()) return cmd_extract(cfg);
    if (syllabify->parsed()) return cmd_syllabify(cfg, wav_paths, flags.out);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg);
    if (synth->parsed()) return cmd_synth(cfg);
    if (report_cmd->parsed()) return cmd_report(cfg);
  } catch (const std::exception& e) {
    error_record(command, e.what());
    return kExitFailure;
  }
  error_record("cli", "no command selected");
  return kExitUsage;
}
