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

#include "prosodid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "prosodid/annotations.hpp"
#include "prosodid/common.hpp"
#include "prosodid/types.hpp"
#include "prosodid/wav.hpp"

namespace fs = std::filesystem;

namespace prosodid {

void DialectParams::validate() const {
  if (name.empty()) throw std::runtime_error("synth: dialect row without a name");
  if (!(f0_base > 0.0)) throw std::runtime_error("synth: f0_base must be > 0");
  if (f0_range_st < 0.0) throw std::runtime_error("synth: f0_range_st must be >= 0");
  if (energy_mod_depth < 0.0 || energy_mod_depth >= 1.0)
    throw std::runtime_error("synth: energy_mod_depth must be in [0, 1)");
  if (tilt_dynamics < 0.0 || tilt_dynamics > 1.0)
    throw std::runtime_error("synth: tilt_dynamics must be in [0, 1]");
  if (!(syllable_rate > 0.0)) throw std::runtime_error("synth: syllable_rate must be > 0");
}

void SynthConfig::validate() const {
  if (dialects.empty()) throw std::runtime_error("synth: no dialect rows");
  for (const auto& d : dialects) d.validate();
  for (size_t i = 0; i < dialects.size(); ++i)
    for (size_t j = i + 1; j < dialects.size(); ++j)
      if (dialects[i].name == dialects[j].name)
        throw std::runtime_error("synth: duplicate dialect name '" + dialects[i].name + "'");
  if (speakers_per_dialect < 1) throw std::runtime_error("synth: need >= 1 speaker per dialect");
  if (recordings_per_speaker < 1) throw std::runtime_error("synth: need >= 1 recording");
  if (recording_duration < 2.0) throw std::runtime_error("synth: recordings shorter than 2 s");
  if (sample_rate < 8000) throw std::runtime_error("synth: sample rate below the analysis rate");
}

std::vector<DialectParams> SynthConfig::separated_dialects() {
  // F0 bases 4 semitones apart; every other parameter spread wide enough to
  // survive the per-speaker jitter
  std::vector<DialectParams> rows(5);
  const char* names[5] = {"d1", "d2", "d3", "d4", "d5"};
  const double bases[5] = {100.0, 125.99, 158.74, 200.0, 251.98};
  const double ranges[5] = {1.0, 2.5, 4.0, 5.5, 7.0};
  const double depths[5] = {0.25, 0.45, 0.62, 0.78, 0.92};
  const double dynamics[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  const double rates[5] = {3.0, 3.6, 4.2, 4.8, 5.4};
  for (int i = 0; i < 5; ++i) {
    rows[size_t(i)].name = names[i];
    rows[size_t(i)].f0_base = bases[i];
    rows[size_t(i)].f0_range_st = ranges[i];
    rows[size_t(i)].energy_mod_depth = depths[i];
    rows[size_t(i)].tilt_offset = 0.0;
    rows[size_t(i)].tilt_dynamics = dynamics[i];
    rows[size_t(i)].syllable_rate = rates[i];
  }
  return rows;
}

std::vector<DialectParams> SynthConfig::null_dialects() {
  std::vector<DialectParams> rows(5);
  const char* names[5] = {"d1", "d2", "d3", "d4", "d5"};
  for (int i = 0; i < 5; ++i) {
    rows[size_t(i)].name = names[i];
    rows[size_t(i)].f0_base = 150.0;
    rows[size_t(i)].f0_range_st = 4.0;
    rows[size_t(i)].energy_mod_depth = 0.6;
    rows[size_t(i)].tilt_offset = 0.0;
    rows[size_t(i)].tilt_dynamics = 0.5;
    rows[size_t(i)].syllable_rate = 4.2;
  }
  return rows;
}

namespace {

struct SpeakerDraws {
  double f0_shift_st = 0.0;   // uninformative across dialects by design
  double depth_jitter = 0.0;
  double rate_factor = 1.0;
  double tilt_jitter = 0.0;
  double dynamics_jitter = 0.0;
};

SpeakerDraws draw_speaker(uint64_t seed, size_t dialect, int speaker) {
  Rng rng(mix_seed(seed, 0x53504bu, uint64_t(dialect), uint64_t(speaker)));
  SpeakerDraws d;
  d.f0_shift_st = rng.uniform(-1.5, 1.5);
  d.depth_jitter = rng.uniform(-0.04, 0.04);
  d.rate_factor = rng.uniform(0.93, 1.07);
  d.tilt_jitter = rng.uniform(-0.03, 0.03);
  d.dynamics_jitter = rng.uniform(-0.05, 0.05);
  return d;
}

struct Timeline {
  std::vector<UnitSegment> units;  // word + syllable tiers, pauses included
  // per syllable: bounds and index within its word (for tilt alternation)
  struct Syl {
    double start, end;
    int index;
  };
  std::vector<Syl> syllables;
};

Timeline build_timeline(Rng& rng, const std::string& rec_id, double duration, double rate,
                        double min_tail) {
  Timeline tl;
  double t = 0.30 + rng.uniform(0.0, 0.1);
  int word_no = 0;
  int syl_no = 0;
  while (true) {
    int n_syl = 2 + int(rng.uniform_int(3));  // 2..4 syllables per word
    std::vector<double> durs(static_cast<size_t>(n_syl));
    double total = 0.0;
    for (auto& d : durs) {
      d = (1.0 / rate) * rng.uniform(0.85, 1.15);
      total += d;
    }
    if (t + total > duration - min_tail) break;

    double word_start = t;
    for (int s = 0; s < n_syl; ++s) {
      UnitSegment syl;
      syl.start = t;
      syl.end = t + durs[size_t(s)];
      syl.tier = Tier::kSyllable;
      syl.text = "syl" + std::to_string(syl_no);
      syl.recording_id = rec_id;
      tl.units.push_back(syl);
      tl.syllables.push_back({syl.start, syl.end, syl_no});
      t = syl.end;
      ++syl_no;
    }
    UnitSegment word;
    word.start = word_start;
    word.end = t;
    word.tier = Tier::kWord;
    word.text = "w" + std::to_string(word_no++);
    word.recording_id = rec_id;
    tl.units.push_back(word);

    double pause = 0.15 + rng.uniform(0.0, 0.2);
    UnitSegment gap;
    gap.start = t;
    gap.end = std::min(t + pause, duration);
    gap.tier = Tier::kWord;
    gap.text = "<p>";
    gap.recording_id = rec_id;
    tl.units.push_back(gap);
    t += pause;
  }
  std::stable_sort(tl.units.begin(), tl.units.end(),
                   [](const UnitSegment& a, const UnitSegment& b) { return a.start < b.start; });
  return tl;
}

// one resonator section of the vocal-tract stand-in
struct Resonator {
  double b0, a1, a2;
  double y1 = 0.0, y2 = 0.0;

  Resonator(double freq, double bw, double fs) {
    double r = std::exp(-M_PI * bw / fs);
    a1 = -2.0 * r * std::cos(2.0 * M_PI * freq / fs);
    a2 = r * r;
    b0 = 1.0 + a1 + a2;  // unity gain at DC keeps levels predictable
    if (b0 <= 0.0) b0 = 1e-3;
  }
  double step(double x) {
    double y = b0 * x - a1 * y1 - a2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

}  // namespace

size_t generate_synthetic_corpus(const std::string& root, const SynthConfig& config,
                                 uint64_t seed) {
  config.validate();
  fs::create_directories(root);
  std::ofstream speakers_tsv(fs::path(root) / "speakers.tsv");
  if (!speakers_tsv) throw std::runtime_error("cannot write speakers.tsv in " + root);
  speakers_tsv << "# speaker_id\tdialect\trecording_id\n";

  const int fs_out = config.sample_rate;
  size_t written = 0;

  for (size_t d = 0; d < config.dialects.size(); ++d) {
    const DialectParams& dia = config.dialects[d];
    for (int s = 0; s < config.speakers_per_dialect; ++s) {
      const SpeakerDraws draws = draw_speaker(seed, d, s);
      const std::string speaker_id = dia.name + "_spk" + std::to_string(s);
      const double f0_center = dia.f0_base * std::pow(2.0, draws.f0_shift_st / 12.0);
      const double depth =
          std::clamp(dia.energy_mod_depth + draws.depth_jitter, 0.0, 0.97);
      const double rate = dia.syllable_rate * draws.rate_factor;
      const double tilt_base = std::clamp(0.5 + dia.tilt_offset + draws.tilt_jitter, 0.0, 0.95);
      const double dynamics = std::clamp(dia.tilt_dynamics + draws.dynamics_jitter, 0.0, 1.0);
      const double tilt_contrast = 0.35;

      for (int r = 0; r < config.recordings_per_speaker; ++r) {
        Rng rng(mix_seed(seed, 0x524543u, uint64_t(d), uint64_t(s), uint64_t(r)));
        const std::string rec_id = speaker_id + "_r" + std::to_string(r);
        Timeline tl = build_timeline(rng, rec_id, config.recording_duration, rate, 0.4);

        const size_t n = size_t(std::llround(config.recording_duration * fs_out));
        std::vector<double> signal(n, 0.0);

        // slow F0 meander: two incommensurate sinusoids, random phases
        const double ph1 = rng.uniform(0.0, 2.0 * M_PI);
        const double ph2 = rng.uniform(0.0, 2.0 * M_PI);
        auto f0_at = [&](double t) {
          double m = 0.7 * std::sin(2.0 * M_PI * 0.35 * t + ph1) +
                     0.3 * std::sin(2.0 * M_PI * 1.05 * t + ph2);
          return f0_center * std::pow(2.0, (dia.f0_range_st / 2.0) * m / 12.0);
        };

        // per-sample syllable membership
        std::vector<int> syl_of(n, -1);
        for (const auto& syl : tl.syllables) {
          size_t lo = size_t(std::llround(syl.start * fs_out));
          size_t hi = std::min(n, size_t(std::llround(syl.end * fs_out)));
          for (size_t i = lo; i < hi; ++i) syl_of[i] = syl.index;
        }

        Resonator formant1(700.0, 110.0, fs_out);
        Resonator formant2(1200.0, 140.0, fs_out);
        double phase = rng.uniform(0.0, 1.0);
        double prev_voice = 0.0;
        const double noise_level = 0.0025 * rng.uniform(0.7, 1.3);
        for (size_t i = 0; i < n; ++i) {
          double t = double(i) / fs_out;
          phase += f0_at(t) / fs_out;
          double pulse = 0.0;
          if (phase >= 1.0) {
            phase -= 1.0;
            pulse = 1.0;
          }
          double voice = formant2.step(formant1.step(pulse));

          int k = syl_of[i];
          double env = 0.0;
          double alpha = tilt_base;
          if (k >= 0) {
            const auto& syl = tl.syllables[size_t(k)];
            double theta = (t - syl.start) / (syl.end - syl.start);
            env = (1.0 - depth) + depth * std::sin(M_PI * theta) * std::sin(M_PI * theta);
            double across = (k % 2 == 0) ? 1.0 : -1.0;
            double within = 2.0 * theta - 1.0;
            alpha = std::clamp(tilt_base + tilt_contrast * ((1.0 - dynamics) * across +
                                                            dynamics * within),
                               0.0, 0.97);
          }
          double shaped = voice - alpha * prev_voice;
          prev_voice = voice;
          signal[i] = env * shaped + noise_level * rng.normal();
        }

        double peak = 0.0;
        for (double v : signal) peak = std::max(peak, std::abs(v));
        if (peak > 0.0)
          for (auto& v : signal) v *= 0.7 / peak;

        save_wav((fs::path(root) / (rec_id + ".wav")).string(), signal, fs_out);
        write_annotations((fs::path(root) / (rec_id + ".tsv")).string(), tl.units);
        speakers_tsv << speaker_id << '\t' << dia.name << '\t' << rec_id << '\n';
        ++written;
      }
    }
  }
  if (!speakers_tsv) throw std::runtime_error("short write: speakers.tsv");
  return written;
}

}  // namespace prosodid
