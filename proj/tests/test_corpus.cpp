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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "prosodid/annotations.hpp"
#include "prosodid/folds.hpp"
#include "prosodid/manifest.hpp"
#include "prosodid/wav.hpp"
#include "test_util.hpp"

using namespace prosodid;
using testutil::TempDir;

namespace {

void put_u32(std::string& s, uint32_t v) {
  s.push_back(char(v & 0xff));
  s.push_back(char((v >> 8) & 0xff));
  s.push_back(char((v >> 16) & 0xff));
  s.push_back(char((v >> 24) & 0xff));
}

void put_u16(std::string& s, uint16_t v) {
  s.push_back(char(v & 0xff));
  s.push_back(char((v >> 8) & 0xff));
}

// Hand-rolled RIFF writer, independent of the library's encoder, so the
// reader is checked against raw bytes rather than against save_wav.
std::string wav_bytes(uint16_t channels, uint32_t rate, uint16_t bits,
                      const std::vector<int>& interleaved) {
  std::string data;
  for (int v : interleaved) {
    if (bits == 16) {
      put_u16(data, uint16_t(int16_t(v)));
    } else {
      data.push_back(char(uint8_t(v)));
    }
  }
  std::string s;
  s += "RIFF";
  put_u32(s, uint32_t(4 + 24 + 8 + data.size()));
  s += "WAVE";
  s += "fmt ";
  put_u32(s, 16);
  put_u16(s, 1);  // PCM
  put_u16(s, channels);
  put_u32(s, rate);
  put_u32(s, rate * channels * bits / 8);
  put_u16(s, uint16_t(channels * bits / 8));
  put_u16(s, bits);
  s += "data";
  put_u32(s, uint32_t(data.size()));
  s += data;
  return s;
}

}  // namespace

TEST_CASE("load_wav scales 16-bit mono samples to [-1, 1]") {
  TempDir tmp;
  auto p = tmp / "mono.wav";
  testutil::write_file(p, wav_bytes(1, 8000, 16, {0, 16384, -16384, 32767, -32768}));
  AudioRecording rec = load_wav(p.string());
  REQUIRE(rec.samples.size() == 5);
  CHECK(rec.sample_rate == 8000);
  CHECK(rec.recording_id == "mono");
  const double lsb = 1.0 / 32768.0;
  CHECK(std::abs(rec.samples[0] - 0.0) <= lsb);
  CHECK(std::abs(rec.samples[1] - 0.5) <= lsb);
  CHECK(std::abs(rec.samples[2] + 0.5) <= lsb);
  CHECK(std::abs(rec.samples[3] - 1.0) <= lsb);
  CHECK(std::abs(rec.samples[4] + 1.0) <= lsb);
}

TEST_CASE("load_wav averages stereo channels to mono") {
  TempDir tmp;
  auto p = tmp / "stereo.wav";
  // Frames: (+0.5, -0.5) -> 0 and (0.25, 0.25) -> 0.25.
  testutil::write_file(p, wav_bytes(2, 16000, 16, {16384, -16384, 8192, 8192}));
  AudioRecording rec = load_wav(p.string());
  REQUIRE(rec.samples.size() == 2);
  CHECK(std::abs(rec.samples[0] - 0.0) <= 1.0 / 32768.0);
  CHECK(std::abs(rec.samples[1] - 0.25) <= 1.0 / 32768.0);
}

TEST_CASE("load_wav decodes 8-bit unsigned PCM") {
  TempDir tmp;
  auto p = tmp / "u8.wav";
  testutil::write_file(p, wav_bytes(1, 8000, 8, {128, 255, 0}));
  AudioRecording rec = load_wav(p.string());
  REQUIRE(rec.samples.size() == 3);
  CHECK(rec.samples[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rec.samples[1] == doctest::Approx(127.0 / 128.0).epsilon(1e-12));
  CHECK(rec.samples[2] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("load_wav rejects bad input") {
  TempDir tmp;
  SUBCASE("zero-length audio") {
    auto p = tmp / "empty.wav";
    testutil::write_file(p, wav_bytes(1, 8000, 16, {}));
    CHECK_THROWS(load_wav(p.string()));
  }
  SUBCASE("missing file") { CHECK_THROWS(load_wav((tmp / "nope.wav").string())); }
  SUBCASE("not a RIFF file") {
    auto p = tmp / "junk.wav";
    testutil::write_file(p, "definitely not audio");
    CHECK_THROWS(load_wav(p.string()));
  }
  SUBCASE("truncated data chunk") {
    auto p = tmp / "trunc.wav";
    std::string bytes = wav_bytes(1, 8000, 16, {1000, 2000, 3000});
    bytes.resize(bytes.size() - 3);
    testutil::write_file(p, bytes);
    CHECK_THROWS(load_wav(p.string()));
  }
}

TEST_CASE("save_wav/load_wav round trip within one LSB") {
  TempDir tmp;
  auto p = tmp / "rt.wav";
  std::vector<double> in = testutil::make_sine(440.0, 0.05, 8000, 0.8);
  in.push_back(1.7);    // clipped to 1.0
  in.push_back(-1.7);   // clipped to -1.0
  save_wav(p.string(), in, 8000);
  AudioRecording rec = load_wav(p.string());
  REQUIRE(rec.samples.size() == in.size());
  const double lsb = 1.0 / 32768.0;
  for (size_t i = 0; i + 2 < in.size(); ++i) {
    CHECK(std::abs(rec.samples[i] - in[i]) <= lsb);
  }
  CHECK(std::abs(rec.samples[in.size() - 2] - 1.0) <= lsb);
  CHECK(std::abs(rec.samples[in.size() - 1] + 1.0) <= lsb);
}

TEST_CASE("wav_duration_seconds reads the header only") {
  TempDir tmp;
  auto p = tmp / "dur.wav";
  save_wav(p.string(), std::vector<double>(12000, 0.1), 8000);
  CHECK(wav_duration_seconds(p.string()) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("parse_annotations reads units in time order") {
  TempDir tmp;
  auto p = tmp / "a.tsv";
  testutil::write_file(p,
                       "# comment line\n"
                       "0.5\t0.9\tword\tlea\n"
                       "\n"
                       "0\t0.5\tword\tdat\n"
                       "0.1\t0.3\tsyllable\tda\n");
  auto words = parse_annotations(p.string(), Tier::kWord, "rec1");
  REQUIRE(words.size() == 2);
  CHECK(words[0].start == 0.0);
  CHECK(words[0].end == 0.5);
  CHECK(words[0].text == "dat");
  CHECK(words[0].tier == Tier::kWord);
  CHECK(words[0].recording_id == "rec1");
  CHECK(words[1].start == 0.5);
  CHECK(words[1].text == "lea");

  auto syls = parse_annotations(p.string(), Tier::kSyllable);
  REQUIRE(syls.size() == 1);
  CHECK(syls[0].text == "da");
}

TEST_CASE("parse_annotations filters pause labels") {
  TempDir tmp;
  auto p = tmp / "p.tsv";
  testutil::write_file(p,
                       "0\t0.5\tword\tdat\n"
                       "0.5\t0.8\tword\t<p>\n"
                       "0.8\t1.0\tword\tsil\n"
                       "1.0\t1.2\tword\t\n"
                       "1.2\t1.5\tword\tlea\n");
  auto words = parse_annotations(p.string(), Tier::kWord);
  REQUIRE(words.size() == 2);
  CHECK(words[0].text == "dat");
  CHECK(words[1].text == "lea");
}

TEST_CASE("parse_annotations rejects malformed input") {
  TempDir tmp;
  SUBCASE("overlapping units in one tier") {
    auto p = tmp / "ov.tsv";
    testutil::write_file(p, "0\t0.6\tword\ta\n0.5\t0.9\tword\tb\n");
    CHECK_THROWS(parse_annotations(p.string(), Tier::kWord));
    // Overlap in another tier does not affect the requested one.
    CHECK(parse_annotations(p.string(), Tier::kSyllable).empty());
  }
  SUBCASE("end <= start") {
    auto p = tmp / "rev.tsv";
    testutil::write_file(p, "0.5\t0.5\tword\ta\n");
    CHECK_THROWS(parse_annotations(p.string(), Tier::kWord));
  }
  SUBCASE("negative start") {
    auto p = tmp / "neg.tsv";
    testutil::write_file(p, "-0.1\t0.5\tword\ta\n");
    CHECK_THROWS(parse_annotations(p.string(), Tier::kWord));
  }
  SUBCASE("bad time field") {
    auto p = tmp / "bad.tsv";
    testutil::write_file(p, "zero\t0.5\tword\ta\n");
    CHECK_THROWS(parse_annotations(p.string(), Tier::kWord));
  }
  SUBCASE("too few fields") {
    auto p = tmp / "short.tsv";
    testutil::write_file(p, "0\t0.5\tword\n");
    CHECK_THROWS(parse_annotations(p.string(), Tier::kWord));
  }
  SUBCASE("missing file") {
    CHECK_THROWS(parse_annotations((tmp / "nope.tsv").string(), Tier::kWord));
  }
}

TEST_CASE("write_annotations round-trips exactly") {
  TempDir tmp;
  auto p = tmp / "rt.tsv";
  std::vector<UnitSegment> units;
  // Awkward doubles to exercise shortest round-trip formatting.
  units.push_back({0.1, 0.30000000000000004, Tier::kWord, "a", "r"});
  units.push_back({1.0 / 3.0, 0.0, Tier::kSyllable, "b", "r"});
  units[1].start = 0.30000000000000004;
  units[1].end = 2.0 / 3.0;
  write_annotations(p.string(), units);
  auto words = parse_annotations(p.string(), Tier::kWord, "r");
  auto syls = parse_annotations(p.string(), Tier::kSyllable, "r");
  REQUIRE(words.size() == 1);
  REQUIRE(syls.size() == 1);
  CHECK(words[0] == units[0]);
  CHECK(syls[0] == units[1]);
}

namespace {

// Builds a small real corpus directory: WAVs plus annotations plus
// speakers.tsv metadata.
void write_corpus_entry(const TempDir& tmp, const std::string& rec_id,
                        double dur_sec, int rate = 8000) {
  std::vector<double> samples(size_t(dur_sec * rate), 0.05);
  save_wav((tmp / (rec_id + ".wav")).string(), samples, rate);
  testutil::write_file(tmp / (rec_id + ".tsv"), "0\t0.5\tword\thello\n");
}

}  // namespace

TEST_CASE("build_manifest inventories a corpus directory") {
  TempDir tmp;
  write_corpus_entry(tmp, "s1_r1", 60.0);
  write_corpus_entry(tmp, "s1_r2", 60.0);
  write_corpus_entry(tmp, "s2_r1", 30.0);
  testutil::write_file(tmp / "speakers.tsv",
                       "# comment\n"
                       "s1\tnorth\ts1_r1\n"
                       "s1\tnorth\ts1_r2\n"
                       "s2\tsouth\ts2_r1\n");
  CorpusManifest m = build_manifest(tmp.path().string());
  REQUIRE(m.recordings.size() == 3);
  CHECK(std::is_sorted(m.recordings.begin(), m.recordings.end(),
                       [](const RecordingRef& a, const RecordingRef& b) {
                         return a.recording_id < b.recording_id;
                       }));
  CHECK(m.speakers.at("s1") == "north");
  CHECK(m.speakers.at("s2") == "south");
  CHECK(m.totals_min.at("north") == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(m.totals_min.at("south") == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(m.dialects() == std::vector<std::string>{"north", "south"});
  CHECK(m.dialect_index("north") == 0);
  CHECK(m.dialect_index("south") == 1);
  CHECK_THROWS(m.dialect_index("west"));
  CHECK(m.speaker_duration("s1") == doctest::Approx(120.0).epsilon(1e-9));
}

TEST_CASE("build_manifest rejects inconsistent metadata") {
  SUBCASE("speaker listed under two dialects") {
    TempDir tmp;
    write_corpus_entry(tmp, "r1", 5.0);
    write_corpus_entry(tmp, "r2", 5.0);
    testutil::write_file(tmp / "speakers.tsv", "s1\tnorth\tr1\ns1\tsouth\tr2\n");
    CHECK_THROWS_WITH_AS(build_manifest(tmp.path().string()),
                         doctest::Contains("listed under dialects"),
                         std::runtime_error);
  }
  SUBCASE("empty corpus") {
    TempDir tmp;
    testutil::write_file(tmp / "speakers.tsv", "");
    CHECK_THROWS_WITH_AS(build_manifest(tmp.path().string()),
                         doctest::Contains("no recordings"), std::runtime_error);
  }
  SUBCASE("recording without metadata row") {
    TempDir tmp;
    write_corpus_entry(tmp, "r1", 5.0);
    write_corpus_entry(tmp, "r2", 5.0);
    testutil::write_file(tmp / "speakers.tsv", "s1\tnorth\tr1\n");
    CHECK_THROWS(build_manifest(tmp.path().string()));
  }
  SUBCASE("missing annotation file") {
    TempDir tmp;
    write_corpus_entry(tmp, "r1", 5.0);
    std::filesystem::remove(tmp / "r1.tsv");
    testutil::write_file(tmp / "speakers.tsv", "s1\tnorth\tr1\n");
    CHECK_THROWS(build_manifest(tmp.path().string()));
  }
  SUBCASE("missing speakers.tsv") {
    TempDir tmp;
    write_corpus_entry(tmp, "r1", 5.0);
    CHECK_THROWS(build_manifest(tmp.path().string()));
  }
}

TEST_CASE("manifest JSON round trip is exact") {
  TempDir tmp;
  write_corpus_entry(tmp, "s1_r1", 12.345);
  testutil::write_file(tmp / "speakers.tsv", "s1\tnorth\ts1_r1\n");
  CorpusManifest m = build_manifest(tmp.path().string());
  std::string once = m.to_json();
  CorpusManifest back = CorpusManifest::from_json(once);
  CHECK(back.to_json() == once);
  CHECK(back.recordings.size() == m.recordings.size());
  CHECK(back.recordings[0].duration_sec == m.recordings[0].duration_sec);

  auto p = tmp / "manifest.json";
  m.save(p.string());
  CorpusManifest loaded = CorpusManifest::load(p.string());
  CHECK(loaded.to_json() == once);
}

namespace {

// In-memory manifest for fold-plan tests: durations are given per speaker in
// minutes; one recording per speaker is enough.
CorpusManifest fake_manifest(
    const std::vector<std::pair<std::string, double>>& speakers_minutes,
    const std::string& dialect = "d") {
  CorpusManifest m;
  int i = 0;
  for (const auto& [spk, mins] : speakers_minutes) {
    RecordingRef r;
    r.recording_id = "rec" + std::to_string(i++);
    r.speaker_id = spk;
    r.dialect = dialect;
    r.duration_sec = mins * 60.0;
    m.recordings.push_back(r);
    m.speakers[spk] = dialect;
    m.totals_min[dialect] += mins;
  }
  return m;
}

}  // namespace

TEST_CASE("split_folds balances durations greedily") {
  // Speaker durations 10, 6, 4, 4, 3, 3 minutes into k=4 groups:
  // longest-first placement yields {10}, {6}, {4,3}, {4,3} with group
  // totals {10, 6, 7, 7}.
  CorpusManifest m = fake_manifest(
      {{"a", 10.0}, {"b", 6.0}, {"c", 4.0}, {"d", 4.0}, {"e", 3.0}, {"f", 3.0}});
  FoldPlan plan = split_folds(m, 4, 3, 42);
  plan.validate(m);
  CHECK(plan.warnings.empty());
  for (int r = 0; r < plan.repeats; ++r) {
    const auto& groups = plan.assignments[size_t(r)].at("d");
    REQUIRE(groups.size() == 4);
    std::multiset<double> totals;
    std::multiset<size_t> sizes;
    for (const auto& g : groups) {
      double t = 0.0;
      for (const auto& spk : g) t += m.speaker_duration(spk) / 60.0;
      totals.insert(t);
      sizes.insert(g.size());
    }
    CHECK(totals == std::multiset<double>{6.0, 7.0, 7.0, 10.0});
    CHECK(sizes == std::multiset<size_t>{1, 1, 2, 2});
    CHECK(group_duration_spread(m, groups) == doctest::Approx(4.0 * 60.0).epsilon(1e-9));
  }
}

TEST_CASE("split_folds with equal speakers has zero spread") {
  std::vector<std::pair<std::string, double>> spk;
  for (int i = 0; i < 8; ++i) spk.push_back({"s" + std::to_string(i), 5.0});
  CorpusManifest m = fake_manifest(spk);
  FoldPlan plan = split_folds(m, 4, 5, 7);
  plan.validate(m);
  for (int r = 0; r < 5; ++r) {
    const auto& groups = plan.assignments[size_t(r)].at("d");
    for (const auto& g : groups) CHECK(g.size() == 2);
    CHECK(group_duration_spread(m, groups) == doctest::Approx(0.0));
  }
}

TEST_CASE("fold splits are speaker-disjoint and exhaustive") {
  std::vector<std::pair<std::string, double>> spk;
  for (int i = 0; i < 9; ++i)
    spk.push_back({"s" + std::to_string(i), 2.0 + 0.5 * i});
  CorpusManifest m = fake_manifest(spk);
  FoldPlan plan = split_folds(m, 4, 5, 11);
  plan.validate(m);
  std::set<std::string> all;
  for (const auto& [s, d] : m.speakers) all.insert(s);
  for (int r = 0; r < plan.repeats; ++r) {
    for (int f = 0; f < plan.k; ++f) {
      auto test = plan.test_speakers(r, f);
      auto train = plan.train_speakers(r, f);
      for (const auto& s : test) CHECK(train.count(s) == 0);
      std::set<std::string> both = test;
      both.insert(train.begin(), train.end());
      CHECK(both == all);
    }
  }
}

TEST_CASE("split_folds is deterministic in the seed and varies across repeats") {
  std::vector<std::pair<std::string, double>> spk;
  for (int i = 0; i < 8; ++i) spk.push_back({"s" + std::to_string(i), 5.0});
  CorpusManifest m = fake_manifest(spk);
  FoldPlan a = split_folds(m, 4, 5, 123);
  FoldPlan b = split_folds(m, 4, 5, 123);
  REQUIRE(a.assignments.size() == b.assignments.size());
  for (size_t r = 0; r < a.assignments.size(); ++r) {
    CHECK(a.assignments[r] == b.assignments[r]);
  }
  // With all durations tied the grouping is a random permutation per repeat,
  // so at least one of the five repeats differs from the first.
  bool any_diff = false;
  for (size_t r = 1; r < a.assignments.size(); ++r) {
    if (a.assignments[r] != a.assignments[0]) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("split_folds warns when a dialect has too few speakers") {
  CorpusManifest m = fake_manifest({{"lone", 5.0}});
  FoldPlan plan = split_folds(m, 4, 2, 1);
  CHECK(!plan.warnings.empty());
  plan.validate(m);  // still structurally sound
}

TEST_CASE("FoldPlan::validate rejects tampered plans") {
  std::vector<std::pair<std::string, double>> spk;
  for (int i = 0; i < 8; ++i) spk.push_back({"s" + std::to_string(i), 5.0});
  CorpusManifest m = fake_manifest(spk);
  FoldPlan plan = split_folds(m, 4, 2, 5);
  // Copy one speaker into a second group within the same repeat.
  auto& groups = plan.assignments[0].at("d");
  groups[1].push_back(groups[0][0]);
  CHECK_THROWS_WITH_AS(plan.validate(m), doctest::Contains("in two groups"),
                       std::runtime_error);
}
