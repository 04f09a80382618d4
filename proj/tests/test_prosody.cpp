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

#include <cmath>
#include <memory>
#include <vector>

#include "prosodid/common.hpp"
#include "prosodid/dsp.hpp"
#include "prosodid/prosody.hpp"
#include "test_util.hpp"

using namespace prosodid;

namespace {

// A track built directly from value arrays, 5 ms apart, for tests that
// don't need real audio behind the frames.
ProsodicTrack make_track(const std::vector<double>& energy,
                         const std::vector<double>& f0,
                         const std::vector<double>& tilt,
                         const std::string& id = "t") {
  ProsodicTrack t;
  const size_t n = energy.size();
  t.recording_id = id;
  t.energy = energy;
  t.f0 = f0;
  t.tilt = tilt;
  t.frame_times.resize(n);
  t.voiced.resize(n);
  for (size_t i = 0; i < n; ++i) {
    t.frame_times[i] = 0.005 * double(i);
    t.voiced[i] = f0[i] > 0.0 ? 1 : 0;
  }
  t.check_aligned();
  return t;
}

UnitSegment make_unit(double start, double end, const std::string& id = "t") {
  UnitSegment u;
  u.start = start;
  u.end = end;
  u.tier = Tier::kWord;
  u.text = "w";
  u.recording_id = id;
  return u;
}

std::shared_ptr<const Layout> layout_for(FeatureCombo combo) {
  return std::make_shared<const Layout>(make_layout(combo));
}

}  // namespace

TEST_CASE("speaker_stats takes the F0 median over voiced frames") {
  SUBCASE("odd count: middle value") {
    ProsodicTrack t = make_track({1, 1, 1}, {100, 120, 140}, {0, 0, 0});
    SpeakerStats s = speaker_stats({&t}, "spk");
    CHECK(s.speaker_id == "spk");
    CHECK(s.f0_median == 120.0);
  }
  SUBCASE("even count: mean of the middle pair") {
    ProsodicTrack t = make_track({1, 1}, {100, 200}, {0, 0});
    SpeakerStats s = speaker_stats({&t}, "spk");
    CHECK(s.f0_median == 150.0);
  }
  SUBCASE("pools across recordings and skips unvoiced frames") {
    ProsodicTrack a = make_track({1, 1, 1}, {100, 0, 300}, {0.5, 0.5, 0.5});
    ProsodicTrack b = make_track({1}, {200}, {-0.5});
    SpeakerStats s = speaker_stats({&a, &b}, "spk");
    CHECK(s.f0_median == 200.0);  // {100, 300, 200} -> 200
    CHECK(s.tilt_mean == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("no voiced frames anywhere throws") {
    ProsodicTrack t = make_track({1, 1}, {0, 0}, {0, 0});
    CHECK_THROWS(speaker_stats({&t}, "spk"));
  }
  SUBCASE("constant tilt keeps a positive std guard") {
    ProsodicTrack t = make_track({1, 1}, {100, 110}, {0.4, 0.4});
    SpeakerStats s = speaker_stats({&t}, "spk");
    CHECK(s.tilt_std > 0.0);  // z-scores stay finite
  }
}

TEST_CASE("normalize_f0 maps the median to 0 and octaves to +-12") {
  SpeakerStats s;
  s.f0_median = 150.0;
  CHECK(std::abs(normalize_f0(150.0, s) - 0.0) <= 1e-12);
  CHECK(std::abs(normalize_f0(300.0, s) - 12.0) <= 1e-12);
  CHECK(std::abs(normalize_f0(75.0, s) + 12.0) <= 1e-12);

  SpeakerStats s2;
  s2.f0_median = 220.0;
  CHECK(std::abs(normalize_f0(440.0, s2) - 12.0) <= 1e-12);

  CHECK_THROWS(normalize_f0(0.0, s));
  CHECK_THROWS(normalize_f0(-10.0, s));
}

TEST_CASE("normalize_f0 is strictly monotone") {
  SpeakerStats s;
  s.f0_median = 137.0;
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double a = 60.0 + 340.0 * rng.uniform();
    const double b = a * (1.0 + 0.001 + rng.uniform());
    CHECK(normalize_f0(a, s) < normalize_f0(b, s));
  }
}

TEST_CASE("normalize_tracks applies the three frame-level maps") {
  SpeakerStats s;
  s.f0_median = 100.0;
  s.tilt_mean = 0.5;
  s.tilt_std = 2.0;
  ProsodicTrack t = make_track({4.0, 0.0, 1.0}, {200.0, 0.0, 100.0}, {2.5, 0.5, -1.5});
  ProsodicTrack n = normalize_tracks(t, s);
  n.check_aligned();

  // Energy: natural log with the 1e-10 floor.
  CHECK(n.energy[0] == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(n.energy[1] == doctest::Approx(std::log(1e-10)).epsilon(1e-12));
  CHECK(n.energy[2] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  // F0: semitones re median on voiced frames, zero (flagged) on unvoiced.
  CHECK(n.f0[0] == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(n.f0[1] == 0.0);
  CHECK(n.voiced[1] == 0);
  CHECK(std::abs(n.f0[2]) <= 1e-12);

  // Tilt: z-score.
  CHECK(n.tilt[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(n.tilt[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(n.tilt[2] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("z-scored tilt over a speaker's own frames is standard") {
  Rng rng(11);
  std::vector<double> energy(400), f0(400), tilt(400);
  for (size_t i = 0; i < 400; ++i) {
    energy[i] = rng.uniform();
    f0[i] = 80.0 + 200.0 * rng.uniform();
    tilt[i] = 3.0 * rng.uniform() - 1.0;
  }
  ProsodicTrack t = make_track(energy, f0, tilt);
  SpeakerStats s = speaker_stats({&t}, "spk");
  ProsodicTrack n = normalize_tracks(t, s);
  double mean = 0.0;
  for (double v : n.tilt) mean += v;
  mean /= double(n.tilt.size());
  double var = 0.0;
  for (double v : n.tilt) var += (v - mean) * (v - mean);
  var /= double(n.tilt.size());
  CHECK(std::abs(mean) < 1e-9);
  CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
}

TEST_CASE("unit_descriptors computes the five statistics") {
  // Frames at 0, 5, 10, ... ms. A unit over [0, 10 ms) covers exactly the
  // first two frame centers.
  ProsodicTrack t = make_track({1.0, 3.0, 50.0}, {100, 100, 100}, {0, 0, 0});
  FeatureCombo en;
  en.add(Feature::kEnergy);
  DescriptorVector d = unit_descriptors(t, make_unit(0.0, 0.010), en, layout_for(en), "d1");
  REQUIRE(d.values.size() == 5);
  CHECK(d.values[0] == doctest::Approx(2.0).epsilon(1e-12));  // mean of {1, 3}
  CHECK(d.values[1] == doctest::Approx(1.0).epsilon(1e-12));  // population std
  CHECK(d.values[2] == 1.0);                                  // min
  CHECK(d.values[3] == 3.0);                                  // max
  CHECK(d.values[4] == doctest::Approx(2.0).epsilon(1e-12));  // range
  CHECK(d.dialect == "d1");
  CHECK(!d.f0_missing);

  SUBCASE("constant feature collapses to (c, 0, c, c, 0)") {
    ProsodicTrack c = make_track({2.5, 2.5, 2.5}, {100, 100, 100}, {0, 0, 0});
    DescriptorVector v = unit_descriptors(c, make_unit(0.0, 0.015), en, layout_for(en), "d1");
    CHECK(v.values == std::vector<double>{2.5, 0.0, 2.5, 2.5, 0.0});
  }
}

TEST_CASE("unit_descriptors full combo is sixteen-dimensional") {
  ProsodicTrack t = make_track({1, 2, 3, 4}, {90, 0, 110, 120}, {0.1, -0.2, 0.3, 0.0});
  FeatureCombo all;
  all.add(Feature::kEnergy);
  all.add(Feature::kF0);
  all.add(Feature::kTilt);
  all.add(Feature::kDuration);
  auto layout = layout_for(all);
  REQUIRE(layout->size() == 16);
  DescriptorVector d = unit_descriptors(t, make_unit(0.0, 0.020), all, layout, "d2");
  CHECK(d.values.size() == 16);
  CHECK(d.layout == layout);
  // Duration slot is log(end - start).
  CHECK(d.values[15] == doctest::Approx(std::log(0.020)).epsilon(1e-9));
  // F0 block (slots 5..9) uses voiced frames only: {90, 110, 120}.
  CHECK(d.values[7] == 90.0);
  CHECK(d.values[8] == 120.0);

  SUBCASE("layout names the slots in declared order") {
    CHECK((*layout)[0].feature == Feature::kEnergy);
    CHECK((*layout)[0].descriptor == "mean");
    CHECK((*layout)[5].feature == Feature::kF0);
    CHECK((*layout)[10].feature == Feature::kTilt);
    CHECK((*layout)[15].feature == Feature::kDuration);
  }
}

TEST_CASE("unit_descriptors edge behavior") {
  ProsodicTrack t = make_track({1, 2}, {0, 0}, {0.1, 0.2});
  FeatureCombo all = FeatureCombo::parse("EN+F0+ST+DUR");
  auto layout = layout_for(all);

  SUBCASE("unit covering no frame centers throws") {
    CHECK_THROWS(unit_descriptors(t, make_unit(0.0061, 0.0091), all, layout, "d"));
  }
  SUBCASE("fully unvoiced unit zeroes F0 and sets the flag") {
    DescriptorVector d = unit_descriptors(t, make_unit(0.0, 0.010), all, layout, "d");
    CHECK(d.f0_missing);
    for (size_t i = 5; i < 10; ++i) CHECK(d.values[i] == 0.0);
    CHECK(d.values.size() == 16);
  }
}

TEST_CASE("descriptor statistics obey order constraints") {
  Rng rng(31);
  FeatureCombo en;
  en.add(Feature::kEnergy);
  auto layout = layout_for(en);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t n = 2 + size_t(rng.uniform() * 40);
    std::vector<double> energy(n), f0(n, 100.0), tilt(n, 0.0);
    for (auto& v : energy) v = 10.0 * rng.uniform() - 5.0;
    ProsodicTrack t = make_track(energy, f0, tilt);
    DescriptorVector d =
        unit_descriptors(t, make_unit(0.0, 0.005 * double(n)), en, layout, "d");
    const double mean = d.values[0], mn = d.values[2], mx = d.values[3];
    CHECK(mn <= mean + 1e-9);
    CHECK(mean <= mx + 1e-9);
    CHECK(d.values[4] == doctest::Approx(mx - mn).epsilon(1e-9));
    CHECK(d.values[1] >= 0.0);
  }
}

TEST_CASE("descriptors are invariant to raw F0 scale after normalization") {
  Rng rng(13);
  std::vector<double> energy(200), f0(200), tilt(200);
  for (size_t i = 0; i < 200; ++i) {
    energy[i] = rng.uniform() + 0.1;
    f0[i] = (i % 7 == 0) ? 0.0 : 90.0 + 150.0 * rng.uniform();
    tilt[i] = rng.uniform() - 0.5;
  }
  FeatureCombo combo = FeatureCombo::parse("F0");
  auto layout = layout_for(combo);
  UnitSegment unit = make_unit(0.1, 0.6);

  ProsodicTrack t1 = make_track(energy, f0, tilt);
  SpeakerStats s1 = speaker_stats({&t1}, "a");
  DescriptorVector d1 = unit_descriptors(normalize_tracks(t1, s1), unit, combo, layout, "d");

  std::vector<double> f0_scaled = f0;
  for (auto& v : f0_scaled) v *= 1.37;  // a different voice, same contour
  ProsodicTrack t2 = make_track(energy, f0_scaled, tilt);
  SpeakerStats s2 = speaker_stats({&t2}, "b");
  DescriptorVector d2 = unit_descriptors(normalize_tracks(t2, s2), unit, combo, layout, "d");

  REQUIRE(d1.values.size() == d2.values.size());
  for (size_t i = 0; i < d1.values.size(); ++i) {
    CHECK(std::abs(d1.values[i] - d2.values[i]) < 1e-9);
  }
}

TEST_CASE("recording gain shifts log-energy descriptors additively") {
  FrameSpec spec;
  const double a = 2.7;
  AudioRecording rec = testutil::make_recording(testutil::make_vowel(120.0, 1.2, 8000), 8000);
  AudioRecording loud = rec;
  for (auto& v : loud.samples) v *= a;

  // Tracks straight from frame energies; normalization supplies the log.
  ProsodicTrack t1, t2;
  t1.energy = frame_energy(rec, spec);
  t2.energy = frame_energy(loud, spec);
  const size_t n = t1.energy.size();
  for (ProsodicTrack* t : {&t1, &t2}) {
    t->recording_id = "g";
    t->frame_times.resize(n);
    t->f0.assign(n, 100.0);
    t->voiced.assign(n, 1);
    t->tilt.assign(n, 0.0);
    for (size_t i = 0; i < n; ++i) t->frame_times[i] = 0.005 * double(i);
  }
  SpeakerStats s;
  s.f0_median = 100.0;
  s.tilt_mean = 0.0;
  s.tilt_std = 1.0;
  ProsodicTrack n1 = normalize_tracks(t1, s);
  ProsodicTrack n2 = normalize_tracks(t2, s);

  FeatureCombo en = FeatureCombo::parse("EN");
  auto layout = layout_for(en);
  UnitSegment unit = make_unit(0.2, 0.8, "g");
  DescriptorVector d1 = unit_descriptors(n1, unit, en, layout, "d");
  DescriptorVector d2 = unit_descriptors(n2, unit, en, layout, "d");
  const double shift = 2.0 * std::log(a);
  CHECK(std::abs(d2.values[0] - d1.values[0] - shift) < 1e-6);  // mean
  CHECK(std::abs(d2.values[1] - d1.values[1]) < 1e-6);          // std
  CHECK(std::abs(d2.values[2] - d1.values[2] - shift) < 1e-6);  // min
  CHECK(std::abs(d2.values[3] - d1.values[3] - shift) < 1e-6);  // max
  CHECK(std::abs(d2.values[4] - d1.values[4]) < 1e-6);          // range
}

TEST_CASE("stack_context concatenates five blocks with zero padding") {
  FeatureCombo en = FeatureCombo::parse("EN");
  auto layout = layout_for(en);
  ProsodicTrack t = make_track(std::vector<double>(40, 1.0), std::vector<double>(40, 100.0),
                               std::vector<double>(40, 0.0));
  std::vector<DescriptorVector> units;
  for (int i = 0; i < 6; ++i) {
    UnitSegment u = make_unit(0.03 * i, 0.03 * (i + 1));
    DescriptorVector d = unit_descriptors(t, u, en, layout, "d");
    // Tag each unit so blocks are tellable apart.
    for (auto& v : d.values) v = double(i + 1);
    units.push_back(d);
  }
  std::vector<DescriptorVector> stacked = stack_context(units, 2);
  REQUIRE(stacked.size() == units.size());
  const size_t dim = units[0].values.size();
  REQUIRE(dim == 5);
  for (const auto& s : stacked) CHECK(s.values.size() == 5 * dim);

  // Unit 0: two leading zero blocks, then units 0, 1, 2.
  for (size_t j = 0; j < 2 * dim; ++j) CHECK(stacked[0].values[j] == 0.0);
  CHECK(stacked[0].values[2 * dim] == 1.0);
  CHECK(stacked[0].values[3 * dim] == 2.0);
  CHECK(stacked[0].values[4 * dim] == 3.0);

  // Interior unit 3: blocks 2, 3, 4, 5, 6.
  for (size_t b = 0; b < 5; ++b) {
    for (size_t j = 0; j < dim; ++j) {
      CHECK(stacked[3].values[b * dim + j] == double(b + 2));
    }
  }

  // Center block matches the unstacked vector bit for bit.
  for (size_t i = 0; i < units.size(); ++i) {
    for (size_t j = 0; j < dim; ++j) {
      CHECK(stacked[i].values[2 * dim + j] == units[i].values[j]);
    }
    CHECK(stacked[i].unit == units[i].unit);
    CHECK(stacked[i].dialect == units[i].dialect);
  }

  // Last unit: two trailing zero blocks.
  for (size_t j = 3 * dim; j < 5 * dim; ++j) CHECK(stacked[5].values[j] == 0.0);

  SUBCASE("single unit is padded on both sides") {
    std::vector<DescriptorVector> one = {units[0]};
    auto s = stack_context(one, 2);
    REQUIRE(s.size() == 1);
    REQUIRE(s[0].values.size() == 5 * dim);
    for (size_t j = 0; j < 2 * dim; ++j) CHECK(s[0].values[j] == 0.0);
    for (size_t j = 3 * dim; j < 5 * dim; ++j) CHECK(s[0].values[j] == 0.0);
  }
  SUBCASE("width parameter is honored") {
    auto s = stack_context(units, 1);
    for (const auto& v : s) CHECK(v.values.size() == 3 * dim);
  }
}

TEST_CASE("FeatureCombo parses names and enumerates all combos") {
  CHECK(FeatureCombo::parse("EN").name() == "EN");
  CHECK(FeatureCombo::parse("EN+F0+ST").name() == "EN+F0+ST");
  CHECK(FeatureCombo::parse("F0+EN").name() == "EN+F0");  // canonical order
  CHECK_THROWS(FeatureCombo::parse(""));
  CHECK_THROWS(FeatureCombo::parse("XX"));
  CHECK(FeatureCombo::all().size() == 15);

  CHECK(make_layout(FeatureCombo::parse("EN+F0+ST+DUR")).size() == 16);
  CHECK(make_layout(FeatureCombo::parse("DUR")).size() == 1);
  CHECK(make_layout(FeatureCombo::parse("EN+ST")).size() == 10);
}

TEST_CASE("export_feature_matrix writes one parseable row per unit") {
  testutil::TempDir tmp;
  ProsodicTrack t = make_track({1, 2, 3, 4}, {100, 100, 100, 100}, {0, 0, 0, 0});
  FeatureCombo en = FeatureCombo::parse("EN");
  auto layout = layout_for(en);
  std::vector<DescriptorVector> units;
  units.push_back(unit_descriptors(t, make_unit(0.0, 0.010), en, layout, "d1"));
  units.push_back(unit_descriptors(t, make_unit(0.010, 0.020), en, layout, "d2"));
  auto p = tmp / "mat.tsv";
  export_feature_matrix(p.string(), units);
  std::string text = testutil::read_file(p);
  size_t rows = 0;
  for (char c : text) rows += c == '\n' ? 1 : 0;
  CHECK(rows == 3);  // header + 2 units
  CHECK(text.find("d1") != std::string::npos);
  CHECK(text.find("d2") != std::string::npos);
}
