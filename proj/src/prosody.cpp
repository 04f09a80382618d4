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

#include "prosodid/prosody.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "prosodid/common.hpp"

namespace prosodid {

FeatureCombo FeatureCombo::parse(const std::string& s) {
  FeatureCombo combo;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t sep = s.find('+', pos);
    std::string tok = s.substr(pos, sep == std::string::npos ? sep : sep - pos);
    if (tok == "EN") combo.add(Feature::kEnergy);
    else if (tok == "F0") combo.add(Feature::kF0);
    else if (tok == "ST") combo.add(Feature::kTilt);
    else if (tok == "DUR") combo.add(Feature::kDuration);
    else throw std::runtime_error("unknown feature '" + tok + "' in combo '" + s + "'");
    if (sep == std::string::npos) break;
    pos = sep + 1;
  }
  if (combo.empty()) throw std::runtime_error("empty feature combo");
  return combo;
}

std::vector<FeatureCombo> FeatureCombo::all() {
  std::vector<FeatureCombo> combos;
  for (unsigned m = 1; m < 16; ++m) combos.push_back(FeatureCombo{m});
  return combos;
}

Layout make_layout(FeatureCombo combo) {
  if (combo.empty()) throw std::runtime_error("empty feature combo");
  static const char* kDescriptors[] = {"mean", "std", "min", "max", "range"};
  Layout layout;
  for (Feature f : {Feature::kEnergy, Feature::kF0, Feature::kTilt}) {
    if (!combo.has(f)) continue;
    for (const char* d : kDescriptors) layout.push_back({f, d});
  }
  if (combo.has(Feature::kDuration)) layout.push_back({Feature::kDuration, "log"});
  return layout;
}

SpeakerStats speaker_stats(const std::vector<const ProsodicTrack*>& tracks,
                           const std::string& speaker_id) {
  std::vector<double> voiced_f0;
  double tilt_sum = 0.0, tilt_sq = 0.0;
  size_t n_frames = 0;
  for (const ProsodicTrack* t : tracks) {
    t->check_aligned();
    for (size_t i = 0; i < t->size(); ++i) {
      if (t->voiced[i]) voiced_f0.push_back(t->f0[i]);
      tilt_sum += t->tilt[i];
      tilt_sq += t->tilt[i] * t->tilt[i];
      ++n_frames;
    }
  }
  if (voiced_f0.empty())
    throw std::runtime_error("speaker '" + speaker_id + "' has no voiced frames");

  std::sort(voiced_f0.begin(), voiced_f0.end());
  size_t n = voiced_f0.size();
  double median = (n % 2 == 1) ? voiced_f0[n / 2]
                               : 0.5 * (voiced_f0[n / 2 - 1] + voiced_f0[n / 2]);

  SpeakerStats stats;
  stats.speaker_id = speaker_id;
  stats.f0_median = median;
  stats.tilt_mean = tilt_sum / double(n_frames);
  double var = tilt_sq / double(n_frames) - stats.tilt_mean * stats.tilt_mean;
  stats.tilt_std = std::sqrt(std::max(var, 0.0));
  if (stats.tilt_std < kLogFloor) stats.tilt_std = kLogFloor;  // degenerate constant tilt
  return stats;
}

double normalize_f0(double f0, const SpeakerStats& stats) {
  if (!(f0 > 0.0)) throw std::runtime_error("normalize_f0 called on an unvoiced frame");
  if (!(stats.f0_median > 0.0)) throw std::runtime_error("normalize_f0: invalid speaker median");
  return 12.0 * std::log2(f0 / stats.f0_median);
}

ProsodicTrack normalize_tracks(const ProsodicTrack& track, const SpeakerStats& stats) {
  track.check_aligned();
  ProsodicTrack out = track;
  for (size_t i = 0; i < track.size(); ++i) {
    out.energy[i] = floored_log(track.energy[i]);
    out.f0[i] = track.voiced[i] ? normalize_f0(track.f0[i], stats) : 0.0;
    out.tilt[i] = (track.tilt[i] - stats.tilt_mean) / stats.tilt_std;
  }
  return out;
}

namespace {

struct FiveStats {
  double mean, std_dev, min, max, range;
};

FiveStats five_stats(const std::vector<double>& v) {
  double sum = 0.0, mn = v[0], mx = v[0];
  for (double x : v) {
    sum += x;
    mn = std::min(mn, x);
    mx = std::max(mx, x);
  }
  double mean = sum / double(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= double(v.size());
  return {mean, std::sqrt(var), mn, mx, mx - mn};
}

}  // namespace

DescriptorVector unit_descriptors(const ProsodicTrack& track, const UnitSegment& unit,
                                  FeatureCombo combo,
                                  const std::shared_ptr<const Layout>& layout,
                                  const std::string& dialect) {
  track.check_aligned();
  if (!layout) throw std::runtime_error("unit_descriptors: missing layout");
  auto lo = std::lower_bound(track.frame_times.begin(), track.frame_times.end(), unit.start);
  size_t first = size_t(lo - track.frame_times.begin());
  size_t last = first;  // one past the last frame center inside [start, end)
  while (last < track.size() && track.frame_times[last] < unit.end) ++last;
  if (last == first)
    throw std::runtime_error("unit [" + format_double(unit.start) + ", " +
                             format_double(unit.end) + ") of '" + track.recording_id +
                             "' covers no frame centers");

  DescriptorVector vec;
  vec.unit = unit;
  vec.layout = layout;
  vec.dialect = dialect;
  vec.values.reserve(layout->size());

  std::vector<double> scratch;
  for (Feature f : {Feature::kEnergy, Feature::kF0, Feature::kTilt}) {
    if (!combo.has(f)) continue;
    scratch.clear();
    for (size_t i = first; i < last; ++i) {
      if (f == Feature::kEnergy) scratch.push_back(track.energy[i]);
      else if (f == Feature::kTilt) scratch.push_back(track.tilt[i]);
      else if (track.voiced[i]) scratch.push_back(track.f0[i]);
    }
    if (scratch.empty()) {  // fully-unvoiced unit, F0 block only
      vec.f0_missing = true;
      for (int i = 0; i < 5; ++i) vec.values.push_back(0.0);
      continue;
    }
    FiveStats s = five_stats(scratch);
    vec.values.push_back(s.mean);
    vec.values.push_back(s.std_dev);
    vec.values.push_back(s.min);
    vec.values.push_back(s.max);
    vec.values.push_back(s.range);
  }
  if (combo.has(Feature::kDuration)) {
    if (!(unit.end > unit.start))
      throw std::runtime_error("unit_descriptors: non-positive duration");
    vec.values.push_back(floored_log(unit.end - unit.start));
  }
  if (vec.values.size() != layout->size())
    throw std::runtime_error("unit_descriptors: layout does not match the combo");
  return vec;
}

std::vector<DescriptorVector> stack_context(const std::vector<DescriptorVector>& vectors,
                                            int width) {
  if (width < 0) throw std::runtime_error("stack_context: negative width");
  if (vectors.empty()) return {};
  const size_t dim = vectors[0].values.size();
  for (const auto& v : vectors)
    if (v.values.size() != dim)
      throw std::runtime_error("stack_context: mixed input dimensions");

  // stacked layout: the base entries repeated per context offset, tagged so
  // len(values) == len(layout) still holds
  auto stacked_layout = std::make_shared<Layout>();
  const Layout& base = *vectors[0].layout;
  for (int off = -width; off <= width; ++off) {
    for (const LayoutEntry& e : base) {
      LayoutEntry tagged = e;
      tagged.descriptor = "ctx" + std::to_string(off) + ":" + e.descriptor;
      stacked_layout->push_back(tagged);
    }
  }

  std::vector<DescriptorVector> out;
  out.reserve(vectors.size());
  const long n = long(vectors.size());
  for (long i = 0; i < n; ++i) {
    DescriptorVector v = vectors[size_t(i)];
    v.layout = stacked_layout;
    v.values.clear();
    v.values.reserve(dim * size_t(2 * width + 1));
    for (long off = -width; off <= width; ++off) {
      long j = i + off;
      if (j < 0 || j >= n) {
        v.values.insert(v.values.end(), dim, 0.0);
      } else {
        const auto& src = vectors[size_t(j)].values;
        v.values.insert(v.values.end(), src.begin(), src.end());
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

void export_feature_matrix(const std::string& path,
                           const std::vector<DescriptorVector>& vectors) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write feature matrix: " + path);
  out << "recording_id,unit_index,start,end,dialect";
  if (!vectors.empty()) {
    for (const LayoutEntry& e : *vectors[0].layout)
      out << ',' << feature_name(e.feature) << '.' << e.descriptor;
  }
  out << '\n';
  for (size_t i = 0; i < vectors.size(); ++i) {
    const DescriptorVector& v = vectors[i];
    out << v.unit.recording_id << ',' << i << ',' << format_double(v.unit.start) << ','
        << format_double(v.unit.end) << ',' << v.dialect;
    for (double x : v.values) out << ',' << format_double(x);
    out << '\n';
  }
  if (!out) throw std::runtime_error("short write: " + path);
}

}  // namespace prosodid
