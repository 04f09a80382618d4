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

#include "prosodid/annotations.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "prosodid/common.hpp"

namespace prosodid {

bool is_pause_label(const std::string& label) {
  return label.empty() || label == "<p>" || label == "sil";
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t pos = 0;
  while (true) {
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

}  // namespace

std::vector<UnitSegment> parse_annotations(const std::string& path, Tier tier,
                                           const std::string& recording_id) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open annotation file: " + path);

  std::vector<UnitSegment> units;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != 4)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected start<TAB>end<TAB>tier<TAB>label");
    UnitSegment u;
    try {
      u.start = parse_double(fields[0]);
      u.end = parse_double(fields[1]);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed time field");
    }
    Tier line_tier = tier_from_string(fields[2]);
    if (line_tier != tier) continue;
    u.tier = line_tier;
    u.text = fields.size() == 4 ? fields[3] : "";
    u.recording_id = recording_id;
    if (!(u.end > u.start))
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": end <= start");
    if (u.start < 0.0)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": negative start time");
    units.push_back(std::move(u));
  }

  std::stable_sort(units.begin(), units.end(),
                   [](const UnitSegment& a, const UnitSegment& b) { return a.start < b.start; });
  for (size_t i = 1; i < units.size(); ++i) {
    if (units[i].start < units[i - 1].end)
      throw std::runtime_error(path + ": overlapping units in tier '" +
                               tier_name(tier) + "' near t=" + format_double(units[i].start));
  }

  std::vector<UnitSegment> speech;
  speech.reserve(units.size());
  for (auto& u : units)
    if (!is_pause_label(u.text)) speech.push_back(std::move(u));
  return speech;
}

void write_annotations(const std::string& path, const std::vector<UnitSegment>& units) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write annotation file: " + path);
  for (const auto& u : units) {
    out << format_double(u.start) << '\t' << format_double(u.end) << '\t' << tier_name(u.tier)
        << '\t' << u.text << '\n';
  }
  if (!out) throw std::runtime_error("short write: " + path);
}

}  // namespace prosodid
