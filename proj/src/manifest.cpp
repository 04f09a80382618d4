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

#include "prosodid/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "prosodid/common.hpp"
#include "prosodid/wav.hpp"

namespace fs = std::filesystem;

namespace prosodid {

std::vector<std::string> CorpusManifest::dialects() const {
  std::vector<std::string> out;
  for (const auto& [spk, dia] : speakers)
    if (std::find(out.begin(), out.end(), dia) == out.end()) out.push_back(dia);
  std::sort(out.begin(), out.end());
  return out;
}

int CorpusManifest::dialect_index(const std::string& dialect) const {
  auto d = dialects();
  auto it = std::find(d.begin(), d.end(), dialect);
  if (it == d.end()) throw std::runtime_error("unknown dialect: " + dialect);
  return int(it - d.begin());
}

double CorpusManifest::speaker_duration(const std::string& speaker_id) const {
  double total = 0.0;
  for (const auto& r : recordings)
    if (r.speaker_id == speaker_id) total += r.duration_sec;
  return total;
}

std::string CorpusManifest::to_json() const {
  nlohmann::json j;
  j["recordings"] = nlohmann::json::array();
  for (const auto& r : recordings) {
    j["recordings"].push_back({{"recording_id", r.recording_id},
                               {"wav_path", r.wav_path},
                               {"annotation_path", r.annotation_path},
                               {"speaker_id", r.speaker_id},
                               {"dialect", r.dialect},
                               {"duration_sec", r.duration_sec}});
  }
  j["speakers"] = speakers;
  j["totals_min"] = totals_min;
  return j.dump(2);
}

CorpusManifest CorpusManifest::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  CorpusManifest m;
  for (const auto& rj : j.at("recordings")) {
    RecordingRef r;
    r.recording_id = rj.at("recording_id").get<std::string>();
    r.wav_path = rj.at("wav_path").get<std::string>();
    r.annotation_path = rj.at("annotation_path").get<std::string>();
    r.speaker_id = rj.at("speaker_id").get<std::string>();
    r.dialect = rj.at("dialect").get<std::string>();
    r.duration_sec = rj.at("duration_sec").get<double>();
    m.recordings.push_back(std::move(r));
  }
  m.speakers = j.at("speakers").get<std::map<std::string, std::string>>();
  m.totals_min = j.at("totals_min").get<std::map<std::string, double>>();
  return m;
}

void CorpusManifest::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << to_json() << '\n';
}

CorpusManifest CorpusManifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read manifest: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

CorpusManifest build_manifest(const std::string& root) {
  fs::path rootp(root);
  if (!fs::is_directory(rootp)) throw std::runtime_error("corpus root is not a directory: " + root);

  fs::path meta = rootp / "speakers.tsv";
  if (!fs::exists(meta))
    throw std::runtime_error("missing speaker metadata file: " + meta.string());

  // recording_id -> (speaker, dialect)
  std::map<std::string, std::pair<std::string, std::string>> rec_meta;
  std::map<std::string, std::string> speaker_dialect;
  {
    std::ifstream in(meta);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      size_t t1 = line.find('\t');
      size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
      if (t2 == std::string::npos)
        throw std::runtime_error(meta.string() + ":" + std::to_string(line_no) +
                                 ": expected speaker<TAB>dialect<TAB>recording");
      std::string spk = line.substr(0, t1);
      std::string dia = line.substr(t1 + 1, t2 - t1 - 1);
      std::string rec = line.substr(t2 + 1);
      auto it = speaker_dialect.find(spk);
      if (it != speaker_dialect.end() && it->second != dia)
        throw std::runtime_error("speaker '" + spk + "' listed under dialects '" + it->second +
                                 "' and '" + dia + "'");
      speaker_dialect[spk] = dia;
      if (rec_meta.count(rec))
        throw std::runtime_error("recording '" + rec + "' listed twice in " + meta.string());
      rec_meta[rec] = {spk, dia};
    }
  }

  CorpusManifest m;
  m.speakers = speaker_dialect;

  std::vector<fs::path> wavs;
  for (const auto& entry : fs::directory_iterator(rootp)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav")
      wavs.push_back(entry.path());
  }
  std::sort(wavs.begin(), wavs.end());
  if (wavs.empty()) throw std::runtime_error("no recordings in " + root);

  for (const auto& wav : wavs) {
    std::string id = wav.stem().string();
    auto it = rec_meta.find(id);
    if (it == rec_meta.end())
      throw std::runtime_error("recording without metadata: " + id);
    RecordingRef r;
    r.recording_id = id;
    r.wav_path = wav.string();
    fs::path ann = wav.parent_path() / (id + ".tsv");
    if (!fs::exists(ann)) throw std::runtime_error("missing annotation file: " + ann.string());
    r.annotation_path = ann.string();
    r.speaker_id = it->second.first;
    r.dialect = it->second.second;
    r.duration_sec = wav_duration_seconds(wav.string());
    m.totals_min[r.dialect] += r.duration_sec / 60.0;
    m.recordings.push_back(std::move(r));
  }
  return m;
}

}  // namespace prosodid
