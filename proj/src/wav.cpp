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

#include "prosodid/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace prosodid {

namespace {

struct WavInfo {
  uint16_t format = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits = 0;
  std::streamoff data_offset = 0;
  uint32_t data_size = 0;
};

uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}

uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return uint16_t(b[0]) | uint16_t(uint32_t(b[1]) << 8);
}

WavInfo parse_header(std::istream& in, const std::string& path) {
  char id[4];
  in.read(id, 4);
  if (!in || std::memcmp(id, "RIFF", 4) != 0)
    throw std::runtime_error("not a RIFF file: " + path);
  read_u32(in);  // riff size, unused
  in.read(id, 4);
  if (!in || std::memcmp(id, "WAVE", 4) != 0)
    throw std::runtime_error("not a WAVE file: " + path);

  WavInfo info;
  bool have_fmt = false;
  while (in.read(id, 4)) {
    uint32_t chunk_size = read_u32(in);
    if (!in) break;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      info.format = read_u16(in);
      info.channels = read_u16(in);
      info.sample_rate = read_u32(in);
      read_u32(in);  // byte rate
      read_u16(in);  // block align
      info.bits = read_u16(in);
      have_fmt = true;
      if (chunk_size > 16) in.seekg(chunk_size - 16, std::ios::cur);
    } else if (std::memcmp(id, "data", 4) == 0) {
      info.data_offset = in.tellg();
      info.data_size = chunk_size;
      in.seekg(chunk_size, std::ios::cur);
    } else {
      in.seekg(chunk_size, std::ios::cur);
    }
    if (chunk_size % 2 == 1) in.seekg(1, std::ios::cur);  // pad byte
  }
  in.clear();

  if (!have_fmt) throw std::runtime_error("missing fmt chunk: " + path);
  if (info.format != 1)
    throw std::runtime_error("unsupported WAV encoding (PCM only): " + path);
  if (info.bits != 8 && info.bits != 16)
    throw std::runtime_error("unsupported bit depth (8/16 only): " + path);
  if (info.channels == 0 || info.sample_rate == 0)
    throw std::runtime_error("malformed fmt chunk: " + path);
  if (info.data_size == 0) throw std::runtime_error("zero-length audio: " + path);
  return info;
}

}  // namespace

AudioRecording load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open WAV file: " + path);
  WavInfo info = parse_header(in, path);

  size_t bytes_per_sample = info.bits / 8;
  size_t frame_bytes = bytes_per_sample * info.channels;
  size_t n_frames = info.data_size / frame_bytes;
  if (n_frames == 0) throw std::runtime_error("zero-length audio: " + path);

  std::vector<char> raw(size_t(info.data_size));
  in.seekg(info.data_offset);
  in.read(raw.data(), std::streamsize(info.data_size));
  if (size_t(in.gcount()) < n_frames * frame_bytes)
    throw std::runtime_error("truncated data chunk: " + path);

  AudioRecording rec;
  rec.sample_rate = int(info.sample_rate);
  rec.recording_id = std::filesystem::path(path).stem().string();
  rec.samples.resize(n_frames);

  const unsigned char* p = reinterpret_cast<const unsigned char*>(raw.data());
  double ch_scale = 1.0 / info.channels;
  for (size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (unsigned c = 0; c < info.channels; ++c) {
      if (info.bits == 16) {
        int16_t v = int16_t(uint16_t(p[0]) | uint16_t(uint32_t(p[1]) << 8));
        acc += double(v) / 32768.0;
        p += 2;
      } else {
        acc += (double(*p) - 128.0) / 128.0;
        p += 1;
      }
    }
    rec.samples[i] = acc * ch_scale;
  }
  return rec;
}

double wav_duration_seconds(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open WAV file: " + path);
  WavInfo info = parse_header(in, path);
  size_t frame_bytes = size_t(info.bits / 8) * info.channels;
  return double(info.data_size / frame_bytes) / info.sample_rate;
}

void save_wav(const std::string& path, const std::vector<double>& samples, int sample_rate) {
  if (sample_rate <= 0) throw std::runtime_error("save_wav: sample_rate must be > 0");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write WAV file: " + path);

  uint32_t data_size = uint32_t(samples.size() * 2);
  auto put_u32 = [&out](uint32_t v) {
    char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff), char((v >> 24) & 0xff)};
    out.write(b, 4);
  };
  auto put_u16 = [&out](uint16_t v) {
    char b[2] = {char(v & 0xff), char((v >> 8) & 0xff)};
    out.write(b, 2);
  };

  out.write("RIFF", 4);
  put_u32(36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(uint32_t(sample_rate));
  put_u32(uint32_t(sample_rate) * 2);
  put_u16(2);
  put_u16(16);
  out.write("data", 4);
  put_u32(data_size);
  for (double s : samples) {
    // Same 1/32768 step the reader uses, so a round trip stays within
    // half an LSB (full-scale +1.0 clips to 32767).
    double clipped = std::clamp(s, -1.0, 1.0);
    int v = std::clamp(int(std::lround(clipped * 32768.0)), -32768, 32767);
    put_u16(uint16_t(int16_t(v)));
  }
  if (!out) throw std::runtime_error("short write: " + path);
}

}  // namespace prosodid
