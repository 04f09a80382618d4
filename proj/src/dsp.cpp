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

#include "prosodid/dsp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "prosodid/common.hpp"
#include "prosodid/fft.hpp"

namespace prosodid {

namespace {

std::vector<double> hann_window(size_t n) {
  std::vector<double> w(n);
  for (size_t i = 0; i < n; ++i) w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * double(i) / double(n)));
  return w;
}

std::vector<double> hamming_window(size_t n) {
  std::vector<double> w(n);
  for (size_t i = 0; i < n; ++i)
    w[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * double(i) / double(n - 1));
  return w;
}

double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  double half = x / 2.0;
  for (int k = 1; k < 64; ++k) {
    term *= (half / k) * (half / k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

}  // namespace

AudioRecording denoise(const AudioRecording& rec, const DenoiseConfig& cfg) {
  if (rec.sample_rate <= 0) throw std::runtime_error("denoise: invalid sample rate");
  const size_t n = rec.samples.size();
  if (double(n) < rec.sample_rate)
    throw std::runtime_error("denoise: recording shorter than 1 s, no noise estimate possible");

  const size_t nfft = next_pow2(size_t(std::lround(0.025 * rec.sample_rate)));
  const size_t hop = nfft / 2;
  // One extra leading frame (start offset -hop) so even the first hop of
  // samples is covered by two overlapping windows; otherwise the head is
  // reconstructed from a lone window edge where the weights vanish.
  const size_t n_frames = (n + hop - 1) / hop + 1;
  const size_t n_bins = nfft / 2 + 1;
  const std::vector<double> win = hann_window(nfft);

  // analysis pass: one-sided magnitudes + full complex spectra per frame
  std::vector<std::vector<std::complex<double>>> spectra(n_frames);
  std::vector<std::vector<double>> mag(n_frames, std::vector<double>(n_bins));
  std::vector<double> frame_pow(n_frames, 0.0);
  std::vector<std::complex<double>> buf(nfft);
  for (size_t f = 0; f < n_frames; ++f) {
    long s = long(f) * long(hop) - long(hop);
    for (size_t i = 0; i < nfft; ++i) {
      long idx = s + long(i);
      double v = (idx >= 0 && idx < long(n)) ? rec.samples[size_t(idx)] : 0.0;
      buf[i] = v * win[i];
    }
    fft(buf);
    spectra[f] = buf;
    double p = 0.0;
    for (size_t k = 0; k < n_bins; ++k) {
      double m = std::abs(buf[k]);
      mag[f][k] = m;
      p += m * m;
    }
    frame_pow[f] = p;
  }

  // noise profile from the lowest-energy fraction of frames
  std::vector<size_t> order(n_frames);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&frame_pow](size_t a, size_t b) { return frame_pow[a] < frame_pow[b]; });
  size_t n_noise = std::max<size_t>(1, size_t(cfg.noise_quantile * double(n_frames)));
  std::vector<double> noise_mag(n_bins, 0.0);
  double noise_pow = 0.0;
  for (size_t i = 0; i < n_noise; ++i) {
    for (size_t k = 0; k < n_bins; ++k) noise_mag[k] += mag[order[i]][k];
    noise_pow += frame_pow[order[i]];
  }
  for (auto& v : noise_mag) v /= double(n_noise);
  noise_pow /= double(n_noise);

  // subtraction with magnitudes averaged over 5 frames; frames whose energy
  // stays near the noise level are forced to the spectral floor outright
  std::vector<double> out(n, 0.0), norm(n, 0.0);
  const double alpha = cfg.over_subtraction;
  const double beta = cfg.spectral_floor;
  const double gate = cfg.gate_factor * noise_pow;
  for (size_t f = 0; f < n_frames; ++f) {
    std::vector<std::complex<double>>& spec = spectra[f];
    if (frame_pow[f] <= gate) {
      for (auto& c : spec) c *= beta;
    } else {
      size_t lo = f >= 2 ? f - 2 : 0;
      size_t hi = std::min(f + 2, n_frames - 1);
      for (size_t k = 0; k < n_bins; ++k) {
        double avg = 0.0;
        for (size_t j = lo; j <= hi; ++j) avg += mag[j][k];
        avg /= double(hi - lo + 1);
        double gain = avg > 0.0 ? std::max(avg - alpha * noise_mag[k], beta * avg) / avg : beta;
        spec[k] *= gain;
        if (k > 0 && k < nfft - k) spec[nfft - k] *= gain;
      }
    }
    fft(spec, true);
    long s = long(f) * long(hop) - long(hop);
    for (size_t i = 0; i < nfft; ++i) {
      long idx = s + long(i);
      if (idx < 0 || idx >= long(n)) continue;
      out[size_t(idx)] += spec[i].real() * win[i];
      norm[size_t(idx)] += win[i] * win[i];
    }
  }

  AudioRecording result = rec;
  for (size_t i = 0; i < n; ++i) result.samples[i] = norm[i] > 1e-12 ? out[i] / norm[i] : 0.0;
  return result;
}

AudioRecording level_normalize(const AudioRecording& rec) {
  double peak = 0.0;
  for (double s : rec.samples) peak = std::max(peak, std::abs(s));
  AudioRecording result = rec;
  if (peak <= 0.0) return result;
  double scale = 0.95 / peak;
  for (auto& s : result.samples) s *= scale;
  return result;
}

AudioRecording resample(const AudioRecording& rec, int target_rate) {
  if (target_rate <= 0) throw std::runtime_error("resample: invalid target rate");
  if (rec.sample_rate < target_rate)
    throw std::runtime_error("resample: upsampling is out of contract (" +
                             std::to_string(rec.sample_rate) + " -> " +
                             std::to_string(target_rate) + ")");
  if (rec.sample_rate == target_rate) return rec;

  const double fs = rec.sample_rate;
  const size_t n_in = rec.samples.size();
  const size_t n_out = size_t(std::llround(double(n_in) * target_rate / fs));

  // Kaiser-windowed sinc. The -6 dB point sits between the 0.45*target
  // passband edge and a stopband edge just below the new Nyquist, with the
  // transition width chosen for ~60 dB stopband attenuation.
  const double cutoff = 0.46875 * target_rate / fs;   // cycles per input sample
  const double trans = 0.0375 * target_rate / fs;
  const double atten_db = 60.0;
  const double kaiser_beta = 0.1102 * (atten_db - 8.7);
  const int half_taps = int(std::ceil((atten_db - 8.0) / (2.285 * 2.0 * M_PI * trans) / 2.0)) + 1;
  const double i0_beta = bessel_i0(kaiser_beta);

  AudioRecording result = rec;
  result.sample_rate = target_rate;
  result.samples.assign(n_out, 0.0);
  const double step = fs / target_rate;
  for (size_t m = 0; m < n_out; ++m) {
    double p = double(m) * step;
    long k_lo = long(std::ceil(p - half_taps));
    long k_hi = long(std::floor(p + half_taps));
    double acc = 0.0, ksum = 0.0;
    for (long k = k_lo; k <= k_hi; ++k) {
      double u = p - double(k);
      double t = u / half_taps;
      if (t <= -1.0 || t >= 1.0) continue;
      double s = (u == 0.0) ? 2.0 * cutoff
                            : std::sin(2.0 * M_PI * cutoff * u) / (M_PI * u);
      double w = bessel_i0(kaiser_beta * std::sqrt(1.0 - t * t)) / i0_beta;
      double h = s * w;
      ksum += h;
      if (k >= 0 && size_t(k) < n_in) acc += rec.samples[size_t(k)] * h;
    }
    result.samples[m] = ksum > 0.0 ? acc / ksum : 0.0;
  }
  return result;
}

std::vector<double> frame_energy(const AudioRecording& rec, const FrameSpec& spec) {
  spec.validate();
  if (rec.sample_rate != spec.sample_rate)
    throw std::runtime_error("frame_energy: recording not at the analysis rate");
  const long n = long(rec.samples.size());
  const long w = spec.window_samples();
  const long hop = spec.hop_samples();
  const long lo = w / 2;
  const size_t n_frames = spec.frame_count(rec.samples.size());

  std::vector<double> en(n_frames, 0.0);
  for (size_t f = 0; f < n_frames; ++f) {
    long center = long(f) * hop;
    double acc = 0.0;
    for (long tau = -lo; tau < w - lo; ++tau) {
      long idx = center + tau;
      if (idx < 0 || idx >= n) continue;  // edges zero-padded
      double v = rec.samples[size_t(idx)];
      acc += v * v;
    }
    en[f] = acc;
  }
  return en;
}

std::vector<double> spectral_tilt(const AudioRecording& rec, const FrameSpec& spec,
                                  int n_mels, int n_fft) {
  spec.validate();
  if (rec.sample_rate != spec.sample_rate)
    throw std::runtime_error("spectral_tilt: recording not at the analysis rate");
  const long w = spec.window_samples();
  if (w > n_fft) throw std::runtime_error("spectral_tilt: window longer than FFT size");
  const long n = long(rec.samples.size());
  const long hop = spec.hop_samples();
  const long lo = w / 2;
  const size_t n_frames = spec.frame_count(rec.samples.size());
  const size_t n_bins = size_t(n_fft) / 2 + 1;
  const std::vector<double> win = hamming_window(size_t(w));

  // unit-area triangular mel filters over 0..fs/2, so a flat spectrum gives
  // equal filter outputs and therefore C1 = 0
  auto hz_to_mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto mel_to_hz = [](double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); };
  const double mel_max = hz_to_mel(spec.sample_rate / 2.0);
  std::vector<double> edges(size_t(n_mels) + 2);
  for (size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(mel_max * double(i) / double(n_mels + 1));
  std::vector<std::vector<double>> filters(size_t(n_mels), std::vector<double>(n_bins, 0.0));
  for (int m = 0; m < n_mels; ++m) {
    double fl = edges[size_t(m)], fc = edges[size_t(m) + 1], fr = edges[size_t(m) + 2];
    double sum = 0.0;
    for (size_t k = 0; k < n_bins; ++k) {
      double f = double(k) * spec.sample_rate / n_fft;
      double v = 0.0;
      if (f > fl && f < fc) v = (f - fl) / (fc - fl);
      else if (f >= fc && f < fr) v = (fr - f) / (fr - fc);
      filters[size_t(m)][k] = v;
      sum += v;
    }
    if (sum > 0.0)
      for (auto& v : filters[size_t(m)]) v /= sum;
  }

  std::vector<double> c1(n_frames, 0.0);
  std::vector<std::complex<double>> buf(static_cast<size_t>(n_fft));
  const double dct_scale = M_PI / double(n_mels);
  for (size_t f = 0; f < n_frames; ++f) {
    long center = long(f) * hop;
    std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
    double frame_pow = 0.0;
    for (long tau = -lo; tau < w - lo; ++tau) {
      long idx = center + tau;
      double v = (idx >= 0 && idx < n) ? rec.samples[size_t(idx)] : 0.0;
      buf[size_t(tau + lo)] = v * win[size_t(tau + lo)];
      frame_pow += v * v;
    }
    // A silent frame has no tilt; skip the transform instead of taking the
    // DCT of a constant log floor, which would leave rounding residue.
    if (frame_pow == 0.0) {
      c1[f] = 0.0;
      continue;
    }
    fft(buf);
    double acc = 0.0;
    for (int m = 0; m < n_mels; ++m) {
      double e = 0.0;
      const auto& filt = filters[size_t(m)];
      for (size_t k = 0; k < n_bins; ++k) {
        if (filt[k] == 0.0) continue;
        e += filt[k] * std::norm(buf[k]);
      }
      acc += floored_log(e) * std::cos(dct_scale * (double(m) + 0.5));
    }
    c1[f] = acc;
  }
  return c1;
}

AudioRecording preprocess(const AudioRecording& rec, const FrameSpec& spec,
                          const DenoiseConfig& dn) {
  AudioRecording a = denoise(rec, dn);
  a = level_normalize(a);
  return resample(a, spec.sample_rate);
}

ProsodicTrack analyze_preprocessed(const AudioRecording& pre, const FrameSpec& spec,
                                   const PitchConfig& pitch) {
  if (pre.sample_rate != spec.sample_rate)
    throw std::runtime_error("analyze_preprocessed: audio is not at the analysis rate");
  ProsodicTrack track;
  track.recording_id = pre.recording_id;
  track.energy = frame_energy(pre, spec);
  track.tilt = spectral_tilt(pre, spec);
  PitchResult pr = track_f0(pre, spec, pitch);
  track.f0 = std::move(pr.f0);
  track.voiced = std::move(pr.voiced);
  size_t n_frames = track.energy.size();
  track.frame_times.resize(n_frames);
  for (size_t f = 0; f < n_frames; ++f)
    track.frame_times[f] = double(f) * spec.hop_samples() / spec.sample_rate;
  track.check_aligned();
  return track;
}

ProsodicTrack extract_tracks(const AudioRecording& rec, const FrameSpec& spec,
                             const PitchConfig& pitch, const DenoiseConfig& dn) {
  return analyze_preprocessed(preprocess(rec, spec, dn), spec, pitch);
}

void save_track_csv(const std::string& path, const ProsodicTrack& track) {
  track.check_aligned();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write track file: " + path);
  out << "frame_time,energy,f0,voiced,tilt\n";
  for (size_t i = 0; i < track.size(); ++i) {
    out << format_double(track.frame_times[i]) << ',' << format_double(track.energy[i]) << ','
        << format_double(track.f0[i]) << ',' << int(track.voiced[i]) << ','
        << format_double(track.tilt[i]) << '\n';
  }
  if (!out) throw std::runtime_error("short write: " + path);
}

ProsodicTrack load_track_csv(const std::string& path, const std::string& recording_id) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read track file: " + path);
  ProsodicTrack track;
  track.recording_id = recording_id;
  std::string line;
  if (!std::getline(in, line) || line != "frame_time,energy,f0,voiced,tilt")
    throw std::runtime_error("bad track file header: " + path);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string, 5> fields;
    size_t pos = 0;
    for (int i = 0; i < 5; ++i) {
      size_t comma = line.find(',', pos);
      if (comma == std::string::npos && i < 4)
        throw std::runtime_error("bad track file row: " + path);
      fields[size_t(i)] = line.substr(pos, comma == std::string::npos ? comma : comma - pos);
      pos = comma + 1;
    }
    track.frame_times.push_back(parse_double(fields[0]));
    track.energy.push_back(parse_double(fields[1]));
    track.f0.push_back(parse_double(fields[2]));
    track.voiced.push_back(uint8_t(std::stoi(fields[3])));
    track.tilt.push_back(parse_double(fields[4]));
  }
  track.check_aligned();
  return track;
}

}  // namespace prosodid
