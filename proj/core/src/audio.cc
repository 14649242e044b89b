// core/src/audio.cc
//
// Copyright 2026 The Comedic Authors. All Rights Reserved.
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

#include "comedic/audio.h"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "comedic/error.h"
#include "comedic/parameters.h"

namespace comedic {
namespace {

template <typename T>
T read_le(const unsigned char *p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

void put_u32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u16(std::string &out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

std::vector<double> hann(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    w[static_cast<std::size_t>(i)] =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

void check_config(const FeatureConfig &cfg) {
  if (cfg.sample_rate <= 0 || cfg.hop_length <= 0 || cfg.win_length <= 0 ||
      cfg.n_fft < cfg.win_length || cfg.mel_bins <= 0)
    throw ConfigError("feature config: inconsistent STFT settings");
}

}  // namespace

Waveform read_wav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open wav " + path);
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0)
    throw IoError(path + ": not a RIFF/WAVE file");
  std::size_t pos = 12;
  int channels = 0, bits = 0, format = 0;
  Waveform wave;
  bool have_fmt = false;
  while (pos + 8 <= data.size()) {
    std::uint32_t size = read_le<std::uint32_t>(&data[pos + 4]);
    const unsigned char *body = &data[pos + 8];
    if (pos + 8 + size > data.size()) throw IoError(path + ": truncated chunk");
    if (std::memcmp(&data[pos], "fmt ", 4) == 0) {
      format = read_le<std::uint16_t>(body);
      channels = read_le<std::uint16_t>(body + 2);
      wave.sample_rate = static_cast<int>(read_le<std::uint32_t>(body + 4));
      bits = read_le<std::uint16_t>(body + 14);
      have_fmt = true;
    } else if (std::memcmp(&data[pos], "data", 4) == 0) {
      if (!have_fmt) throw IoError(path + ": data chunk before fmt chunk");
      if (channels <= 0) throw IoError(path + ": zero channels");
      const bool pcm16 = format == 1 && bits == 16;
      const bool float32 = format == 3 && bits == 32;
      if (!pcm16 && !float32)
        throw IoError(path + ": only PCM16 and float32 wav are supported");
      const std::size_t width = static_cast<std::size_t>(bits / 8);
      const std::size_t frames = size / (width * static_cast<std::size_t>(channels));
      wave.samples.resize(frames);
      for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (int c = 0; c < channels; ++c) {
          const unsigned char *p =
              body + (f * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c)) * width;
          acc += pcm16 ? read_le<std::int16_t>(p) / 32768.0
                       : static_cast<double>(read_le<float>(p));
        }
        wave.samples[f] = acc / channels;
      }
      return wave;
    }
    pos += 8 + size + (size & 1);
  }
  throw IoError(path + ": no data chunk");
}

void write_wav(const std::string &path, const Waveform &wave) {
  std::string out;
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(wave.samples.size() * 2);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(wave.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(wave.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (double s : wave.samples) {
    const long q = std::lround(std::clamp(s, -1.0, 1.0) * 32768.0);
    auto v = static_cast<std::int16_t>(std::clamp(q, -32768L, 32767L));
    put_u16(out, static_cast<std::uint16_t>(v));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write wav " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

int frame_count(std::size_t samples, const FeatureConfig &cfg) {
  return static_cast<int>(samples / static_cast<std::size_t>(cfg.hop_length));
}

ComplexMatrix stft(const std::vector<double> &samples, const FeatureConfig &cfg) {
  check_config(cfg);
  const int frames = frame_count(samples.size(), cfg);
  const int bins = cfg.n_fft / 2 + 1;
  const auto window = hann(cfg.win_length);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  ComplexMatrix spec(frames, bins);
  std::vector<double> buf(static_cast<std::size_t>(cfg.n_fft));
  std::vector<std::complex<double>> out;
  const long n = static_cast<long>(samples.size());
  for (int t = 0; t < frames; ++t) {
    std::fill(buf.begin(), buf.end(), 0.0);
    const long start = static_cast<long>(t) * cfg.hop_length +
                       cfg.hop_length / 2 - cfg.win_length / 2;
    for (int i = 0; i < cfg.win_length; ++i) {
      const long s = start + i;
      if (s < 0 || s >= n) continue;
      buf[static_cast<std::size_t>(i)] =
          samples[static_cast<std::size_t>(s)] * window[static_cast<std::size_t>(i)];
    }
    fft.fwd(out, buf);
    for (int k = 0; k < bins; ++k) spec(t, k) = out[static_cast<std::size_t>(k)];
  }
  return spec;
}

std::vector<double> istft(const ComplexMatrix &spec, const FeatureConfig &cfg) {
  check_config(cfg);
  const int frames = static_cast<int>(spec.rows());
  const long n = static_cast<long>(frames) * cfg.hop_length;
  const auto window = hann(cfg.win_length);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  std::vector<double> norm(static_cast<std::size_t>(n), 0.0);
  std::vector<std::complex<double>> half(static_cast<std::size_t>(spec.cols()));
  std::vector<double> frame;
  for (int t = 0; t < frames; ++t) {
    for (Eigen::Index k = 0; k < spec.cols(); ++k)
      half[static_cast<std::size_t>(k)] = spec(t, k);
    fft.inv(frame, half, cfg.n_fft);
    const long start = static_cast<long>(t) * cfg.hop_length +
                       cfg.hop_length / 2 - cfg.win_length / 2;
    for (int i = 0; i < cfg.win_length; ++i) {
      const long s = start + i;
      if (s < 0 || s >= n) continue;
      const double w = window[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(s)] += frame[static_cast<std::size_t>(i)] * w;
      norm[static_cast<std::size_t>(s)] += w * w;
    }
  }
  for (long s = 0; s < n; ++s)
    if (norm[static_cast<std::size_t>(s)] > 1e-8)
      out[static_cast<std::size_t>(s)] /= norm[static_cast<std::size_t>(s)];
  return out;
}

Matrix mel_filterbank(const FeatureConfig &cfg) {
  check_config(cfg);
  const int bins = cfg.n_fft / 2 + 1;
  const double fmax = std::min(cfg.fmax, cfg.sample_rate / 2.0);
  const double mel_lo = hz_to_mel(cfg.fmin), mel_hi = hz_to_mel(fmax);
  std::vector<double> edges(static_cast<std::size_t>(cfg.mel_bins + 2));
  for (int i = 0; i < cfg.mel_bins + 2; ++i)
    edges[static_cast<std::size_t>(i)] =
        mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (cfg.mel_bins + 1));
  Matrix fb = Matrix::Zero(cfg.mel_bins, bins);
  for (int m = 0; m < cfg.mel_bins; ++m) {
    const double lo = edges[static_cast<std::size_t>(m)];
    const double mid = edges[static_cast<std::size_t>(m) + 1];
    const double hi = edges[static_cast<std::size_t>(m) + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate / cfg.n_fft;
      double w = 0.0;
      if (f > lo && f <= mid) w = (f - lo) / (mid - lo);
      else if (f > mid && f < hi) w = (hi - f) / (hi - mid);
      fb(m, k) = w;
    }
  }
  return fb;
}

double estimate_pitch(const double *frame, int length, const FeatureConfig &cfg) {
  double mean = 0.0;
  for (int i = 0; i < length; ++i) mean += frame[i];
  mean /= length;
  std::vector<double> x(static_cast<std::size_t>(length));
  double energy = 0.0;
  for (int i = 0; i < length; ++i) {
    x[static_cast<std::size_t>(i)] = frame[i] - mean;
    energy += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
  }
  if (std::sqrt(energy / length) < cfg.silence_rms) return 0.0;
  const int min_lag = std::max(2, static_cast<int>(cfg.sample_rate / cfg.pitch_max_hz));
  const int max_lag = std::min(length - 2, static_cast<int>(cfg.sample_rate / cfg.pitch_min_hz));
  if (max_lag <= min_lag) return 0.0;
  std::vector<double> r(static_cast<std::size_t>(max_lag + 2), 0.0);
  for (int lag = min_lag - 1; lag <= max_lag + 1; ++lag) {
    double num = 0.0, e0 = 0.0, e1 = 0.0;
    for (int i = 0; i + lag < length; ++i) {
      const double a = x[static_cast<std::size_t>(i)];
      const double b = x[static_cast<std::size_t>(i + lag)];
      num += a * b;
      e0 += a * a;
      e1 += b * b;
    }
    r[static_cast<std::size_t>(lag)] = e0 > 0 && e1 > 0 ? num / std::sqrt(e0 * e1) : 0.0;
  }
  auto is_peak = [&](int lag) {
    const double v = r[static_cast<std::size_t>(lag)];
    return v >= r[static_cast<std::size_t>(lag - 1)] && v >= r[static_cast<std::size_t>(lag + 1)];
  };
  double top = cfg.voicing_threshold;
  bool voiced = false;
  for (int lag = min_lag; lag <= max_lag; ++lag)
    if (is_peak(lag) && r[static_cast<std::size_t>(lag)] > top) {
      top = r[static_cast<std::size_t>(lag)];
      voiced = true;
    }
  if (!voiced) return 0.0;
  // shortest lag within 10% of the strongest peak
  int best = -1;
  for (int lag = min_lag; lag <= max_lag && best < 0; ++lag)
    if (is_peak(lag) && r[static_cast<std::size_t>(lag)] >= 0.9 * top) best = lag;
  // Parabolic refinement of the peak.
  const double a = r[static_cast<std::size_t>(best - 1)];
  const double b = r[static_cast<std::size_t>(best)];
  const double c = r[static_cast<std::size_t>(best + 1)];
  const double denom = a - 2.0 * b + c;
  double shift = std::abs(denom) > 1e-12 ? 0.5 * (a - c) / denom : 0.0;
  shift = std::clamp(shift, -0.5, 0.5);
  return cfg.sample_rate / (best + shift);
}

FrameFeatures extract_features(const Waveform &wave, const FeatureConfig &cfg) {
  if (wave.sample_rate != cfg.sample_rate)
    throw InputError("waveform sample rate " + std::to_string(wave.sample_rate) +
                     " does not match feature config " +
                     std::to_string(cfg.sample_rate));
  const ComplexMatrix spec = stft(wave.samples, cfg);
  const Matrix magnitude = spec.cwiseAbs();
  const Matrix fb = mel_filterbank(cfg);
  FrameFeatures out;
  out.log_mel = (magnitude * fb.transpose()).cwiseMax(cfg.log_floor).array().log().matrix();
  const int frames = static_cast<int>(spec.rows());
  out.energy.resize(static_cast<std::size_t>(frames));
  out.pitch.resize(static_cast<std::size_t>(frames));
  std::vector<double> buf(static_cast<std::size_t>(cfg.win_length));
  const long n = static_cast<long>(wave.samples.size());
  for (int t = 0; t < frames; ++t) {
    out.energy[static_cast<std::size_t>(t)] = magnitude.row(t).norm();
    const long start = static_cast<long>(t) * cfg.hop_length +
                       cfg.hop_length / 2 - cfg.win_length / 2;
    for (int i = 0; i < cfg.win_length; ++i) {
      const long s = start + i;
      buf[static_cast<std::size_t>(i)] =
          s >= 0 && s < n ? wave.samples[static_cast<std::size_t>(s)] : 0.0;
    }
    out.pitch[static_cast<std::size_t>(t)] = estimate_pitch(buf.data(), cfg.win_length, cfg);
  }
  return out;
}

Waveform griffin_lim(const Matrix &log_mel, const FeatureConfig &cfg,
                     int iterations, std::uint64_t seed) {
  if (log_mel.cols() != cfg.mel_bins)
    throw InputError("griffin_lim: mel has " + std::to_string(log_mel.cols()) +
                     " bins, config expects " + std::to_string(cfg.mel_bins));
  const Matrix fb = mel_filterbank(cfg);
  const Matrix pinv = fb.completeOrthogonalDecomposition().pseudoInverse();
  const Matrix mel = log_mel.array().exp().matrix();
  const Matrix magnitude = (mel * pinv.transpose()).cwiseMax(0.0);

  Rng rng(seed);
  ComplexMatrix phase(magnitude.rows(), magnitude.cols());
  for (Eigen::Index t = 0; t < phase.rows(); ++t)
    for (Eigen::Index k = 0; k < phase.cols(); ++k)
      phase(t, k) = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());

  constexpr double kMomentum = 0.99;
  ComplexMatrix previous = ComplexMatrix::Zero(phase.rows(), phase.cols());
  std::vector<double> samples;
  for (int it = 0; it < iterations; ++it) {
    ComplexMatrix current = magnitude.cast<std::complex<double>>().cwiseProduct(phase);
    samples = istft(current, cfg);
    ComplexMatrix rebuilt = stft(samples, cfg);
    ComplexMatrix accelerated = rebuilt - (kMomentum / (1.0 + kMomentum)) * previous;
    previous = rebuilt;
    for (Eigen::Index t = 0; t < phase.rows(); ++t)
      for (Eigen::Index k = 0; k < phase.cols(); ++k) {
        const double a = std::abs(accelerated(t, k));
        phase(t, k) = a > 1e-12 ? accelerated(t, k) / a : std::complex<double>(1.0, 0.0);
      }
  }
  ComplexMatrix final_spec = magnitude.cast<std::complex<double>>().cwiseProduct(phase);
  Waveform wave;
  wave.sample_rate = cfg.sample_rate;
  wave.samples = istft(final_spec, cfg);
  return wave;
}

}  // namespace comedic
