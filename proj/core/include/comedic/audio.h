// core/include/comedic/audio.h
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

#pragma once

// Waveform I/O and the signal-processing front/back end: STFT, HTK mel
// filterbank, frame energy and autocorrelation pitch, and Griffin-Lim phase
// reconstruction through a pseudo-inverse mel basis.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "comedic/autodiff.h"

namespace comedic {

struct FeatureConfig {
  int sample_rate = 22050;
  int n_fft = 1024;
  int win_length = 1024;
  int hop_length = 256;
  int mel_bins = 80;
  double fmin = 0.0;
  double fmax = 8000.0;
  double log_floor = 1e-5;
  double pitch_min_hz = 60.0;
  double pitch_max_hz = 500.0;
  /// Normalised autocorrelation peak required to call a frame voiced.
  double voicing_threshold = 0.5;
  /// Frames whose RMS is below this are never voiced.
  double silence_rms = 1e-3;
};

struct Waveform {
  int sample_rate = 0;
  std::vector<double> samples;  // mono, nominally [-1, 1]
};

/// RIFF/WAVE, PCM 16-bit or IEEE float 32-bit; multi-channel input is
/// averaged to mono.
Waveform read_wav(const std::string &path);
/// Mono PCM 16-bit with clipping.
void write_wav(const std::string &path, const Waveform &wave);

using ComplexMatrix =
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;

/// Frames = samples / hop. Frame t is a Hann window centred at
/// t * hop + hop / 2, zero padded at the edges.
int frame_count(std::size_t samples, const FeatureConfig &cfg);
ComplexMatrix stft(const std::vector<double> &samples, const FeatureConfig &cfg);
/// Weighted overlap-add inverse of stft(); returns frames * hop samples.
std::vector<double> istft(const ComplexMatrix &spec, const FeatureConfig &cfg);

/// (mel_bins x n_fft/2+1) triangular filters on the HTK mel scale.
Matrix mel_filterbank(const FeatureConfig &cfg);

struct FrameFeatures {
  Matrix log_mel;              // frames x mel_bins
  std::vector<double> energy;  // L2 norm of each magnitude frame
  std::vector<double> pitch;   // Hz, 0 for unvoiced frames
};

FrameFeatures extract_features(const Waveform &wave, const FeatureConfig &cfg);

/// Normalised-autocorrelation F0 of one frame; 0 if unvoiced.
double estimate_pitch(const double *frame, int length, const FeatureConfig &cfg);

/// Mel (log) -> waveform. `iterations` rounds of fast Griffin-Lim with
/// momentum, starting from phases drawn from `seed`.
Waveform griffin_lim(const Matrix &log_mel, const FeatureConfig &cfg,
                     int iterations, std::uint64_t seed);

}  // namespace comedic
