// benchmarks/comedic_bench.cc
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

#include <benchmark/benchmark.h>

#include <cmath>
#include <numeric>

#include "comedic/acoustic_model.h"
#include "comedic/audio.h"
#include "comedic/losses.h"
#include "comedic/phoneme_frontend.h"

namespace comedic {
namespace {

Matrix noise(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1, 1);
  return m;
}

ModelInput input_for(const ModelConfig &cfg, int phones) {
  Rng rng(3);
  ModelInput in;
  for (int i = 0; i < phones; ++i) {
    in.ids.push_back(static_cast<int>(rng.index(static_cast<std::size_t>(cfg.symbol_count))));
    in.target_durations.push_back(4 + static_cast<int>(rng.index(6)));
    in.target_pitch.push_back(rng.uniform(-1, 1));
    in.target_energy.push_back(rng.uniform(-1, 1));
  }
  in.reference_mel = noise(200, cfg.mel_bins, 4);
  return in;
}

void BM_Stft(benchmark::State &state) {
  FeatureConfig cfg;
  Rng rng(1);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (auto &v : x) v = rng.uniform(-1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(stft(x, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Stft)->Arg(22050)->Arg(5 * 22050);

void BM_ExtractFeatures(benchmark::State &state) {
  FeatureConfig cfg;
  Waveform w{cfg.sample_rate, std::vector<double>(static_cast<std::size_t>(2 * cfg.sample_rate))};
  for (std::size_t i = 0; i < w.samples.size(); ++i)
    w.samples[i] = 0.3 * std::sin(2 * 3.14159265358979 * 180.0 * static_cast<double>(i) / cfg.sample_rate);
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(w, cfg));
}
BENCHMARK(BM_ExtractFeatures)->Unit(benchmark::kMillisecond);

void BM_ReplaceFillers(benchmark::State &state) {
  FillerRegistry reg({{"B", split_labels("n i3 zh ii1 d ao4 b a5"), "<spc1>"}});
  LabelSequence seq;
  for (int i = 0; i < state.range(0); ++i) {
    seq.push_back("h");
    seq.push_back("ao3");
    if (i % 10 == 0)
      for (const auto &l : split_labels("n i3 zh ii1 d ao4 b a5")) seq.push_back(l);
  }
  for (auto _ : state) benchmark::DoNotOptimize(replace_fillers(seq, "B", reg));
}
BENCHMARK(BM_ReplaceFillers)->Arg(100)->Arg(1000);

void BM_LengthRegulate(benchmark::State &state) {
  Matrix h = noise(state.range(0), 64, 2);
  std::vector<int> d(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(length_regulate(h, d));
}
BENCHMARK(BM_LengthRegulate)->Arg(50)->Arg(400);

void BM_ForwardInfer(benchmark::State &state) {
  ModelConfig cfg = desk_model();
  cfg.symbol_count = 120;
  AcousticModel model = AcousticModel::initialize(cfg, 1);
  ModelInput in = input_for(cfg, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(model.run(in, Mode::kInfer));
}
BENCHMARK(BM_ForwardInfer)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State &state) {
  ModelConfig cfg = desk_model();
  cfg.symbol_count = 120;
  AcousticModel model = AcousticModel::initialize(cfg, 1);
  ModelInput in = input_for(cfg, static_cast<int>(state.range(0)));
  LossTargets t;
  t.mel = noise(std::accumulate(in.target_durations.begin(), in.target_durations.end(), 0), cfg.mel_bins, 5);
  t.durations.assign(in.target_durations.begin(), in.target_durations.end());
  t.pitch = in.target_pitch;
  t.energy = in.target_energy;
  LossConfig lc;
  for (auto _ : state) {
    Graph g(model.parameters(), true);
    g.backward(total_loss(g, model.forward(g, in, Mode::kTrain), t, lc));
    benchmark::DoNotOptimize(g.gradients());
  }
}
BENCHMARK(BM_TrainStep)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_GriffinLim(benchmark::State &state) {
  FeatureConfig cfg;
  Matrix mel = noise(86, cfg.mel_bins, 6).array() - 4.0;
  for (auto _ : state) benchmark::DoNotOptimize(griffin_lim(mel, cfg, static_cast<int>(state.range(0)), 1));
}
BENCHMARK(BM_GriffinLim)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace comedic

BENCHMARK_MAIN();
