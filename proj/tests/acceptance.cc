// tests/acceptance.cc
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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "comedic/acoustic_model.h"
#include "comedic/checkpoint.h"
#include "comedic/conditioning.h"
#include "comedic/corpus.h"
#include "comedic/fixture.h"
#include "comedic/losses.h"
#include "comedic/phoneme_frontend.h"
#include "comedic/prosody_encoder.h"
#include "comedic/trainer.h"
#include "fixture_data.h"
#include "testing.h"

namespace comedic {
namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string &what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double max_abs(const Matrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// 1 ------------------------------------------------------------------------

Outcome words_per_second() {
  struct Row {
    const char *speaker;
    int clips;
    double seconds;
    long words;
    double wps;
  };
  const Row rows[] = {{"A", 120, 505, 3357, 6.65},
                      {"B", 140, 622, 3824, 6.15},
                      {"C", 120, 626, 2116, 3.38},
                      {"D", 120, 587, 2891, 4.93}};
  std::vector<UtteranceRecord> records;
  std::map<std::string, UtteranceAlignment> alignments;
  for (const Row &r : rows) {
    for (int i = 0; i < r.clips; ++i) {
      UtteranceRecord rec;
      rec.utterance_id = std::string(r.speaker) + "_" + std::to_string(i);
      rec.speaker_id = r.speaker;
      rec.duration_s = r.seconds / r.clips;
      long n = r.words / r.clips + (i < r.words % r.clips ? 1 : 0);
      for (long k = 0; k < n; ++k) rec.transcript += "字";
      rec.transcript += "。";
      records.push_back(rec);
      alignments[rec.utterance_id].segments = {{"a1", 10}};
    }
  }
  Outcome o;
  auto stats = compute_statistics(records, alignments);
  for (const Row &r : rows) {
    const auto &s = stats.at(r.speaker);
    o.require(s.clips == r.clips && s.words == r.words, std::string(r.speaker) + " totals");
    o.require(std::abs(s.words_per_second - r.wps) <= 0.01,
              std::string(r.speaker) + " wps " + fmt(s.words_per_second));
    o.detail += (o.detail.empty() ? "" : " ") + std::string(r.speaker) + "=" + fmt(s.words_per_second);
  }
  return o;
}

// 2 ------------------------------------------------------------------------

Outcome prosody_attention() {
  Outcome o;
  // P = [1, 2, 0, -1]; W^Q = W^V = I; W^K doubles; tokens t0 = [1,0,1,0], t1 = [0,1,0,1].
  ProsodySpace s;
  s.tokens.resize(2, 4);
  s.tokens << 1, 0, 1, 0, 0, 1, 0, 1;
  s.w_query = Matrix::Identity(4, 4);
  s.w_key = 2.0 * Matrix::Identity(4, 4);
  s.w_value = Matrix::Identity(4, 4);
  s.num_heads = 1;
  Vector p(4);
  p << 1, 2, 0, -1;
  // Scores: Q.K0 = 1*2 + 0 = 2, Q.K1 = 2*2 - 1*2 = 2 -> both 2/sqrt(4) = 1.
  // Equal scores: weights 1/2 each, E = (t0 + t1)/2.
  ProsodyRepresentation r = attend_prosody(p, s);
  Vector expect(4);
  expect << 0.5, 0.5, 0.5, 0.5;
  double err = (r.e - expect).cwiseAbs().maxCoeff();
  // Asymmetric case: P = [1, 0, 0, 0] -> scores 1 and 0.
  p << 1, 0, 0, 0;
  r = attend_prosody(p, s);
  const double w0 = 1.0 / (1.0 + std::exp(-1.0));
  expect << w0, 1 - w0, w0, 1 - w0;
  err = std::max(err, (r.e - expect).cwiseAbs().maxCoeff());
  err = std::max(err, std::abs(r.attention(0, 0) - w0));
  o.require(err <= 1e-10, "oracle error " + fmt(err));

  Rng rng(2024);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const int heads = 1 << rng.index(4);
    const int d = heads * (1 + static_cast<int>(rng.index(8)));
    const int n = 1 + static_cast<int>(rng.index(10));
    ProsodySpace q;
    q.tokens = testing::random_matrix(n, d, rng, 3.0);
    q.w_query = testing::random_matrix(d, d, rng, 3.0);
    q.w_key = testing::random_matrix(d, d, rng, 3.0);
    q.w_value = testing::random_matrix(d, d, rng);
    q.num_heads = heads;
    auto a = attend_prosody(testing::random_matrix(d, 1, rng, 3.0), q).attention;
    worst = std::max(worst, (a.rowwise().sum().array() - 1.0).abs().maxCoeff());
    if (a.minCoeff() < 0.0) worst = 1.0;
  }
  o.require(worst <= 1e-6, "softmax normalisation " + fmt(worst));
  o.detail = "oracle err " + fmt(err) + ", softmax err " + fmt(worst) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// 3 ------------------------------------------------------------------------

Matrix reference_layer_norm(const Matrix &x, double eps) {
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double mean = 0.0, var = 0.0;
    for (Eigen::Index c = 0; c < x.cols(); ++c) mean += x(r, c);
    mean /= static_cast<double>(x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) var += (x(r, c) - mean) * (x(r, c) - mean);
    var /= static_cast<double>(x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) y(r, c) = (x(r, c) - mean) / std::sqrt(var + eps);
  }
  return y;
}

Outcome cln_algebra() {
  Outcome o;
  Rng rng(31);
  const int cond = 256, width = 64;
  const double eps = desk_model().layer_norm_eps;
  double ident = 0.0, shift = 0.0;
  bool homogeneous = true;
  for (int trial = 0; trial < 50; ++trial) {
    RowVector e = testing::random_matrix(1, cond, rng);
    ParameterSet p;
    p.add("site.cln.w_gamma", Matrix::Zero(cond, width));
    p.add("site.cln.w_beta", Matrix::Zero(cond, width));
    calibrate_cln_adapters(p, e);
    ClnAdapter a = cln_adapter(p, "site", ClnSite::kEncoder);
    auto [gamma, beta] = cln_params(e, a);
    Matrix x = testing::random_matrix(12, width, rng, 2.0);
    ident = std::max(ident, max_abs(conditional_layer_norm(x, gamma, beta, eps) -
                                    reference_layer_norm(x, eps)));

    ClnAdapter b{testing::random_matrix(cond, width, rng), testing::random_matrix(cond, width, rng)};
    auto [g1, b1] = cln_params(e, b);
    auto [g2, b2] = cln_params(RowVector(2.0 * e), b);
    homogeneous = homogeneous && g2 == RowVector(2.0 * g1) && b2 == RowVector(2.0 * b1);

    // scale invariance only holds up to eps
    ParameterSet q;
    add_cln_adapter(q, "site", cond, width, rng);
    calibrate_cln_adapters(q, e);
    auto [g3, b3] = cln_params(e, cln_adapter(q, "site", ClnSite::kEncoder));
    Matrix h = testing::random_matrix(12, width, rng, 3.0);
    const double scale = rng.uniform(1.0, 4.0), offset = rng.uniform(-5, 5);
    Matrix moved = (scale * h).array() + offset;
    shift = std::max(shift, max_abs(conditional_layer_norm(moved, g3, b3, eps) -
                                    conditional_layer_norm(h, g3, b3, eps)));
  }
  o.require(ident <= 1e-6, "identity " + fmt(ident));
  o.require(homogeneous, "cln_params(2E) != 2 cln_params(E)");
  o.require(shift <= 1e-5, "shift/scale " + fmt(shift));
  o.detail = "identity " + fmt(ident) + ", homogeneity exact=" + (homogeneous ? "yes" : "no") +
             ", shift/scale " + fmt(shift) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// 4 ------------------------------------------------------------------------

struct FdTarget {
  std::string name;
  int samples;
};

double fd_check(const std::function<Var(Graph &)> &build, const ParameterSet &params,
                const std::vector<FdTarget> &targets, double h) {
  Graph g(params, true);
  g.backward(build(g));
  ParameterSet grads = g.gradients();
  auto loss = [&](const ParameterSet &p) {
    Graph e(p, false);
    return build(e).value()(0, 0);
  };
  double worst = 0.0;
  std::uint64_t seed = 1;
  for (const auto &t : targets)
    worst = std::max(worst, testing::check_parameter_gradient(loss, params, t.name, grads.at(t.name),
                                                              t.samples, seed++, h)
                                .max_rel_error);
  return worst;
}

Outcome gradient_suite() {
  Outcome o;
  ModelConfig cfg = desk_model();
  cfg.symbol_count = 40;
  AcousticModel model = AcousticModel::initialize(cfg, 77);
  const ParameterSet &params = model.parameters();
  Rng rng(5);
  Matrix ref = testing::random_matrix(70, cfg.mel_bins, rng);

  // Prosody attention: tokens and the three projections at d=256, 8 heads.
  ParameterSet att = params;
  att.add("query", testing::random_matrix(1, cfg.prosody.token_dim, rng));
  Matrix probe_e = testing::random_matrix(1, cfg.prosody.token_dim, rng);
  double e_att = fd_check(
      [&](Graph &g) {
        Var e = attend_prosody(g.param("query"), g.param("prosody.tokens"), g.param("prosody.w_query"),
                               g.param("prosody.w_key"), g.param("prosody.w_value"),
                               cfg.prosody.num_heads);
        return ad::sum(ad::mul(e, g.constant(probe_e)));
      },
      att, {{"query", 8}, {"prosody.tokens", 8}, {"prosody.w_query", 8}, {"prosody.w_key", 8},
            {"prosody.w_value", 8}},
      1e-5);

  // CLN at an encoder site, condition from a real reference.
  ParameterSet cln = params;
  cln.add("x", testing::random_matrix(9, cfg.hidden, rng));
  cln.add("cond", Matrix(model.condition_vector(ref)));
  Matrix probe_x = testing::random_matrix(9, cfg.hidden, rng);
  double e_cln = fd_check(
      [&](Graph &g) {
        Var y = normalize_site(g, "encoder.block0.ln1", true, g.param("cond"), g.param("x"),
                               cfg.layer_norm_eps);
        return ad::sum(ad::mul(y, g.constant(probe_x)));
      },
      cln, {{"x", 10}, {"cond", 10}, {"encoder.block0.ln1.cln.w_gamma", 10},
            {"encoder.block0.ln1.cln.w_beta", 10}},
      1e-5);

  // Conditional duration predictor.
  ParameterSet dur = cln;
  Matrix probe_d = testing::random_matrix(9, 1, rng);
  double e_dur = fd_check(
      [&](Graph &g) {
        Var d = model.predict_duration(g, g.param("x"), g.param("cond"));
        return ad::sum(ad::mul(d, g.constant(probe_d)));
      },
      dur, {{"x", 8}, {"variance.duration.conv0.weight", 8}, {"variance.duration.conv1.weight", 8},
            {"variance.duration.out.weight", 8}, {"variance.duration.ln0.cln.w_gamma", 8},
            {"variance.duration.ln1.cln.w_beta", 8}},
      1e-6);

  // End to end: mel output w.r.t. sampled encoder weights.
  ModelInput in;
  for (int i = 0; i < 8; ++i) {
    in.ids.push_back(static_cast<int>(rng.index(40)));
    in.target_durations.push_back(1 + static_cast<int>(rng.index(4)));
    in.target_pitch.push_back(rng.uniform(-2, 2));
    in.target_energy.push_back(rng.uniform(-2, 2));
  }
  in.reference_mel = ref;
  const int frames = std::accumulate(in.target_durations.begin(), in.target_durations.end(), 0);
  Matrix probe_m = testing::random_matrix(frames, cfg.mel_bins, rng);
  double e_e2e = fd_check(
      [&](Graph &g) {
        ForwardVars f = model.forward(g, in, Mode::kTrain);
        return ad::sum(ad::mul(f.mel, g.constant(probe_m)));
      },
      params, {{"encoder.block0.attn.wq", 4}, {"encoder.block1.ffn.conv1.weight", 4},
               {"encoder.embedding", 4}},
      1e-6);

  o.require(e_att <= 1e-4, "attention " + fmt(e_att));
  o.require(e_cln <= 1e-4, "cln " + fmt(e_cln));
  o.require(e_dur <= 1e-4, "duration " + fmt(e_dur));
  o.require(e_e2e <= 1e-4, "end-to-end " + fmt(e_e2e));
  o.detail = "max rel err attention " + fmt(e_att) + ", cln " + fmt(e_cln) + ", duration " +
             fmt(e_dur) + ", mel " + fmt(e_e2e) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// 5 ------------------------------------------------------------------------

Outcome duration_loss_properties() {
  Outcome o;
  Rng rng(55);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> a(1 + rng.index(20));
    for (auto &x : a) x = std::round(rng.uniform(1, 30));
    auto b = a;
    o.require(duration_loss(a, b) == 0.0, "nonzero on equal input");
    b[rng.index(b.size())] += rng.uniform(0.01, 3.0);
    o.require(duration_loss(a, b) > 0.0, "zero on unequal input");
  }
  std::vector<double> p{2.0}, t{4.0};
  o.require(duration_loss(p, t) == 4.0, "hand case (4-2)^2");
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double d1 = rng.uniform(1, 20), d2 = rng.uniform(1, 60), r = rng.uniform(1.05, 2.5);
    std::vector<double> p1{d1}, t1{r * d1}, p2{d2}, t2{r * d2};
    const double ratio = duration_loss(p2, t2) / duration_loss(p1, t1);
    worst = std::max(worst, std::abs(ratio / ((d2 / d1) * (d2 / d1)) - 1.0));
    worst = std::max(worst, std::abs(log_duration_loss(p2, t2) - log_duration_loss(p1, t1)));
  }
  o.require(worst <= 1e-9, "ratio " + fmt(worst));
  if (o.pass) o.detail = "ratio rel err " + fmt(worst);
  return o;
}

// 6 ------------------------------------------------------------------------

Outcome half_weighted_identities() {
  Outcome o;
  Rng rng(66);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> l(1 + rng.index(40));
    for (auto &x : l) x = rng.uniform(0.01, 5.0);
    const std::size_t split = (l.size() + 1) / 2;
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < split; ++i) m1 += l[i];
    for (std::size_t i = split; i < l.size(); ++i) m2 += l[i];
    m1 /= static_cast<double>(split);
    if (l.size() > split) m2 /= static_cast<double>(l.size() - split);
    o.require(half_weighted_loss(l, 0.0) == m1, "alpha=0");
    o.require(half_weighted_loss(l, 1.0) == m1 + m2, "alpha=1");
    double prev = half_weighted_loss(l, 0.0);
    for (double a = 0.1; a <= 5.0; a += 0.1) {
      const double v = half_weighted_loss(l, a);
      if (l.size() > 1) o.require(v > prev, "not monotone");
      prev = v;
    }
  }
  std::vector<double> hand{1, 1, 3, 5};
  o.require(half_weighted_loss(hand, 2.0) == 9.0, "[1,1,3,5] alpha=2");
  if (o.pass) o.detail = "alpha=0 -> m1, alpha=1 -> m1+m2, [1,1,3,5]@2 = 9";
  return o;
}

// 7 ------------------------------------------------------------------------

Outcome filler_round_trip() {
  Outcome o;
  const FillerRegistry registry = comedian_registry();
  const LabelSequence raw = split_labels(
      "uo3 zh e1 n zh e4 ng k ai1 sh ii3 iou3 i4 d ia3 n z ii4 x i4 n i3 h ou4 sh ii4 uo3 k ai1 "
      "sh ii3 sh uo1 t uo1 k ou3 x iou4 i3 h ou4 uo3 j ve2 d e5 uo3 zh a3 ng d e2 t i3 ng h ao3 "
      "d e5 n i3 zh ii1 d ao4 b a5");
  LabelSequence expect(raw.begin(), raw.end() - 8);
  expect.push_back("<spc1>");
  const LabelSequence replaced = replace_fillers(raw, "B", registry);
  o.require(replaced == expect, "sentence replacement");
  o.require(expand_special_tokens(replaced, registry) == raw, "sentence expansion");

  std::vector<std::string> inventory;
  for (const auto &s : mandarin_inventory())
    if (s != "er2") inventory.push_back(s);
  Rng rng(77);
  int with_filler = 0;
  for (int k = 0; k < 1000; ++k) {
    const std::string speaker = rng.index(2) ? "A" : "B";
    const FillerEntry *entry = registry.for_speaker(speaker).front();
    LabelSequence seq;
    const std::size_t n = 1 + rng.index(30);
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.uniform() < 0.15) {
        seq.insert(seq.end(), entry->phonemes.begin(), entry->phonemes.end());
      } else {
        seq.push_back(inventory[rng.index(inventory.size())]);
      }
    }
    const LabelSequence out = replace_fillers(seq, speaker, registry);
    if (out.size() != seq.size()) ++with_filler;
    if (expand_special_tokens(out, registry) != seq) {
      o.require(false, "round trip failed for case " + std::to_string(k));
      break;
    }
  }
  if (o.pass) o.detail = "sentence exact; 1000 random cases (" + std::to_string(with_filler) + " shortened)";
  return o;
}

// 8 ------------------------------------------------------------------------

Outcome length_regulator() {
  Outcome o;
  Rng rng(88);
  for (int k = 0; k < 500; ++k) {
    const int n = 1 + static_cast<int>(rng.index(15));
    const int w = 1 + static_cast<int>(rng.index(8));
    Matrix h = testing::random_matrix(n, w, rng);
    std::vector<int> d(static_cast<std::size_t>(n));
    for (auto &x : d) x = static_cast<int>(rng.index(7));
    const int total = std::accumulate(d.begin(), d.end(), 0);
    Matrix naive(total, w);
    int row = 0;
    for (int i = 0; i < n; ++i)
      for (int r = 0; r < d[static_cast<std::size_t>(i)]; ++r, ++row)
        for (int c = 0; c < w; ++c) naive(row, c) = h(i, c);
    Matrix out = length_regulate(h, d);
    o.require(out.rows() == total, "row count");
    if (out.rows() == total && out != naive) {
      o.require(false, "content mismatch in case " + std::to_string(k));
      break;
    }
  }
  Matrix h = testing::random_matrix(11, 4, rng);
  o.require(length_regulate(h, std::vector<int>(11, 1)) == h, "all-ones identity");
  if (o.pass) o.detail = "500 cases match naive loop; identity holds";
  return o;
}

// 9 ------------------------------------------------------------------------

struct OverfitRun {
  TrainResult result;
  double first_mel_l1 = 0.0;
  LossBreakdown final_eval;
  int steps = 0;
};

OverfitRun overfit_once(const Dataset &data, const RunConfig &rc) {
  OverfitRun run;
  TrainOptions opts;
  int streak = 0;
  opts.on_record = [&](const StepRecord &r) {
    if (r.validation) return true;
    if (r.step == 1) run.first_mel_l1 = r.loss.mel_l1;
    const bool below = r.loss.mel_l1 < 0.1 * run.first_mel_l1 && r.loss.duration_loss < 0.5;
    streak = below ? streak + 1 : 0;
    return streak < 10;
  };
  run.result = train(data, rc, opts);
  run.steps = run.result.checkpoint.step;
  std::vector<std::size_t> all(data.examples.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  run.final_eval = evaluate_loss(run.result.checkpoint.model(), data, all, rc.loss);
  return run;
}

Outcome overfit_smoke() {
  Outcome o;
  RunConfig rc = default_run_config("desk");
  rc.schedule.pretrain_steps = 2000;
  rc.schedule.val_fraction = 0.0;
  rc.schedule.test_fraction = 0.0;
  auto dir = testing::scratch_dir("overfit");
  Dataset data = testing::dataset_from(overfit_spec(), dir, rc.features);
  const auto start = std::chrono::steady_clock::now();
  OverfitRun a = overfit_once(data, rc);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  OverfitRun b = overfit_once(data, rc);
  o.require(!a.result.aborted, "aborted: " + a.result.abort_reason);
  o.require(a.steps < 2000 || a.final_eval.mel_l1 < 0.1 * a.first_mel_l1, "no convergence in 2000 steps");
  o.require(a.final_eval.mel_l1 < 0.1 * a.first_mel_l1,
            "mel L1 " + fmt(a.final_eval.mel_l1) + " vs step-0 " + fmt(a.first_mel_l1));
  o.require(a.final_eval.duration_loss < 0.5, "duration MSE " + fmt(a.final_eval.duration_loss));
  o.require(seconds <= 600.0, "runtime " + fmt(seconds) + " s");
  bool same = a.result.log.size() == b.result.log.size() &&
              a.result.checkpoint.params == b.result.checkpoint.params;
  for (std::size_t i = 0; same && i < a.result.log.size(); ++i)
    same = format_log_record(a.result.log[i]) == format_log_record(b.result.log[i]);
  o.require(same, "runs differ under the same seed");
  o.detail = std::to_string(a.steps) + " steps, mel L1 " + fmt(a.first_mel_l1) + " -> " +
             fmt(a.final_eval.mel_l1) + ", duration MSE " + fmt(a.final_eval.duration_loss) + ", " +
             fmt(seconds) + " s per run, repeat identical=" + (same ? "yes" : "no") +
             (o.pass ? "" : "; " + o.detail);
  return o;
}

// 10 -----------------------------------------------------------------------

std::set<std::string> cln_adapter_names(const ParameterSet &p) {
  std::set<std::string> out;
  for (const auto &name : p.names())
    if (name.find(".cln.") != std::string::npos) out.insert(name);
  return out;
}

Outcome ablation_structure() {
  Outcome o;
  const FillerRegistry registry = comedian_registry();
  const SymbolTable with_tokens = build_symbol_table(mandarin_inventory(), registry);
  const SymbolTable without = build_symbol_table(mandarin_inventory(), FillerRegistry{});
  ModelConfig base = desk_model();
  base.symbol_count = static_cast<int>(with_tokens.size());

  auto names = [](const ModelConfig &c) {
    auto v = AcousticModel::init_parameters(c, 1).names();
    return std::set<std::string>(v.begin(), v.end());
  };
  const auto n1 = names(base);
  auto diff = [](const std::set<std::string> &a, const std::set<std::string> &b) {
    std::set<std::string> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
  };
  auto all_under = [](const std::set<std::string> &s, const std::string &prefix, std::size_t count) {
    if (s.size() != count) return false;
    for (const auto &n : s)
      if (n.rfind(prefix, 0) != 0 || n.find(".cln.") == std::string::npos) return false;
    return true;
  };

  ModelConfig c2 = base;
  c2.cln_sites.erase(ClnSite::kDurationPredictor);
  const auto n2 = names(c2);
  o.require(diff(n2, n1).empty() && all_under(diff(n1, n2), "variance.duration.", 4),
            "#2 removes exactly the duration adapters");

  ModelConfig c3 = base;
  c3.cln_sites.insert(ClnSite::kPitchPredictor);
  c3.cln_sites.insert(ClnSite::kEnergyPredictor);
  const auto n3 = names(c3);
  const auto added = diff(n3, n1);
  std::set<std::string> pitch, energy;
  for (const auto &n : added) (n.rfind("variance.pitch.", 0) == 0 ? pitch : energy).insert(n);
  o.require(diff(n1, n3).empty() && all_under(pitch, "variance.pitch.", 4) &&
                all_under(energy, "variance.energy.", 4),
            "#3 adds exactly pitch/energy adapters");

  // #4: no special tokens. Same parameter names, two fewer embedding rows,
  // and the symbol tables differ by exactly the registry tokens.
  ModelConfig c4 = base;
  c4.symbol_count = static_cast<int>(without.size());
  const auto n4 = names(c4);
  o.require(n4 == n1, "#4 keeps the parameter names");
  o.require(AcousticModel::init_parameters(c4, 1).at("encoder.embedding").rows() ==
                base.symbol_count - 2,
            "#4 embedding rows");
  o.require(with_tokens.is_superset_of(without) && with_tokens.size() == without.size() + 2 &&
                with_tokens.special_tokens() == std::vector<std::string>{"<spc1>", "<spc2>"} &&
                without.special_tokens().empty(),
            "#4 symbol table");

  RunConfig rc = testing::tiny_run();
  auto dir = testing::scratch_dir("ablation");
  Dataset tok = testing::dataset_from(overfit_spec(), dir / "t", rc.features, true);
  Dataset raw = testing::dataset_from(overfit_spec(), dir / "r", rc.features, false);
  bool token_seen = false, raw_clean = true;
  for (const auto &ex : tok.examples)
    for (const auto &l : ex.labels) token_seen |= l == "<spc1>";
  for (const auto &ex : raw.examples)
    for (const auto &l : ex.labels) raw_clean &= !is_special_token_label(l);
  o.require(token_seen && raw_clean, "#4 dataset labels");

  if (o.pass)
    o.detail = "#2 -" + std::to_string(diff(n1, n2).size()) + " adapters, #3 +" +
               std::to_string(added.size()) + " adapters, #4 -2 symbols";
  return o;
}

// 11 -----------------------------------------------------------------------

std::string read_all(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome checkpoint_and_determinism() {
  Outcome o;
  RunConfig rc = default_run_config("desk");
  rc.schedule.pretrain_steps = 20;
  rc.schedule.validation_interval = 10;
  auto dir = testing::scratch_dir("determinism");
  FixtureSpec spec = testing::short_spec(comedy_spec(3));
  Dataset data = testing::dataset_from(spec, dir / "data", rc.features);

  TrainOptions first, second;
  first.log_path = dir / "run1.jsonl";
  second.log_path = dir / "run2.jsonl";
  TrainResult a = train(data, rc, first);
  TrainResult b = train(data, rc, second);
  const std::string log1 = read_all(first.log_path), log2 = read_all(second.log_path);
  o.require(!a.aborted, "training aborted");
  o.require(!log1.empty() && log1 == log2, "loss logs differ");

  save_checkpoint(a.checkpoint, dir / "model.ckpt");
  Checkpoint back = load_checkpoint(dir / "model.ckpt");
  AcousticModel m1 = a.checkpoint.model(), m2 = back.model();
  double worst = 0.0;
  for (const auto &ex : data.examples) {
    ModelInput in = model_input(ex);
    worst = std::max(worst, max_abs(m1.run(in, Mode::kInfer).mel - m2.run(in, Mode::kInfer).mel));
    worst = std::max(worst, max_abs(m1.run(in, Mode::kTrain).mel - m2.run(in, Mode::kTrain).mel));
  }
  o.require(worst <= 1e-10, "forward differs by " + fmt(worst));
  o.require(back.symbols.hash() == a.checkpoint.symbols.hash(), "symbol hash");
  if (o.pass)
    o.detail = "max forward diff " + fmt(worst) + ", logs identical (" +
               std::to_string(a.log.size()) + " records)";
  return o;
}

}  // namespace
}  // namespace comedic

int main() {
  using namespace comedic;
  const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
      {"words per second from corpus totals", words_per_second},
      {"prosody attention oracle", prosody_attention},
      {"conditional layer norm algebra", cln_algebra},
      {"finite-difference gradients", gradient_suite},
      {"duration loss properties", duration_loss_properties},
      {"half-weighted mel loss identities", half_weighted_identities},
      {"filler token round trip", filler_round_trip},
      {"length regulator", length_regulator},
      {"overfit smoke test", overfit_smoke},
      {"ablation structure", ablation_structure},
      {"checkpoint round trip and seeded determinism", checkpoint_and_determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto &[name, fn] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception &e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failed;
    std::printf("[%s] %2d %s (%.2f s): %s\n", out.pass ? "PASS" : "FAIL", index, name, s,
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", index - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
