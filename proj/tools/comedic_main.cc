// tools/comedic_main.cc
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

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>

#include "comedic/checkpoint.h"
#include "comedic/corpus.h"
#include "comedic/dataset.h"
#include "comedic/error.h"
#include "comedic/fixture.h"
#include "comedic/plot.h"
#include "comedic/synthesis.h"
#include "comedic/trainer.h"
#include "comedic/util.h"

namespace fs = std::filesystem;
using namespace comedic;

namespace {

int fail(const std::string &kind, const std::string &message, int code) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << "\n";
  return code;
}

struct CorpusArgs {
  std::string manifest;
  std::string alignments;  // default: <manifest dir>/alignments
  std::string registry;    // default: <manifest dir>/registry.tsv if present

  void add(CLI::App *cmd) {
    cmd->add_option("--manifest", manifest, "Corpus manifest (TSV)")->required();
    cmd->add_option("--alignments", alignments, "Directory of <utt>.ali files");
    cmd->add_option("--registry", registry, "Filler registry");
  }
  fs::path dir() const { return fs::path(manifest).parent_path(); }
  std::vector<UtteranceRecord> records() const { return load_manifest(manifest); }
  std::map<std::string, Alignment> load_alignments_for(
      const std::vector<UtteranceRecord> &records) const {
    return load_alignments(alignments.empty() ? dir() / "alignments" : fs::path(alignments),
                           records);
  }
  FillerRegistry load_registry() const {
    if (!registry.empty()) return FillerRegistry::load(registry);
    const fs::path fallback = dir() / "registry.tsv";
    return fs::exists(fallback) ? FillerRegistry::load(fallback) : FillerRegistry{};
  }
};

Dataset load_dataset(const CorpusArgs &corpus, const RunConfig &config) {
  auto records = corpus.records();
  auto alignments = corpus.load_alignments_for(records);
  DatasetOptions opts;
  opts.features = config.features;
  opts.use_special_tokens = config.use_special_tokens;
  return build_dataset(records, alignments, corpus.load_registry(), opts);
}

LabelSequence read_phonemes(const std::string &arg) {
  if (fs::is_regular_file(arg)) return split_labels(read_file(arg));
  return split_labels(arg);
}

void report_training(const TrainResult &r, const fs::path &ckpt) {
  nlohmann::json j{{"checkpoint", ckpt.string()},
                   {"steps", r.checkpoint.step},
                   {"aborted", r.aborted}};
  if (r.aborted) j["abort_reason"] = r.abort_reason;
  if (!r.log.empty()) j["final_total"] = r.log.back().loss.total;
  std::cout << j.dump() << "\n";
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"comedic: expressive multi-speaker TTS toolkit"};
  app.require_subcommand(1);

  // make-fixture
  std::string fx_kind = "comedy", fx_out;
  int fx_clips = 6;
  std::uint64_t fx_seed = 0;
  auto *fx = app.add_subcommand("make-fixture", "Write a synthetic corpus");
  fx->add_option("--kind", fx_kind, "comedy | pretrain | overfit")
      ->check(CLI::IsMember({"comedy", "pretrain", "overfit"}));
  fx->add_option("--clips", fx_clips, "Clips per speaker (comedy/pretrain)");
  fx->add_option("--seed", fx_seed, "Override the fixture seed");
  fx->add_option("--out", fx_out, "Output directory")->required();

  // stats / validate
  CorpusArgs st_corpus;
  bool st_json = false;
  auto *st = app.add_subcommand("stats", "Per-speaker style statistics");
  st_corpus.add(st);
  st->add_flag("--json", st_json, "Emit JSON instead of a table");

  CorpusArgs va_corpus;
  double va_min = 3.0, va_max = 8.0;
  auto *va = app.add_subcommand("validate", "Check clip lengths and alignments");
  va_corpus.add(va);
  va->add_option("--min-seconds", va_min);
  va->add_option("--max-seconds", va_max);

  // train / finetune
  CorpusArgs tr_corpus;
  std::string tr_config, tr_out;
  auto *tr = app.add_subcommand("train", "Pretrain from scratch");
  tr_corpus.add(tr);
  tr->add_option("--config", tr_config, "Run config (JSON)");
  tr->add_option("--out", tr_out, "Output directory")->required();

  CorpusArgs ft_corpus;
  std::string ft_base, ft_out;
  int ft_steps = -1;
  auto *ft = app.add_subcommand("finetune", "Adapt a checkpoint to a new corpus");
  ft_corpus.add(ft);
  ft->add_option("--checkpoint", ft_base, "Base checkpoint")->required();
  ft->add_option("--steps", ft_steps, "Override finetune_steps");
  ft->add_option("--out", ft_out, "Output directory")->required();

  // synthesize
  std::string sy_ckpt, sy_speaker, sy_phonemes, sy_reference, sy_out;
  std::uint64_t sy_seed = 0;
  bool sy_wav = false, sy_text = false;
  int sy_iters = 32;
  auto *sy = app.add_subcommand("synthesize", "Phonemes to mel (and optionally audio)");
  sy->add_option("--checkpoint", sy_ckpt)->required();
  sy->add_option("--speaker", sy_speaker)->required();
  sy->add_option("--phonemes", sy_phonemes, "File or inline label sequence")->required();
  auto *sy_ref = sy->add_option("--reference", sy_reference, "Reference clip id");
  sy->add_option("--seed", sy_seed, "Seed for reference selection and phase init")
      ->excludes(sy_ref);
  sy->add_option("--out", sy_out)->required();
  sy->add_flag("--wav", sy_wav, "Also write a Griffin-Lim waveform");
  sy->add_flag("--text", sy_text, "Also write the mel as text");
  sy->add_option("--griffin-lim-iterations", sy_iters);

  // plot / compare
  std::vector<std::string> pl_traces;
  std::string pl_out;
  auto *pl = app.add_subcommand("plot-durations", "Render duration traces to PNG");
  pl->add_option("--traces", pl_traces)->required();
  pl->add_option("--out", pl_out)->required();

  std::string cmp_a, cmp_b;
  auto *cmp = app.add_subcommand("compare-durations", "Compare two duration traces");
  cmp->add_option("a", cmp_a)->required();
  cmp->add_option("b", cmp_b)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fx) {
      FixtureSpec spec = fx_kind == "overfit"    ? overfit_spec()
                         : fx_kind == "pretrain" ? pretrain_spec(3, fx_clips)
                                                 : comedy_spec(fx_clips);
      if (fx->count("--seed")) spec.seed = fx_seed;
      auto corpus = write_fixture(spec, fx_out);
      std::cout << nlohmann::json{{"manifest", corpus.manifest.string()},
                                  {"clips", corpus.records.size()}}
                       .dump()
                << "\n";
    } else if (*st) {
      auto records = st_corpus.records();
      auto alignments = st_corpus.load_alignments_for(records);
      auto analysed = analyse_corpus(records, alignments, FeatureConfig{});
      auto stats = compute_statistics(records, analysed);
      auto registry = st_corpus.load_registry();
      std::cout << (st_json ? statistics_report_json(stats, registry)
                            : format_statistics_table(stats, registry));
    } else if (*va) {
      auto records = va_corpus.records();
      va_corpus.load_alignments_for(records);
      nlohmann::json out = nlohmann::json::array();
      for (const auto &w : validate_clip_lengths(records, {va_min, va_max}))
        out.push_back({{"utterance", w.utterance_id},
                       {"duration_s", w.duration_s},
                       {"warning", w.message}});
      std::cout << out.dump(2) << "\n";
    } else if (*tr) {
      RunConfig config = tr_config.empty() ? default_run_config("desk") : load_run_config(tr_config);
      Dataset data = load_dataset(tr_corpus, config);
      fs::create_directories(tr_out);
      TrainOptions opts;
      opts.log_path = fs::path(tr_out) / "loss_log.jsonl";
      TrainResult r = train(data, config, opts);
      const fs::path ckpt = fs::path(tr_out) / "checkpoint.bin";
      save_checkpoint(r.checkpoint, ckpt);
      report_training(r, ckpt);
      if (r.aborted) return fail("training_error", r.abort_reason, 4);
    } else if (*ft) {
      Checkpoint base = load_checkpoint(ft_base);
      Dataset data = load_dataset(ft_corpus, base.config);
      fs::create_directories(ft_out);
      TrainOptions opts;
      opts.log_path = fs::path(ft_out) / "loss_log.jsonl";
      TrainResult r = finetune(base, data, ft_steps >= 0 ? std::optional<int>(ft_steps)
                                                         : std::nullopt,
                               opts);
      const fs::path ckpt = fs::path(ft_out) / "checkpoint.bin";
      save_checkpoint(r.checkpoint, ckpt);
      report_training(r, ckpt);
      if (r.aborted) return fail("training_error", r.abort_reason, 4);
    } else if (*sy) {
      Synthesizer synth(load_checkpoint(sy_ckpt));
      SynthesisRequest req;
      req.phonemes = read_phonemes(sy_phonemes);
      req.speaker = sy_speaker;
      if (!sy_reference.empty()) req.reference = sy_reference;
      req.seed = sy_seed;
      req.waveform = sy_wav;
      req.griffin_lim_iterations = sy_iters;
      SynthesisResult res = synth.synthesize(req);
      const fs::path out(sy_out);
      fs::create_directories(out);
      write_mel(out / "mel.bin", res.mel);
      write_file((out / "trace.tsv").string(), res.trace.serialize());
      if (sy_text) write_file((out / "mel.txt").string(), mel_to_text(res.mel));
      if (res.waveform) write_wav((out / "audio.wav").string(), *res.waveform);
      std::cout << nlohmann::json{{"frames", res.mel.rows()},
                                  {"labels", join_labels(res.labels)},
                                  {"reference", res.reference_id}}
                       .dump()
                << "\n";
    } else if (*pl) {
      std::vector<DurationTrace> traces;
      for (const auto &p : pl_traces) traces.push_back(DurationTrace::load(p));
      auto layout = plot_durations(traces, pl_out);
      std::cout << nlohmann::json{{"png", pl_out},
                                  {"width", layout.width},
                                  {"height", layout.height}}
                       .dump()
                << "\n";
    } else if (*cmp) {
      auto report = compare_durations(DurationTrace::load(cmp_a), DurationTrace::load(cmp_b));
      std::cout << comparison_json(report) << "\n";
    }
  } catch (const comedic::Error &e) {
    return fail(e.kind(), e.what(), 2);
  } catch (const std::exception &e) {
    return fail("internal_error", e.what(), 3);
  }
  return 0;
}
