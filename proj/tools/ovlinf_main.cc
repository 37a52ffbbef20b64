// Copyright (c) 2026 ovlinf project authors
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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ovlinf/pipeline.h"

namespace {

namespace fs = std::filesystem;
using namespace ovlinf;

void apply_overrides(PipelineConfig& cfg, const std::optional<double>& overlap,
                     const std::optional<std::string>& vad,
                     const std::optional<std::string>& preset,
                     const std::optional<std::string>& soft,
                     const std::optional<std::string>& unit,
                     const std::optional<std::uint64_t>& seed,
                     const std::optional<std::string>& out) {
  if (preset) {
    const bool soft_match = cfg.costs.soft_match;
    const AlignUnit align_unit = cfg.costs.unit;
    cfg.align_preset = *preset;
    cfg.costs = *preset == "oi" ? AlignCosts::oi() : AlignCosts::poi();
    cfg.costs.soft_match = soft_match;
    cfg.costs.unit = align_unit;
  }
  if (overlap) cfg.overlap.overlap_pct = *overlap;
  if (vad) cfg.vad_enabled = *vad == "on";
  if (soft) cfg.costs.soft_match = *soft == "on";
  if (unit) cfg.costs.unit = *unit == "char" ? AlignUnit::kChar : AlignUnit::kWord;
  if (seed) cfg.seed = *seed;
  if (out) cfg.out_dir = *out;
}

int cmd_run(const PipelineConfig& cfg) {
  const std::vector<LongInput> inputs = inputs_from_manifests(cfg);
  const PipelineResult result = run_pipeline(cfg, inputs);
  write_outputs(cfg, result);

  for (const UtteranceResult& u : result.utterances) {
    if (!u.error.empty()) {
      std::cerr << "ovlinf: " << u.id << " failed: " << u.error << '\n';
    }
  }
  std::printf("processed %zu utterances (%d failed)\n",
              result.utterances.size(), result.n_failed);
  if (result.corpus_valid) {
    std::printf("corpus WER %.2f%%  mean segment ratio %.2f  mean align time %.4f s\n",
                result.corpus.wer.wer * 100.0, result.corpus.mean_ratio_T,
                result.corpus.mean_align_time_s);
  }
  std::printf("outputs in %s\n", cfg.out_dir.c_str());
  return result.n_failed > 0 ? 1 : 0;
}

int cmd_sweep(const PipelineConfig& cfg) {
  const std::vector<LongInput> inputs = inputs_from_manifests(cfg);
  const std::vector<SweepRow> rows = run_sweep(cfg, inputs);
  const std::string csv = sweep_csv(cfg, rows);
  fs::create_directories(cfg.out_dir);
  std::ofstream out((fs::path(cfg.out_dir) / "sweep.csv").string());
  if (!out) throw std::runtime_error("cannot write sweep.csv");
  out << csv;
  std::cout << csv;
  return 0;
}

int cmd_bench(const PipelineConfig& cfg, int repeats) {
  const BenchResult bench = bench_alignment(cfg, repeats);
  std::printf("alignment bench, %d repeats of one synthetic utterance\n",
              bench.repeats);
  std::printf("word unit: %.6f s/utt\n", bench.word_s);
  std::printf("char unit: %.6f s/utt\n", bench.char_s);
  return 0;
}

int cmd_synth(const PipelineConfig& cfg, int n_utterances, int n_speakers) {
  if (n_utterances < 1 || n_speakers < 1) {
    throw std::invalid_argument("synth: counts must be >= 1");
  }
  const fs::path audio_dir = fs::path(cfg.out_dir) / "audio";
  fs::create_directories(audio_dir);

  std::vector<ManifestEntry> manifest;
  for (int k = 0; k < n_utterances; ++k) {
    const std::uint64_t utt_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(k));
    const int words = 8 + static_cast<int>(utt_seed % 13);
    const SynthResult synth = synth_utterance(words, 0.28, 0.25, 16000, utt_seed);

    char name[32];
    std::snprintf(name, sizeof(name), "utt-%04d", k);
    const fs::path wav_path = audio_dir / (std::string(name) + ".wav");
    save_wav(wav_path.string(), synth.audio);

    ManifestEntry entry;
    entry.utterance_id = name;
    entry.audio_path = wav_path.string();
    entry.speaker_id = "spk-" + std::to_string(k % n_speakers);
    entry.duration_s = synth.audio.duration_s();
    for (std::size_t w = 0; w < synth.words.size(); ++w) {
      entry.transcript.push_back(std::string(name) + "-w" + std::to_string(w + 1));
      entry.word_start_s.push_back(synth.words[w].start_s);
      entry.word_end_s.push_back(synth.words[w].end_s);
    }
    manifest.push_back(std::move(entry));
  }

  const fs::path manifest_path = fs::path(cfg.out_dir) / "manifest.jsonl";
  write_manifest(manifest_path.string(), manifest);
  std::printf("wrote %d utterances under %s\n", n_utterances,
              cfg.out_dir.c_str());
  std::printf("manifest: %s\n", manifest_path.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-form speech recognition by overlapped segment decoding"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string stage;
  std::optional<double> overlap;
  std::optional<std::string> vad;
  std::optional<std::string> preset;
  std::optional<std::string> soft;
  std::optional<std::string> unit;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  int repeats = 100;
  int n_utterances = 24;
  int n_speakers = 4;

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--stage", stage,
                 "stage to run; equivalent to naming it as a subcommand");
  app.add_option("--overlap", overlap, "segment overlap fraction in [0, 1)");
  app.add_option("--vad", vad, "move segment boundaries into pauses")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--preset", preset, "alignment cost preset")
      ->check(CLI::IsMember({"oi", "poi"}));
  app.add_option("--soft-match", soft,
                 "scale substitution cost by character error rate")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--unit", unit, "alignment granularity")
      ->check(CLI::IsMember({"word", "char"}));
  app.add_option("--seed", seed, "run seed");
  app.add_option("--out", out, "output directory");
  app.add_option("--repeats", repeats, "bench: stitching repetitions");
  app.add_option("--n-utterances", n_utterances, "synth: utterance count");
  app.add_option("--speakers", n_speakers, "synth: speaker count");

  app.add_subcommand("run", "plan, decode, stitch, and score the corpus");
  app.add_subcommand("simulate", "build the long-form manifest");
  app.add_subcommand("plan", "write segment plans");
  app.add_subcommand("decode", "decode planned segments");
  app.add_subcommand("stitch", "merge decoded segments into transcripts");
  app.add_subcommand("score", "score transcripts against references");
  app.add_subcommand("sweep", "full runs over the overlap x VAD grid");
  app.add_subcommand("bench", "time word- vs character-level stitching");
  app.add_subcommand("synth", "generate a synthetic source corpus");
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough(true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string chosen = stage;
  const auto subs = app.get_subcommands();
  if (!subs.empty()) chosen = subs.front()->get_name();
  if (chosen.empty()) {
    std::cerr << "ovlinf: pick a stage: run | simulate | plan | decode | "
                 "stitch | score | sweep | bench | synth\n";
    return 2;
  }

  PipelineConfig cfg;
  try {
    cfg = config_path.empty() ? default_config() : load_config(config_path);
    apply_overrides(cfg, overlap, vad, preset, soft, unit, seed, out);
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "ovlinf: config error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (chosen == "run") return cmd_run(cfg);
    if (chosen == "simulate") {
      stage_simulate(cfg);
    } else if (chosen == "plan") {
      stage_plan(cfg);
    } else if (chosen == "decode") {
      stage_decode(cfg);
    } else if (chosen == "stitch") {
      stage_stitch(cfg);
    } else if (chosen == "score") {
      stage_score(cfg);
    } else if (chosen == "sweep") {
      return cmd_sweep(cfg);
    } else if (chosen == "bench") {
      return cmd_bench(cfg, repeats);
    } else if (chosen == "synth") {
      return cmd_synth(cfg, n_utterances, n_speakers);
    } else {
      std::cerr << "ovlinf: unknown stage \"" << chosen << "\"\n";
      return 2;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "ovlinf: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ovlinf: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
