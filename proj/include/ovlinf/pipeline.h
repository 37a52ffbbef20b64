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

#ifndef OVLINF_PIPELINE_H_
#define OVLINF_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ovlinf/aligner.h"
#include "ovlinf/audio.h"
#include "ovlinf/decoder.h"
#include "ovlinf/eval.h"
#include "ovlinf/segmenter.h"
#include "ovlinf/simulate.h"
#include "ovlinf/vad.h"

namespace ovlinf {

struct SimulateConfig {
  std::string mode = "alternating";  // alternating | samespeaker
  double target_s = 120.0;
  PairingOrder order = PairingOrder::kExtremeFirst;
};

/// Every knob of a run. Loadable from a JSON file; the full resolved state
/// echoes into each output header so reports are self-describing.
struct PipelineConfig {
  OverlapConfig overlap;
  bool vad_enabled = false;
  VadConfig vad;
  VadoiConfig vadoi;
  std::string align_preset = "poi";  // oi | poi
  AlignCosts costs;                  // resolved preset + unit + soft_match
  std::string backend_kind = "mock";  // mock | subprocess | http
  ExternalBackendConfig external;
  MockCorruption mock;
  int max_parallel = 1;
  std::uint64_t seed = 1;
  std::string manifest_path;
  std::string longform_path;  // empty: simulate from the manifest
  SimulateConfig sim;
  std::string out_dir = "out";

  void validate() const;
};

PipelineConfig default_config();
PipelineConfig config_from_json(const nlohmann::json& doc);
PipelineConfig load_config(const std::string& path);
nlohmann::json config_to_json(const PipelineConfig& cfg);

/// One long-form utterance ready to process. load_audio must be pure: every
/// call returns the same samples.
struct LongInput {
  std::string id;
  std::vector<std::string> transcript;
  std::vector<TimedWord> timed_words;
  double duration_s = 0.0;
  std::function<AudioBuffer()> load_audio;
};

struct UtteranceResult {
  std::string id;
  SegmentPlan plan;
  DecodeRun decode;
  StitchedTranscript stitched;
  WerReport wer;
  TimingReport timing;
  bool scored = false;
  std::string error;  // nonempty: utterance failed
};

struct PipelineResult {
  std::vector<UtteranceResult> utterances;
  CorpusReport corpus;
  bool corpus_valid = false;
  int n_failed = 0;
};

/// Plan (fixed or pause-aware), decode, stitch (plain concatenation at
/// overlap 0), and score one utterance. utterance_index feeds the mock's
/// per-utterance seed.
UtteranceResult process_utterance(const PipelineConfig& cfg,
                                  const LongInput& input,
                                  std::size_t utterance_index);

/// process_utterance over the corpus, up to max_parallel utterances at a
/// time, plus the pooled corpus summary over the ones that scored.
PipelineResult run_pipeline(const PipelineConfig& cfg,
                            const std::vector<LongInput>& inputs);

/// Long-form inputs realized from the configured manifests. Word times come
/// from source annotations when present, else a uniform spread per source.
std::vector<LongInput> inputs_from_manifests(const PipelineConfig& cfg);

/// Deterministic synthetic corpus; audio is re-synthesized on demand so
/// only one utterance's samples live at a time.
std::vector<LongInput> synth_corpus(int n_utterances,
                                    const SynthLongParams& params,
                                    std::uint64_t seed);

/// Writes transcripts.tsv, report.csv, plans.jsonl, and hypotheses.jsonl
/// under cfg.out_dir, each starting with the config echo.
void write_outputs(const PipelineConfig& cfg, const PipelineResult& result);

// File-to-file stages. Each reads what earlier stages wrote (or the
// configured manifests) and writes exactly one product, so any prefix of
// simulate | plan | decode | stitch | score composes to the full run.
void stage_simulate(const PipelineConfig& cfg);
void stage_plan(const PipelineConfig& cfg);
void stage_decode(const PipelineConfig& cfg);
void stage_stitch(const PipelineConfig& cfg);
void stage_score(const PipelineConfig& cfg);

struct BenchResult {
  double word_s = 0.0;  // mean seconds per utterance, word-level stitching
  double char_s = 0.0;  // same, character-level
  int repeats = 0;
};

/// Times stitching repeats over one synthetic utterance at both
/// granularities. Decoding cost is excluded.
BenchResult bench_alignment(const PipelineConfig& cfg, int repeats);

struct SweepRow {
  double overlap_pct = 0.0;
  bool vad = false;
  double wer = 0.0;
  double mean_ratio_T = 0.0;
  double mean_align_time_s = 0.0;
};

/// Full runs over overlap {0, 0.15, 0.30, 0.50} x VAD {off, on}.
std::vector<SweepRow> run_sweep(const PipelineConfig& base,
                                const std::vector<LongInput>& inputs);
std::string sweep_csv(const PipelineConfig& base,
                      const std::vector<SweepRow>& rows);

/// Mixes a run seed with a per-item index into a fresh 64-bit seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace ovlinf

#endif  // OVLINF_PIPELINE_H_
