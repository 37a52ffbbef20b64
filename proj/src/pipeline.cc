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

#include "ovlinf/pipeline.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <initializer_list>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

namespace ovlinf {

namespace {

namespace fs = std::filesystem;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_keys(const nlohmann::json& doc,
                std::initializer_list<const char*> allowed,
                const std::string& context) {
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument("config: unknown key \"" + key + "\" in " +
                                  context);
    }
  }
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t k = 0; k < words.size(); ++k) {
    if (k > 0) out += ' ';
    out += words[k];
  }
  return out;
}

std::string out_path(const PipelineConfig& cfg, const char* name) {
  return (fs::path(cfg.out_dir) / name).string();
}

std::string config_echo_line(const PipelineConfig& cfg) {
  return "# config: " + config_to_json(cfg).dump();
}

std::string config_echo_json(const PipelineConfig& cfg) {
  nlohmann::json doc;
  doc["config"] = config_to_json(cfg);
  return doc.dump();
}

SegmentPlan plan_input(const PipelineConfig& cfg, const LongInput& input) {
  SegmentPlan plan;
  if (cfg.vad_enabled) {
    const AudioBuffer audio = input.load_audio();
    const VadMask mask = run_vad(frame_signal(audio), cfg.vad);
    plan = plan_vadoi(input.duration_s, mask, cfg.overlap, cfg.vadoi);
  } else {
    plan = plan_fixed(input.duration_s, cfg.overlap);
  }
  plan.utterance_id = input.id;
  return plan;
}

std::unique_ptr<DecoderBackend> make_backend(const PipelineConfig& cfg,
                                             const LongInput& input,
                                             std::size_t utterance_index,
                                             AudioBuffer& audio_storage) {
  if (cfg.backend_kind == "mock") {
    MockCorruption corruption = cfg.mock;
    corruption.seed = mix_seed(cfg.seed, utterance_index);
    return std::make_unique<MockBackend>(input.timed_words, corruption,
                                         input.duration_s);
  }
  if (audio_storage.samples.empty()) audio_storage = input.load_audio();
  if (cfg.backend_kind == "subprocess") {
    return std::make_unique<SubprocessBackend>(audio_storage, cfg.external);
  }
  return std::make_unique<HttpBackend>(audio_storage, cfg.external);
}

StitchedTranscript stitch_hyps(const PipelineConfig& cfg,
                               const std::vector<Hypothesis>& hyps) {
  if (cfg.overlap.overlap_pct > 0.0) return stitch_all(hyps, cfg.costs);
  // Zero overlap: segments partition the audio, so plain concatenation.
  StitchedTranscript out;
  for (const Hypothesis& h : hyps) {
    const bool timed = h.has_times();
    for (std::size_t k = 0; k < h.words.size(); ++k) {
      out.words.push_back(h.words[k]);
      out.times.push_back(timed ? h.times[k]
                                : std::pair<double, double>{0.0, 0.0});
      out.timed.push_back(timed ? 1 : 0);
    }
  }
  return out;
}

TimingReport make_timing(const PipelineConfig& cfg, double duration_s,
                         const SegmentPlan& plan, double align_time_s) {
  TimingReport timing;
  timing.n_segments = static_cast<int>(plan.specs.size());
  OverlapConfig naive = cfg.overlap;
  naive.overlap_pct = 0.0;
  timing.n_segments_naive =
      static_cast<int>(plan_fixed(duration_s, naive).specs.size());
  timing.ratio_T = static_cast<double>(timing.n_segments) /
                   static_cast<double>(timing.n_segments_naive);
  timing.align_time_s = align_time_s;
  return timing;
}

nlohmann::json hyp_to_json(const std::string& utterance_id,
                           const Hypothesis& h) {
  nlohmann::json doc;
  doc["utterance_id"] = utterance_id;
  doc["segment_index"] = h.segment_index;
  doc["segment_start_s"] = h.segment_start_s;
  doc["segment_end_s"] = h.segment_end_s;
  doc["words"] = h.words;
  if (h.has_times()) {
    std::vector<double> starts;
    std::vector<double> ends;
    starts.reserve(h.times.size());
    ends.reserve(h.times.size());
    for (const auto& [s, e] : h.times) {
      starts.push_back(s);
      ends.push_back(e);
    }
    doc["start_s"] = starts;
    doc["end_s"] = ends;
  }
  return doc;
}

Hypothesis hyp_from_json(const nlohmann::json& doc, std::string* utterance_id) {
  Hypothesis h;
  *utterance_id = doc.at("utterance_id").get<std::string>();
  h.segment_index = doc.at("segment_index").get<int>();
  h.segment_start_s = doc.at("segment_start_s").get<double>();
  h.segment_end_s = doc.at("segment_end_s").get<double>();
  h.words = doc.at("words").get<std::vector<std::string>>();
  if (doc.contains("start_s")) {
    const auto starts = doc["start_s"].get<std::vector<double>>();
    const auto ends = doc["end_s"].get<std::vector<double>>();
    if (starts.size() != h.words.size() || ends.size() != h.words.size()) {
      throw std::runtime_error("hypothesis line: times do not match words");
    }
    for (std::size_t k = 0; k < starts.size(); ++k) {
      h.times.emplace_back(starts[k], ends[k]);
    }
  }
  return h;
}

std::vector<LongFormEntry> load_longform_entries(
    const PipelineConfig& cfg, const std::vector<ManifestEntry>& manifest) {
  if (!cfg.longform_path.empty()) return read_longform(cfg.longform_path);
  const std::string generated = out_path(cfg, "longform.jsonl");
  if (fs::exists(generated)) return read_longform(generated);
  if (cfg.sim.mode == "samespeaker") {
    return simulate_samespeaker(manifest, cfg.sim.target_s);
  }
  return simulate_alternating(manifest, cfg.sim.target_s, cfg.sim.order);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path, const char* hint) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path + " (" + hint + ")");
  }
  return in;
}

void write_transcripts_file(const PipelineConfig& cfg,
                            const std::vector<std::string>& ids,
                            const std::vector<const StitchedTranscript*>& rows) {
  std::ofstream out = open_out(out_path(cfg, "transcripts.tsv"));
  out << config_echo_line(cfg) << '\n';
  out << "utterance_id\ttranscript\n";
  for (std::size_t k = 0; k < ids.size(); ++k) {
    out << ids[k] << '\t' << join_words(rows[k]->words) << '\n';
  }
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix(splitmix(seed) ^ index);
}

void PipelineConfig::validate() const {
  overlap.validate();
  vad.validate();
  vadoi.validate();
  costs.validate();
  mock.validate();
  if (align_preset != "oi" && align_preset != "poi") {
    throw std::invalid_argument("config: align preset must be oi or poi");
  }
  if (backend_kind != "mock" && backend_kind != "subprocess" &&
      backend_kind != "http") {
    throw std::invalid_argument(
        "config: backend kind must be mock, subprocess, or http");
  }
  if (backend_kind != "mock") external.validate();
  if (max_parallel < 1) {
    throw std::invalid_argument("config: max_parallel must be >= 1");
  }
  if (sim.mode != "alternating" && sim.mode != "samespeaker") {
    throw std::invalid_argument(
        "config: simulate mode must be alternating or samespeaker");
  }
  if (sim.target_s < 0.0) {
    throw std::invalid_argument("config: simulate target_s must be >= 0");
  }
  if (out_dir.empty()) {
    throw std::invalid_argument("config: out_dir must be set");
  }
}

PipelineConfig default_config() {
  PipelineConfig cfg;
  cfg.costs = AlignCosts::poi();
  return cfg;
}

PipelineConfig config_from_json(const nlohmann::json& doc) {
  PipelineConfig cfg = default_config();
  check_keys(doc,
             {"segment_len_s", "overlap_pct", "vad", "vadoi", "align",
              "backend", "max_parallel", "seed", "manifest", "longform",
              "simulate", "out_dir"},
             "top level");

  cfg.overlap.segment_len_s = doc.value("segment_len_s", cfg.overlap.segment_len_s);
  cfg.overlap.overlap_pct = doc.value("overlap_pct", cfg.overlap.overlap_pct);
  cfg.max_parallel = doc.value("max_parallel", cfg.max_parallel);
  cfg.seed = doc.value("seed", cfg.seed);
  cfg.manifest_path = doc.value("manifest", cfg.manifest_path);
  cfg.longform_path = doc.value("longform", cfg.longform_path);
  cfg.out_dir = doc.value("out_dir", cfg.out_dir);

  if (doc.contains("vad")) {
    const auto& v = doc["vad"];
    check_keys(v,
               {"enabled", "mode", "noise_init_frames", "threshold",
                "hangover_frames"},
               "vad");
    cfg.vad_enabled = v.value("enabled", cfg.vad_enabled);
    const std::string mode = v.value("mode", std::string("energy"));
    if (mode == "energy") {
      cfg.vad.mode = VadMode::kEnergy;
    } else if (mode == "statistical") {
      cfg.vad.mode = VadMode::kStatistical;
    } else {
      throw std::invalid_argument("config: vad mode must be energy or statistical");
    }
    cfg.vad.noise_init_frames = v.value("noise_init_frames", cfg.vad.noise_init_frames);
    cfg.vad.threshold = v.value("threshold", cfg.vad.threshold);
    cfg.vad.hangover_frames = v.value("hangover_frames", cfg.vad.hangover_frames);
  }

  if (doc.contains("vadoi")) {
    const auto& v = doc["vadoi"];
    check_keys(v, {"initial_pause_s", "min_pause_s", "triple_word_threshold"},
               "vadoi");
    cfg.vadoi.initial_pause_s = v.value("initial_pause_s", cfg.vadoi.initial_pause_s);
    cfg.vadoi.min_pause_s = v.value("min_pause_s", cfg.vadoi.min_pause_s);
    cfg.vadoi.triple_word_threshold =
        v.value("triple_word_threshold", cfg.vadoi.triple_word_threshold);
  }

  if (doc.contains("align")) {
    const auto& a = doc["align"];
    check_keys(a,
               {"preset", "unit", "soft_match", "w_del", "w_ins", "w_sub",
                "w_match"},
               "align");
    cfg.align_preset = a.value("preset", cfg.align_preset);
    if (cfg.align_preset == "oi") {
      cfg.costs = AlignCosts::oi();
    } else if (cfg.align_preset == "poi") {
      cfg.costs = AlignCosts::poi();
    } else {
      throw std::invalid_argument("config: align preset must be oi or poi");
    }
    cfg.costs.w_del = a.value("w_del", cfg.costs.w_del);
    cfg.costs.w_ins = a.value("w_ins", cfg.costs.w_ins);
    cfg.costs.w_sub = a.value("w_sub", cfg.costs.w_sub);
    cfg.costs.w_match = a.value("w_match", cfg.costs.w_match);
    cfg.costs.soft_match = a.value("soft_match", cfg.costs.soft_match);
    const std::string unit = a.value("unit", std::string("word"));
    if (unit == "word") {
      cfg.costs.unit = AlignUnit::kWord;
    } else if (unit == "char") {
      cfg.costs.unit = AlignUnit::kChar;
    } else {
      throw std::invalid_argument("config: align unit must be word or char");
    }
  }

  if (doc.contains("backend")) {
    const auto& b = doc["backend"];
    check_keys(b,
               {"kind", "command", "endpoint", "timeout_s", "timestamps",
                "p_corrupt", "corrupt_mode", "boundary_margin_s"},
               "backend");
    cfg.backend_kind = b.value("kind", cfg.backend_kind);
    cfg.external.command = b.value("command", cfg.external.command);
    cfg.external.endpoint = b.value("endpoint", cfg.external.endpoint);
    cfg.external.timeout_s = b.value("timeout_s", cfg.external.timeout_s);
    cfg.external.timestamps = b.value("timestamps", cfg.external.timestamps);
    cfg.mock.p_corrupt = b.value("p_corrupt", cfg.mock.p_corrupt);
    cfg.mock.boundary_margin_s =
        b.value("boundary_margin_s", cfg.mock.boundary_margin_s);
    const std::string mode = b.value("corrupt_mode", std::string("substitute"));
    if (mode == "substitute") {
      cfg.mock.mode = CorruptMode::kSubstituteSimilar;
    } else if (mode == "truncate") {
      cfg.mock.mode = CorruptMode::kTruncate;
    } else if (mode == "drop") {
      cfg.mock.mode = CorruptMode::kDrop;
    } else {
      throw std::invalid_argument(
          "config: corrupt_mode must be substitute, truncate, or drop");
    }
  }

  if (doc.contains("simulate")) {
    const auto& s = doc["simulate"];
    check_keys(s, {"mode", "target_s", "order"}, "simulate");
    cfg.sim.mode = s.value("mode", cfg.sim.mode);
    cfg.sim.target_s = s.value("target_s", cfg.sim.target_s);
    const std::string order = s.value("order", std::string("extreme"));
    if (order == "extreme") {
      cfg.sim.order = PairingOrder::kExtremeFirst;
    } else if (order == "median") {
      cfg.sim.order = PairingOrder::kMedianAdjacent;
    } else {
      throw std::invalid_argument("config: simulate order must be extreme or median");
    }
  }

  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in = open_in(path, "config file");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": bad JSON: " + e.what());
  }
  return config_from_json(doc);
}

nlohmann::json config_to_json(const PipelineConfig& cfg) {
  nlohmann::json doc;
  doc["segment_len_s"] = cfg.overlap.segment_len_s;
  doc["overlap_pct"] = cfg.overlap.overlap_pct;
  doc["vad"] = {
      {"enabled", cfg.vad_enabled},
      {"mode", cfg.vad.mode == VadMode::kEnergy ? "energy" : "statistical"},
      {"noise_init_frames", cfg.vad.noise_init_frames},
      {"threshold", cfg.vad.threshold},
      {"hangover_frames", cfg.vad.hangover_frames},
  };
  doc["vadoi"] = {
      {"initial_pause_s", cfg.vadoi.initial_pause_s},
      {"min_pause_s", cfg.vadoi.min_pause_s},
      {"triple_word_threshold", cfg.vadoi.triple_word_threshold},
  };
  doc["align"] = {
      {"preset", cfg.align_preset},
      {"unit", cfg.costs.unit == AlignUnit::kWord ? "word" : "char"},
      {"soft_match", cfg.costs.soft_match},
      {"w_del", cfg.costs.w_del},
      {"w_ins", cfg.costs.w_ins},
      {"w_sub", cfg.costs.w_sub},
      {"w_match", cfg.costs.w_match},
  };
  doc["backend"] = {
      {"kind", cfg.backend_kind},
      {"command", cfg.external.command},
      {"endpoint", cfg.external.endpoint},
      {"timeout_s", cfg.external.timeout_s},
      {"timestamps", cfg.external.timestamps},
      {"p_corrupt", cfg.mock.p_corrupt},
      {"corrupt_mode", cfg.mock.mode == CorruptMode::kSubstituteSimilar
                           ? "substitute"
                           : cfg.mock.mode == CorruptMode::kTruncate ? "truncate"
                                                                     : "drop"},
      {"boundary_margin_s", cfg.mock.boundary_margin_s},
  };
  doc["max_parallel"] = cfg.max_parallel;
  doc["seed"] = cfg.seed;
  doc["manifest"] = cfg.manifest_path;
  doc["longform"] = cfg.longform_path;
  doc["simulate"] = {
      {"mode", cfg.sim.mode},
      {"target_s", cfg.sim.target_s},
      {"order", cfg.sim.order == PairingOrder::kExtremeFirst ? "extreme"
                                                             : "median"},
  };
  doc["out_dir"] = cfg.out_dir;
  return doc;
}

UtteranceResult process_utterance(const PipelineConfig& cfg,
                                  const LongInput& input,
                                  std::size_t utterance_index) {
  UtteranceResult result;
  result.id = input.id;
  try {
    result.plan = plan_input(cfg, input);

    AudioBuffer audio_storage;
    const std::unique_ptr<DecoderBackend> backend =
        make_backend(cfg, input, utterance_index, audio_storage);
    result.decode = decode_plan(result.plan, *backend, cfg.max_parallel);

    const auto t0 = std::chrono::steady_clock::now();
    result.stitched = stitch_hyps(cfg, result.decode.hyps);
    const double align_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    result.timing = make_timing(cfg, input.duration_s, result.plan, align_time_s);
    result.wer = score_wer(normalize_words(input.transcript),
                           normalize_words(result.stitched.words));
    result.scored = true;

    if (!result.decode.ok()) {
      std::string msg;
      for (const DecodeFailure& f : result.decode.failures) {
        if (!msg.empty()) msg += "; ";
        msg += "segment " + std::to_string(f.segment_index) + ": " + f.message;
      }
      result.error = msg;
    }
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  return result;
}

PipelineResult run_pipeline(const PipelineConfig& cfg,
                            const std::vector<LongInput>& inputs) {
  cfg.validate();
  PipelineResult result;
  result.utterances.resize(inputs.size());

  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = cursor.fetch_add(1);
      if (k >= inputs.size()) return;
      result.utterances[k] = process_utterance(cfg, inputs[k], k);
    }
  };
  const std::size_t workers = std::min<std::size_t>(
      inputs.size(), static_cast<std::size_t>(cfg.max_parallel));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::vector<WerReport> wers;
  std::vector<TimingReport> timings;
  for (const UtteranceResult& u : result.utterances) {
    if (!u.error.empty()) ++result.n_failed;
    if (u.scored && u.error.empty()) {
      wers.push_back(u.wer);
      timings.push_back(u.timing);
    }
  }
  if (!wers.empty()) {
    result.corpus = corpus_report(wers, timings);
    result.corpus_valid = true;
  }
  return result;
}

std::vector<LongInput> inputs_from_manifests(const PipelineConfig& cfg) {
  if (cfg.manifest_path.empty()) {
    throw std::invalid_argument("config: manifest path is required");
  }
  const std::vector<ManifestEntry> manifest = read_manifest(cfg.manifest_path);
  auto by_id = std::make_shared<std::map<std::string, ManifestEntry>>();
  for (const ManifestEntry& e : manifest) {
    if (!by_id->try_emplace(e.utterance_id, e).second) {
      throw std::invalid_argument("manifest: duplicate utterance_id " +
                                  e.utterance_id);
    }
  }

  std::vector<LongInput> inputs;
  for (const LongFormEntry& entry : load_longform_entries(cfg, manifest)) {
    ConcatResult concat = concat_audio(entry, *by_id);
    LongInput input;
    input.id = entry.long_id;
    input.transcript = entry.transcript;
    input.timed_words = std::move(concat.words);
    input.duration_s = concat.audio.duration_s();
    input.load_audio = [by_id, entry]() {
      return concat_audio(entry, *by_id).audio;
    };
    inputs.push_back(std::move(input));
  }
  return inputs;
}

std::vector<LongInput> synth_corpus(int n_utterances,
                                    const SynthLongParams& params,
                                    std::uint64_t seed) {
  std::vector<LongInput> inputs;
  inputs.reserve(static_cast<std::size_t>(n_utterances));
  for (int k = 0; k < n_utterances; ++k) {
    const std::uint64_t utt_seed = mix_seed(seed, static_cast<std::uint64_t>(k));
    SynthResult synth = synth_long_utterance(params, utt_seed);
    char id[32];
    std::snprintf(id, sizeof(id), "synth-%04d", k);
    LongInput input;
    input.id = id;
    for (const TimedWord& w : synth.words) input.transcript.push_back(w.word);
    input.timed_words = std::move(synth.words);
    input.duration_s = synth.audio.duration_s();
    input.load_audio = [params, utt_seed]() {
      return synth_long_utterance(params, utt_seed).audio;
    };
    inputs.push_back(std::move(input));
  }
  return inputs;
}

void write_outputs(const PipelineConfig& cfg, const PipelineResult& result) {
  fs::create_directories(cfg.out_dir);

  std::vector<std::string> ids;
  std::vector<const StitchedTranscript*> rows;
  for (const UtteranceResult& u : result.utterances) {
    if (!u.scored) continue;
    ids.push_back(u.id);
    rows.push_back(&u.stitched);
  }
  write_transcripts_file(cfg, ids, rows);

  {
    std::ofstream out = open_out(out_path(cfg, "report.csv"));
    out << config_echo_line(cfg) << '\n' << report_csv_header() << '\n';
    for (const UtteranceResult& u : result.utterances) {
      if (!u.scored) continue;
      out << report_csv_row(u.id, u.wer, u.timing) << '\n';
    }
    if (result.corpus_valid) out << report_csv_corpus_row(result.corpus) << '\n';
  }

  {
    std::ofstream out = open_out(out_path(cfg, "plans.jsonl"));
    out << config_echo_json(cfg) << '\n';
    for (const UtteranceResult& u : result.utterances) {
      if (u.plan.specs.empty()) continue;
      out << plan_to_json(u.plan).dump() << '\n';
    }
  }

  {
    std::ofstream out = open_out(out_path(cfg, "hypotheses.jsonl"));
    out << config_echo_json(cfg) << '\n';
    for (const UtteranceResult& u : result.utterances) {
      for (const Hypothesis& h : u.decode.hyps) {
        out << hyp_to_json(u.id, h).dump() << '\n';
      }
    }
  }
}

void stage_simulate(const PipelineConfig& cfg) {
  if (cfg.manifest_path.empty()) {
    throw std::invalid_argument("config: manifest path is required");
  }
  const std::vector<ManifestEntry> manifest = read_manifest(cfg.manifest_path);
  std::vector<LongFormEntry> entries;
  if (cfg.sim.mode == "samespeaker") {
    entries = simulate_samespeaker(manifest, cfg.sim.target_s);
  } else {
    entries = simulate_alternating(manifest, cfg.sim.target_s, cfg.sim.order);
  }
  fs::create_directories(cfg.out_dir);
  write_longform(out_path(cfg, "longform.jsonl"), entries);
}

void stage_plan(const PipelineConfig& cfg) {
  const std::vector<LongInput> inputs = inputs_from_manifests(cfg);
  fs::create_directories(cfg.out_dir);
  std::ofstream out = open_out(out_path(cfg, "plans.jsonl"));
  out << config_echo_json(cfg) << '\n';
  for (const LongInput& input : inputs) {
    out << plan_to_json(plan_input(cfg, input)).dump() << '\n';
  }
}

void stage_decode(const PipelineConfig& cfg) {
  const std::vector<LongInput> inputs = inputs_from_manifests(cfg);

  std::map<std::string, SegmentPlan> plans;
  {
    std::ifstream in = open_in(out_path(cfg, "plans.jsonl"),
                               "run the plan stage first");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const nlohmann::json doc = nlohmann::json::parse(line);
      if (!doc.contains("segments")) continue;  // config echo line
      SegmentPlan plan = plan_from_json(doc);
      plans.emplace(plan.utterance_id, std::move(plan));
    }
  }

  fs::create_directories(cfg.out_dir);
  std::ofstream out = open_out(out_path(cfg, "hypotheses.jsonl"));
  out << config_echo_json(cfg) << '\n';
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const LongInput& input = inputs[k];
    const auto it = plans.find(input.id);
    if (it == plans.end()) {
      throw std::runtime_error("plans.jsonl has no plan for " + input.id);
    }
    AudioBuffer audio_storage;
    const std::unique_ptr<DecoderBackend> backend =
        make_backend(cfg, input, k, audio_storage);
    const DecodeRun run = decode_plan(it->second, *backend, cfg.max_parallel);
    if (!run.ok()) {
      std::string msg = input.id + " failed:";
      for (const DecodeFailure& f : run.failures) {
        msg += " segment " + std::to_string(f.segment_index) + ": " + f.message + ";";
      }
      throw std::runtime_error(msg);
    }
    for (const Hypothesis& h : run.hyps) {
      out << hyp_to_json(input.id, h).dump() << '\n';
    }
  }
}

void stage_stitch(const PipelineConfig& cfg) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<Hypothesis>> grouped;
  {
    std::ifstream in = open_in(out_path(cfg, "hypotheses.jsonl"),
                               "run the decode stage first");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const nlohmann::json doc = nlohmann::json::parse(line);
      if (!doc.contains("utterance_id")) continue;  // config echo line
      std::string id;
      Hypothesis h = hyp_from_json(doc, &id);
      auto [it, inserted] = grouped.try_emplace(id);
      if (inserted) order.push_back(id);
      it->second.push_back(std::move(h));
    }
  }

  std::vector<StitchedTranscript> stitched;
  std::vector<const StitchedTranscript*> rows;
  stitched.reserve(order.size());
  for (const std::string& id : order) {
    std::vector<Hypothesis>& hyps = grouped[id];
    std::sort(hyps.begin(), hyps.end(),
              [](const Hypothesis& a, const Hypothesis& b) {
                return a.segment_index < b.segment_index;
              });
    stitched.push_back(stitch_hyps(cfg, hyps));
  }
  for (const StitchedTranscript& s : stitched) rows.push_back(&s);
  fs::create_directories(cfg.out_dir);
  write_transcripts_file(cfg, order, rows);
}

void stage_score(const PipelineConfig& cfg) {
  std::vector<std::string> ids;
  std::vector<std::vector<std::string>> hyps;
  {
    std::ifstream in = open_in(out_path(cfg, "transcripts.tsv"),
                               "run the stitch stage first");
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (!header_seen) {
        header_seen = true;  // column header row
        continue;
      }
      const std::size_t tab = line.find('\t');
      if (tab == std::string::npos) {
        throw std::runtime_error("transcripts.tsv: malformed row: " + line);
      }
      ids.push_back(line.substr(0, tab));
      std::vector<std::string> words;
      std::istringstream ss(line.substr(tab + 1));
      std::string w;
      while (ss >> w) words.push_back(w);
      hyps.push_back(std::move(words));
    }
  }

  if (cfg.manifest_path.empty()) {
    throw std::invalid_argument("config: manifest path is required");
  }
  const std::vector<ManifestEntry> manifest = read_manifest(cfg.manifest_path);
  std::map<std::string, const LongFormEntry*> refs;
  const std::vector<LongFormEntry> longform =
      load_longform_entries(cfg, manifest);
  for (const LongFormEntry& e : longform) refs.emplace(e.long_id, &e);

  std::map<std::string, TimingReport> timings;
  const std::string plans_path = out_path(cfg, "plans.jsonl");
  if (fs::exists(plans_path)) {
    std::ifstream in = open_in(plans_path, "plans");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const nlohmann::json doc = nlohmann::json::parse(line);
      if (!doc.contains("segments")) continue;
      const SegmentPlan plan = plan_from_json(doc);
      if (plan.specs.empty()) continue;
      TimingReport t;
      t.n_segments = static_cast<int>(plan.specs.size());
      const double duration = plan.specs.back().end_s;
      t.n_segments_naive =
          naive_segment_count(duration, plan.config.segment_len_s);
      t.ratio_T = static_cast<double>(t.n_segments) /
                  static_cast<double>(t.n_segments_naive);
      timings.emplace(plan.utterance_id, t);
    }
  }

  std::vector<WerReport> wers;
  std::vector<TimingReport> per_utt_timings;
  std::ofstream out = open_out(out_path(cfg, "report.csv"));
  out << config_echo_line(cfg) << '\n' << report_csv_header() << '\n';
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const auto ref = refs.find(ids[k]);
    if (ref == refs.end()) {
      throw std::runtime_error("no reference transcript for " + ids[k]);
    }
    const WerReport wer = score_wer(normalize_words(ref->second->transcript),
                                    normalize_words(hyps[k]));
    TimingReport timing;
    const auto t = timings.find(ids[k]);
    if (t != timings.end()) timing = t->second;
    out << report_csv_row(ids[k], wer, timing) << '\n';
    wers.push_back(wer);
    per_utt_timings.push_back(timing);
  }
  if (!wers.empty()) {
    out << report_csv_corpus_row(corpus_report(wers, per_utt_timings)) << '\n';
  }
}

BenchResult bench_alignment(const PipelineConfig& cfg, int repeats) {
  if (repeats < 1) {
    throw std::invalid_argument("bench: repeats must be >= 1");
  }
  PipelineConfig bench_cfg = cfg;
  bench_cfg.vad_enabled = false;
  bench_cfg.backend_kind = "mock";
  bench_cfg.mock.p_corrupt = 0.0;
  if (bench_cfg.overlap.overlap_pct <= 0.0) {
    bench_cfg.overlap.overlap_pct = 0.3;
  }

  const SynthLongParams params;
  const std::vector<LongInput> inputs = synth_corpus(1, params, bench_cfg.seed);
  const LongInput& input = inputs.front();
  const SegmentPlan plan = plan_input(bench_cfg, input);
  MockBackend backend(input.timed_words, bench_cfg.mock, input.duration_s);
  const DecodeRun run = decode_plan(plan, backend, 1);

  auto time_unit = [&](AlignUnit unit) {
    AlignCosts costs = bench_cfg.costs;
    costs.unit = unit;
    std::size_t sink = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < repeats; ++r) {
      sink += stitch_all(run.hyps, costs).words.size();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (sink == 0) {
      throw std::logic_error("bench: stitching produced no words");
    }
    return elapsed / static_cast<double>(repeats);
  };

  BenchResult result;
  result.repeats = repeats;
  result.word_s = time_unit(AlignUnit::kWord);
  result.char_s = time_unit(AlignUnit::kChar);
  return result;
}

std::vector<SweepRow> run_sweep(const PipelineConfig& base,
                                const std::vector<LongInput>& inputs) {
  std::vector<SweepRow> rows;
  for (double overlap : {0.0, 0.15, 0.30, 0.50}) {
    for (bool vad : {false, true}) {
      PipelineConfig cfg = base;
      cfg.overlap.overlap_pct = overlap;
      cfg.vad_enabled = vad;
      const PipelineResult result = run_pipeline(cfg, inputs);
      if (!result.corpus_valid) {
        throw std::runtime_error("sweep: every utterance failed at overlap " +
                                 std::to_string(overlap));
      }
      SweepRow row;
      row.overlap_pct = overlap;
      row.vad = vad;
      row.wer = result.corpus.wer.wer;
      row.mean_ratio_T = result.corpus.mean_ratio_T;
      row.mean_align_time_s = result.corpus.mean_align_time_s;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string sweep_csv(const PipelineConfig& base,
                      const std::vector<SweepRow>& rows) {
  std::string out = config_echo_line(base) + '\n';
  out += "exp,vad,wer_pct,ratio_T,align_time_s\n";
  for (const SweepRow& row : rows) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "ovl-%02d,%s,%.2f,%.2f,%.4f\n",
                  static_cast<int>(std::lround(row.overlap_pct * 100.0)),
                  row.vad ? "on" : "off", row.wer * 100.0, row.mean_ratio_T,
                  row.mean_align_time_s);
    out += buf;
  }
  return out;
}

}  // namespace ovlinf
