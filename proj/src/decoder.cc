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

#include "ovlinf/decoder.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <utility>

#include "httplib.h"
#include "json.hpp"

namespace ovlinf {

namespace {

constexpr double kEdgeTol = 1e-9;

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t word_key(std::uint64_t seed, int segment, std::size_t word) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(segment));
  return mix64(h ^ static_cast<std::uint64_t>(word));
}

double unit_draw(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

char shifted_char(char c, std::uint64_t h) {
  if (c >= 'a' && c <= 'z') {
    return static_cast<char>('a' + (c - 'a' + 1 + static_cast<int>(h % 25)) % 26);
  }
  if (c >= 'A' && c <= 'Z') {
    return static_cast<char>('A' + (c - 'A' + 1 + static_cast<int>(h % 25)) % 26);
  }
  if (c >= '0' && c <= '9') {
    return static_cast<char>('0' + (c - '0' + 1 + static_cast<int>(h % 9)) % 10);
  }
  return c == 'x' ? 'y' : 'x';
}

std::string substitute_similar(const std::string& w, std::uint64_t h) {
  std::string out = w;
  const std::uint64_t h2 = mix64(h ^ 0xD1CEULL);
  const std::size_t pos = static_cast<std::size_t>(h2 % out.size());
  out[pos] = shifted_char(out[pos], mix64(h2));
  return out;
}

// Keeps the character share matching the word's in-segment time share;
// a word straddling the segment start keeps its tail, otherwise its head.
std::string truncate_word(const std::string& w, const TimedWord& t,
                          const SegmentSpec& spec) {
  const double dur = t.end_s - t.start_s;
  if (dur <= 0.0) return w;
  const double in_start = std::max(t.start_s, spec.start_s);
  const double in_end = std::min(t.end_s, spec.end_s);
  const double frac = std::max(0.0, in_end - in_start) / dur;
  const auto len = static_cast<long>(w.size());
  const long kept = std::lround(frac * static_cast<double>(len));
  if (kept >= len) return w;
  if (kept <= 0) return std::string();
  if (t.start_s < spec.start_s - kEdgeTol) {
    return w.substr(w.size() - static_cast<std::size_t>(kept));
  }
  return w.substr(0, static_cast<std::size_t>(kept));
}

}  // namespace

void MockCorruption::validate() const {
  if (p_corrupt < 0.0 || p_corrupt > 1.0) {
    throw std::invalid_argument("mock corruption: p_corrupt must be in [0, 1]");
  }
  if (boundary_margin_s < 0.0) {
    throw std::invalid_argument("mock corruption: boundary_margin_s must be >= 0");
  }
}

Hypothesis mock_decode(const SegmentSpec& spec,
                       const std::vector<TimedWord>& reference,
                       const MockCorruption& corruption,
                       double utterance_duration_s) {
  corruption.validate();

  std::vector<double> cuts;
  if (spec.start_s > kEdgeTol) cuts.push_back(spec.start_s);
  if (spec.end_s < utterance_duration_s - kEdgeTol) cuts.push_back(spec.end_s);

  Hypothesis hyp;
  hyp.segment_index = spec.index;
  hyp.segment_start_s = spec.start_s;
  hyp.segment_end_s = spec.end_s;

  for (std::size_t k = 0; k < reference.size(); ++k) {
    const TimedWord& t = reference[k];
    const double mid = t.mid_s();
    if (mid < spec.start_s || mid >= spec.end_s) continue;

    bool near_cut = false;
    for (double cut : cuts) {
      if (t.start_s <= cut + corruption.boundary_margin_s &&
          t.end_s >= cut - corruption.boundary_margin_s) {
        near_cut = true;
        break;
      }
    }

    std::string word = t.word;
    if (near_cut) {
      const std::uint64_t h = word_key(corruption.seed, spec.index, k);
      if (unit_draw(h) < corruption.p_corrupt) {
        switch (corruption.mode) {
          case CorruptMode::kSubstituteSimilar:
            word = substitute_similar(word, h);
            break;
          case CorruptMode::kTruncate:
            word = truncate_word(word, t, spec);
            break;
          case CorruptMode::kDrop:
            word.clear();
            break;
        }
      }
    }
    if (word.empty()) continue;

    hyp.words.push_back(std::move(word));
    hyp.times.emplace_back(std::max(t.start_s, spec.start_s),
                           std::min(t.end_s, spec.end_s));
  }
  return hyp;
}

MockBackend::MockBackend(std::vector<TimedWord> reference,
                         MockCorruption corruption, double utterance_duration_s)
    : reference_(std::move(reference)),
      corruption_(corruption),
      utterance_duration_s_(utterance_duration_s) {
  corruption_.validate();
}

Hypothesis MockBackend::decode_segment(const SegmentSpec& spec) {
  return mock_decode(spec, reference_, corruption_, utterance_duration_s_);
}

void ExternalBackendConfig::validate() const {
  if (command.empty() == endpoint.empty()) {
    throw std::invalid_argument(
        "external backend: exactly one of command/endpoint must be set");
  }
  if (timeout_s <= 0.0) {
    throw std::invalid_argument("external backend: timeout_s must be > 0");
  }
}

AudioBuffer slice_segment(const AudioBuffer& audio, const SegmentSpec& spec) {
  const auto n = static_cast<long>(audio.samples.size());
  long s0 = std::lround(spec.start_s * audio.sample_rate);
  long s1 = std::lround(spec.end_s * audio.sample_rate);
  s0 = std::clamp(s0, 0L, n);
  s1 = std::clamp(s1, s0, n);
  AudioBuffer out;
  out.sample_rate = audio.sample_rate;
  out.samples.assign(audio.samples.begin() + s0, audio.samples.begin() + s1);
  return out;
}

Hypothesis parse_backend_response(const std::string& body,
                                  const SegmentSpec& spec) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("backend response is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("words") || !doc["words"].is_array()) {
    throw DecodeError("backend response lacks a \"words\" array");
  }

  Hypothesis hyp;
  hyp.segment_index = spec.index;
  hyp.segment_start_s = spec.start_s;
  hyp.segment_end_s = spec.end_s;
  try {
    for (const auto& w : doc["words"]) {
      hyp.words.push_back(w.get<std::string>());
    }
    const bool has_start = doc.contains("start_s");
    const bool has_end = doc.contains("end_s");
    if (has_start != has_end) {
      throw DecodeError("backend response has only one of start_s/end_s");
    }
    if (has_start) {
      const auto& ss = doc["start_s"];
      const auto& es = doc["end_s"];
      if (!ss.is_array() || !es.is_array() || ss.size() != hyp.words.size() ||
          es.size() != hyp.words.size()) {
        throw DecodeError("backend response times do not match words");
      }
      for (std::size_t k = 0; k < hyp.words.size(); ++k) {
        hyp.times.emplace_back(ss[k].get<double>() + spec.start_s,
                               es[k].get<double>() + spec.start_s);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("backend response malformed: ") + e.what());
  }
  return hyp;
}

SubprocessBackend::SubprocessBackend(const AudioBuffer& audio,
                                     ExternalBackendConfig cfg)
    : audio_(audio), cfg_(std::move(cfg)) {
  cfg_.validate();
  if (cfg_.command.empty()) {
    throw std::invalid_argument("subprocess backend: command must be set");
  }
}

Hypothesis SubprocessBackend::decode_segment(const SegmentSpec& spec) {
  const std::string wav = encode_wav(slice_segment(audio_, spec));
  std::string out;
  try {
    out = run_process_io(cfg_.command, wav, cfg_.timeout_s);
  } catch (const DecodeError& e) {
    throw DecodeError("segment " + std::to_string(spec.index) + ": " + e.what());
  }
  return parse_backend_response(out, spec);
}

HttpBackend::HttpBackend(const AudioBuffer& audio, ExternalBackendConfig cfg)
    : audio_(audio), cfg_(std::move(cfg)) {
  cfg_.validate();
  if (cfg_.endpoint.empty()) {
    throw std::invalid_argument("http backend: endpoint must be set");
  }
}

Hypothesis HttpBackend::decode_segment(const SegmentSpec& spec) {
  const std::string wav = encode_wav(slice_segment(audio_, spec));

  const std::size_t scheme = cfg_.endpoint.find("://");
  const std::size_t slash =
      cfg_.endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  const std::string base = slash == std::string::npos
                               ? cfg_.endpoint
                               : cfg_.endpoint.substr(0, slash);
  const std::string path =
      slash == std::string::npos ? "/" : cfg_.endpoint.substr(slash);

  httplib::Client client(base);
  const auto whole = static_cast<time_t>(cfg_.timeout_s);
  const auto micros =
      static_cast<time_t>((cfg_.timeout_s - static_cast<double>(whole)) * 1e6);
  client.set_connection_timeout(whole, micros);
  client.set_read_timeout(whole, micros);
  client.set_write_timeout(whole, micros);

  auto res = client.Post(path, wav, "audio/wav");
  if (!res) {
    throw DecodeError("segment " + std::to_string(spec.index) +
                      ": http request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw DecodeError("segment " + std::to_string(spec.index) +
                      ": http status " + std::to_string(res->status));
  }
  return parse_backend_response(res->body, spec);
}

DecodeRun decode_plan(const SegmentPlan& plan, DecoderBackend& backend,
                      int max_parallel) {
  if (max_parallel < 1) {
    throw std::invalid_argument("decode_plan: max_parallel must be >= 1");
  }
  const std::size_t n = plan.specs.size();

  DecodeRun run;
  run.hyps.resize(n);
  run.segment_wall_s.assign(n, 0.0);
  std::vector<std::string> errors(n);

  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = cursor.fetch_add(1);
      if (k >= n) return;
      const SegmentSpec& spec = plan.specs[k];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        run.hyps[k] = backend.decode_segment(spec);
      } catch (const std::exception& e) {
        errors[k] = e.what();
        run.hyps[k] = Hypothesis{};
        run.hyps[k].segment_index = spec.index;
        run.hyps[k].segment_start_s = spec.start_s;
        run.hyps[k].segment_end_s = spec.end_s;
      }
      run.segment_wall_s[k] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(max_parallel));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (!errors[k].empty()) {
      run.failures.push_back({plan.specs[k].index, errors[k]});
    }
  }
  return run;
}

}  // namespace ovlinf
