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

#include "ovlinf/simulate.h"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace ovlinf {

namespace {

std::string next_long_id(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "long-%04zu", k);
  return buf;
}

LongFormEntry close_entry(std::size_t k,
                          std::vector<const ManifestEntry*>&& sources,
                          bool flagged) {
  LongFormEntry entry;
  entry.long_id = next_long_id(k);
  entry.flagged = flagged;
  for (const ManifestEntry* src : sources) {
    entry.source_ids.push_back(src->utterance_id);
    entry.duration_s += src->duration_s;
    entry.transcript.insert(entry.transcript.end(), src->transcript.begin(),
                            src->transcript.end());
  }
  return entry;
}

}  // namespace

void ManifestEntry::validate() const {
  if (duration_s <= 0.0) {
    throw std::invalid_argument("manifest entry " + utterance_id +
                                ": duration_s must be > 0");
  }
  if (word_start_s.size() != word_end_s.size()) {
    throw std::invalid_argument("manifest entry " + utterance_id +
                                ": word_start_s/word_end_s length mismatch");
  }
  if (!word_start_s.empty() && word_start_s.size() != transcript.size()) {
    throw std::invalid_argument("manifest entry " + utterance_id +
                                ": word times do not match transcript length");
  }
}

std::vector<LongFormEntry> simulate_alternating(
    const std::vector<ManifestEntry>& entries, double target_s,
    PairingOrder order) {
  if (entries.size() < 2) {
    throw std::invalid_argument("simulate_alternating: need at least 2 entries");
  }
  for (const ManifestEntry& e : entries) e.validate();

  std::vector<const ManifestEntry*> sorted;
  sorted.reserve(entries.size());
  for (const ManifestEntry& e : entries) sorted.push_back(&e);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ManifestEntry* a, const ManifestEntry* b) {
                     return a->duration_s < b->duration_s;
                   });
  const double median = sorted[(sorted.size() - 1) / 2]->duration_s;

  std::deque<const ManifestEntry*> below;
  std::deque<const ManifestEntry*> above;
  for (const ManifestEntry* e : sorted) {
    (e->duration_s <= median ? below : above).push_back(e);
  }

  // kExtremeFirst pairs the longest with the shortest; kMedianAdjacent works
  // outward from the median instead.
  auto take_above = [&]() -> const ManifestEntry* {
    const ManifestEntry* e = order == PairingOrder::kExtremeFirst
                                 ? above.back()
                                 : above.front();
    if (order == PairingOrder::kExtremeFirst) {
      above.pop_back();
    } else {
      above.pop_front();
    }
    return e;
  };
  auto take_below = [&]() -> const ManifestEntry* {
    const ManifestEntry* e = order == PairingOrder::kExtremeFirst
                                 ? below.front()
                                 : below.back();
    if (order == PairingOrder::kExtremeFirst) {
      below.pop_front();
    } else {
      below.pop_back();
    }
    return e;
  };
  auto take_smallest_remaining = [&]() -> const ManifestEntry* {
    std::deque<const ManifestEntry*>& side = below.empty() ? above : below;
    const ManifestEntry* e = side.front();
    side.pop_front();
    return e;
  };

  std::vector<LongFormEntry> out;
  std::vector<const ManifestEntry*> current;
  double total = 0.0;
  bool want_above = true;
  while (!above.empty() || !below.empty()) {
    const ManifestEntry* pick;
    if (want_above && !above.empty()) {
      pick = take_above();
    } else if (!want_above && !below.empty()) {
      pick = take_below();
    } else {
      pick = take_smallest_remaining();
    }
    want_above = !want_above;
    current.push_back(pick);
    total += pick->duration_s;
    if (total > target_s) {
      out.push_back(close_entry(out.size(), std::move(current), false));
      current.clear();
      total = 0.0;
      want_above = true;
    }
  }
  if (!current.empty()) {
    out.push_back(close_entry(out.size(), std::move(current), true));
  }
  return out;
}

std::vector<LongFormEntry> simulate_samespeaker(
    const std::vector<ManifestEntry>& entries, double target_s) {
  for (const ManifestEntry& e : entries) e.validate();

  std::vector<std::string> speaker_order;
  std::map<std::string, std::vector<const ManifestEntry*>> groups;
  for (const ManifestEntry& e : entries) {
    auto [it, inserted] = groups.try_emplace(e.speaker_id);
    if (inserted) speaker_order.push_back(e.speaker_id);
    it->second.push_back(&e);
  }

  std::vector<LongFormEntry> out;
  for (const std::string& speaker : speaker_order) {
    std::vector<const ManifestEntry*> current;
    double total = 0.0;
    for (const ManifestEntry* e : groups[speaker]) {
      current.push_back(e);
      total += e->duration_s;
      if (total >= target_s) {
        out.push_back(close_entry(out.size(), std::move(current), false));
        current.clear();
        total = 0.0;
      }
    }
    if (!current.empty()) {
      out.push_back(close_entry(out.size(), std::move(current), true));
    }
  }
  return out;
}

ConcatResult concat_audio(
    const LongFormEntry& entry,
    const std::map<std::string, ManifestEntry>& manifest,
    const std::function<AudioBuffer(const ManifestEntry&)>& load) {
  const auto loader = load ? load : [](const ManifestEntry& e) {
    return load_wav(e.audio_path);
  };

  ConcatResult result;
  result.audio.sample_rate = 0;
  double offset = 0.0;
  for (const std::string& id : entry.source_ids) {
    const auto it = manifest.find(id);
    if (it == manifest.end()) {
      throw std::invalid_argument("concat_audio: unknown source id " + id);
    }
    const ManifestEntry& src = it->second;
    const AudioBuffer buf = loader(src);
    if (result.audio.sample_rate == 0) {
      result.audio.sample_rate = buf.sample_rate;
    } else if (buf.sample_rate != result.audio.sample_rate) {
      throw std::runtime_error("concat_audio: sample rate mismatch at " + id);
    }
    result.audio.samples.insert(result.audio.samples.end(), buf.samples.begin(),
                                buf.samples.end());

    const double dur = buf.duration_s();
    const std::size_t n_words = src.transcript.size();
    for (std::size_t k = 0; k < n_words; ++k) {
      TimedWord w;
      w.word = src.transcript[k];
      if (src.has_times()) {
        w.start_s = offset + src.word_start_s[k];
        w.end_s = offset + src.word_end_s[k];
      } else {
        w.start_s = offset + dur * static_cast<double>(k) /
                                 static_cast<double>(n_words);
        w.end_s = offset + dur * static_cast<double>(k + 1) /
                               static_cast<double>(n_words);
      }
      result.words.push_back(std::move(w));
    }
    offset += dur;
  }
  return result;
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": bad JSON: " + e.what());
    }
    ManifestEntry e;
    e.utterance_id = doc.value("utterance_id", "");
    e.audio_path = doc.value("audio_path", "");
    e.speaker_id = doc.value("speaker_id", "");
    e.duration_s = doc.value("duration_s", 0.0);
    if (doc.contains("transcript")) {
      e.transcript = doc["transcript"].get<std::vector<std::string>>();
    }
    if (doc.contains("word_start_s")) {
      e.word_start_s = doc["word_start_s"].get<std::vector<double>>();
    }
    if (doc.contains("word_end_s")) {
      e.word_end_s = doc["word_end_s"].get<std::vector<double>>();
    }
    e.validate();
    out.push_back(std::move(e));
  }
  return out;
}

void write_manifest(const std::string& path,
                    const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  for (const ManifestEntry& e : entries) {
    nlohmann::json doc;
    doc["utterance_id"] = e.utterance_id;
    doc["audio_path"] = e.audio_path;
    doc["transcript"] = e.transcript;
    doc["speaker_id"] = e.speaker_id;
    doc["duration_s"] = e.duration_s;
    if (!e.word_start_s.empty()) {
      doc["word_start_s"] = e.word_start_s;
      doc["word_end_s"] = e.word_end_s;
    }
    out << doc.dump() << '\n';
  }
}

std::vector<LongFormEntry> read_longform(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open longform manifest: " + path);
  std::vector<LongFormEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": bad JSON: " + e.what());
    }
    LongFormEntry e;
    e.long_id = doc.value("long_id", "");
    e.duration_s = doc.value("duration_s", 0.0);
    e.flagged = doc.value("flagged", false);
    if (doc.contains("source_ids")) {
      e.source_ids = doc["source_ids"].get<std::vector<std::string>>();
    }
    if (doc.contains("transcript")) {
      e.transcript = doc["transcript"].get<std::vector<std::string>>();
    }
    out.push_back(std::move(e));
  }
  return out;
}

void write_longform(const std::string& path,
                    const std::vector<LongFormEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write longform manifest: " + path);
  for (const LongFormEntry& e : entries) {
    nlohmann::json doc;
    doc["long_id"] = e.long_id;
    doc["source_ids"] = e.source_ids;
    doc["duration_s"] = e.duration_s;
    doc["transcript"] = e.transcript;
    doc["flagged"] = e.flagged;
    out << doc.dump() << '\n';
  }
}

}  // namespace ovlinf
