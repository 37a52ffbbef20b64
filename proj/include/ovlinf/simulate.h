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

#ifndef OVLINF_SIMULATE_H_
#define OVLINF_SIMULATE_H_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ovlinf/audio.h"

namespace ovlinf {

/// One short source utterance. word_start_s / word_end_s, when present,
/// give source-local per-word times and must match the transcript length.
struct ManifestEntry {
  std::string utterance_id;
  std::string audio_path;
  std::vector<std::string> transcript;
  std::string speaker_id;
  double duration_s = 0.0;
  std::vector<double> word_start_s;
  std::vector<double> word_end_s;

  bool has_times() const {
    return !transcript.empty() && word_start_s.size() == transcript.size() &&
           word_end_s.size() == transcript.size();
  }
  void validate() const;
};

/// One concatenated long-form utterance. A flagged entry is a remainder
/// that never reached the target length.
struct LongFormEntry {
  std::string long_id;
  std::vector<std::string> source_ids;
  double duration_s = 0.0;
  std::vector<std::string> transcript;
  bool flagged = false;
};

/// Which above/below-median utterance each pick takes.
enum class PairingOrder { kExtremeFirst, kMedianAdjacent };

/// Sorts by duration, splits at the median (lower middle; below = at most
/// median), then fills entries alternating above, below, above, ... An entry
/// closes as soon as its total exceeds target_s; an empty side falls back to
/// the smallest remaining utterance. The unfinished final entry, if any,
/// comes back flagged.
std::vector<LongFormEntry> simulate_alternating(
    const std::vector<ManifestEntry>& entries, double target_s,
    PairingOrder order = PairingOrder::kExtremeFirst);

/// Groups by speaker (first-appearance order), concatenates each group in
/// corpus order, and closes an entry once its total reaches target_s.
/// Per-speaker remainders come back flagged.
std::vector<LongFormEntry> simulate_samespeaker(
    const std::vector<ManifestEntry>& entries, double target_s);

struct ConcatResult {
  AudioBuffer audio;
  std::vector<TimedWord> words;  // utterance coordinates
};

/// Concatenates the entry's sources sample-exactly and offsets word times by
/// the running duration. Sources without word times spread their words
/// uniformly. `load` defaults to reading each source's audio_path.
ConcatResult concat_audio(
    const LongFormEntry& entry,
    const std::map<std::string, ManifestEntry>& manifest,
    const std::function<AudioBuffer(const ManifestEntry&)>& load = {});

std::vector<ManifestEntry> read_manifest(const std::string& path);
void write_manifest(const std::string& path,
                    const std::vector<ManifestEntry>& entries);
std::vector<LongFormEntry> read_longform(const std::string& path);
void write_longform(const std::string& path,
                    const std::vector<LongFormEntry>& entries);

}  // namespace ovlinf

#endif  // OVLINF_SIMULATE_H_
