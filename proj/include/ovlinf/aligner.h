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

#ifndef OVLINF_ALIGNER_H_
#define OVLINF_ALIGNER_H_

#include <string>
#include <utility>
#include <vector>

namespace ovlinf {

/// One segment's decoded words. times, when present, are per-word
/// [start_s, end_s] pairs in utterance coordinates.
struct Hypothesis {
  std::vector<std::string> words;
  std::vector<std::pair<double, double>> times;
  int segment_index = 0;
  double segment_start_s = 0.0;
  double segment_end_s = 0.0;

  bool has_times() const { return !words.empty() && times.size() == words.size(); }
  void validate() const;
};

/// kOI charges every edit; kPOI makes deletions of the previous hypothesis'
/// leading words and insertions of the next hypothesis' trailing words free.
enum class MarginPolicy { kOI, kPOI };

enum class AlignUnit { kWord, kChar };

struct AlignCosts {
  double w_del = 1.0;
  double w_ins = 1.0;
  double w_sub = 1.0;
  double w_match = 0.0;
  MarginPolicy margin_policy = MarginPolicy::kOI;
  AlignUnit unit = AlignUnit::kWord;
  bool soft_match = false;

  static AlignCosts oi();   // 1, 1, 1, 0
  static AlignCosts poi();  // 2, 2, 1, -2
  void validate() const;    // requires w_sub > w_match
};

struct AlignOp {
  enum Kind { kMatch, kSub, kDel, kIns };
  Kind kind = kMatch;
  int i = -1;  // consumed prev position, -1 for Ins
  int j = -1;  // consumed next position, -1 for Del
  double cost = 0.0;
  bool margin = false;
};

/// Ops in path order. With unit == kChar the positions index exploded
/// symbols (characters plus word separators); prev_word_of / next_word_of
/// map each symbol back to its word.
struct AlignmentPath {
  std::vector<AlignOp> ops;
  double total_cost = 0.0;
  AlignUnit unit = AlignUnit::kWord;
  std::vector<int> prev_word_of;
  std::vector<int> next_word_of;
};

struct StitchResult {
  std::vector<std::string> words;
  int switch_op_index = -1;  // -1 when no Match/Sub existed
  std::size_t take_prev = 0;  // prev words kept
  std::size_t next_from = 0;  // first next word kept
  int margin_ops = 0;
  int matches = 0;
};

struct StitchedTranscript {
  std::vector<std::string> words;
  std::vector<std::pair<double, double>> times;
  std::vector<char> timed;
};

// Character error rate between two tokens: unit-cost character Levenshtein
// over max token length. An empty token counts as one pseudo-character.
double cer_word(const std::string& a, const std::string& b);

// Hard: w_match iff equal, else w_sub. Soft: cer*(w_sub - w_match) + w_match.
double sub_cost(const std::string& a, const std::string& b,
                const AlignCosts& costs);

// Minimum-cost monotone edit path from prev to next under the cost regime.
// Among equal-cost paths the one with the most Match ops wins, with
// remaining ties resolving Sub > Del > Ins stepwise. With kPOI the path's
// total excludes leading prev deletions and trailing next insertions, which
// appear as zero-cost margin ops.
AlignmentPath align_pair(const Hypothesis& prev, const Hypothesis& next,
                         const AlignCosts& costs);

// Concatenates along the path, switching hypotheses at the Match closest to
// the midpoint of the non-margin region (ties toward the later op). With no
// Match the nearest Sub is used, taking prev's token in the first half of
// the region and next's otherwise. With neither, prev is emitted followed by
// all unconsumed next words.
StitchResult stitch_pair(const Hypothesis& prev, const Hypothesis& next,
                         const AlignmentPath& path);

// Left fold of stitch_pair over segment order. The chain side of each
// alignment is truncated to twice the expected overlap word count (counted
// from timestamps when present, else the last 50 words).
StitchedTranscript stitch_all(const std::vector<Hypothesis>& hyps,
                              const AlignCosts& costs);

// Whole-word matches in a path; full character coverage required per word
// when the path was computed at char granularity.
int count_word_matches(const AlignmentPath& path, const Hypothesis& prev,
                       const Hypothesis& next);

}  // namespace ovlinf

#endif  // OVLINF_ALIGNER_H_
