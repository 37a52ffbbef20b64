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

#ifndef OVLINF_EVAL_H_
#define OVLINF_EVAL_H_

#include <string>
#include <vector>

namespace ovlinf {

/// Word error counts against one reference. wer is (subs+dels+ins)/n_ref and
/// may exceed 1; an empty reference with a nonempty hypothesis reports +inf.
struct WerReport {
  int n_ref = 0;
  int subs = 0;
  int dels = 0;
  int ins = 0;
  double wer = 0.0;

  int errors() const { return subs + dels + ins; }
};

struct TimingReport {
  int n_segments = 0;
  int n_segments_naive = 0;
  double ratio_T = 0.0;  // n_segments / n_segments_naive
  double align_time_s = 0.0;
};

struct CorpusReport {
  WerReport wer;  // pooled counts: total errors over total reference words
  double mean_ratio_T = 0.0;
  double mean_align_time_s = 0.0;
  int n_utterances = 0;
};

// Lowercases ASCII, drops punctuation except apostrophes, and splits on
// whitespace. Tokens that become empty disappear.
std::vector<std::string> normalize_text(const std::string& text);
std::vector<std::string> normalize_words(const std::vector<std::string>& words);

// Unit-cost word Levenshtein; counts come from one minimal path with ties
// resolved Sub > Del > Ins.
WerReport score_wer(const std::vector<std::string>& ref,
                    const std::vector<std::string>& hyp);

// Pools error counts across utterances and averages the timing columns.
CorpusReport corpus_report(const std::vector<WerReport>& wers,
                           const std::vector<TimingReport>& timings);

// Closed-form segment counts for a fixed plan of the given duration.
int closed_form_segment_count(double duration_s, double segment_len_s,
                              double overlap_pct);
int naive_segment_count(double duration_s, double segment_len_s);

std::string report_csv_header();
std::string report_csv_row(const std::string& utterance_id, const WerReport& wer,
                           const TimingReport& timing);
std::string report_csv_corpus_row(const CorpusReport& corpus);

}  // namespace ovlinf

#endif  // OVLINF_EVAL_H_
