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

#include "ovlinf/eval.h"

#include <cmath>
#include <string>
#include <vector>

#include "ovlinf/segmenter.h"
#include "oracles.h"

#include "doctest.h"

namespace ovlinf {
namespace {

using Words = std::vector<std::string>;

TEST_CASE("score_wer on identical sequences reports zero") {
  const WerReport r = score_wer({"a", "b", "c"}, {"a", "b", "c"});
  CHECK(r.n_ref == 3);
  CHECK(r.errors() == 0);
  CHECK(r.wer == 0.0);
}

TEST_CASE("score_wer counts one substitution and one deletion") {
  const WerReport r = score_wer({"a", "b", "c", "d"}, {"a", "x", "c"});
  CHECK(r.n_ref == 4);
  CHECK(r.subs == 1);
  CHECK(r.dels == 1);
  CHECK(r.ins == 0);
  CHECK(r.wer == doctest::Approx(0.5));
}

TEST_CASE("score_wer prefers substitutions when costs tie") {
  const WerReport r = score_wer({"a", "b"}, {"b", "a"});
  CHECK(r.subs == 2);
  CHECK(r.dels == 0);
  CHECK(r.ins == 0);
  CHECK(r.wer == doctest::Approx(1.0));
}

TEST_CASE("score_wer edge cases around empty sequences") {
  const WerReport both = score_wer({}, {});
  CHECK(both.wer == 0.0);
  CHECK(both.errors() == 0);

  const WerReport spurious = score_wer({}, {"a"});
  CHECK(spurious.n_ref == 0);
  CHECK(spurious.ins == 1);
  CHECK(std::isinf(spurious.wer));

  const WerReport missed = score_wer({"a", "b"}, {});
  CHECK(missed.dels == 2);
  CHECK(missed.wer == doctest::Approx(1.0));
}

TEST_CASE("score_wer can exceed one when the hypothesis runs long") {
  const WerReport r = score_wer({"a"}, {"x", "y", "z"});
  CHECK(r.errors() == 3);
  CHECK(r.wer == doctest::Approx(3.0));
}

TEST_CASE("score_wer error total matches the reference edit distance") {
  oracle::Rng rng(17);
  for (int t = 0; t < 300; ++t) {
    const Words ref = oracle::words_from(rng, 8, 1, 2, 3);
    const Words hyp = oracle::words_from(rng, 8, 1, 2, 3);
    const WerReport r = score_wer(ref, hyp);
    CHECK(r.errors() == oracle::lev_distance(ref, hyp));
    CHECK(r.n_ref == static_cast<int>(ref.size()));
    // The counted path must be consistent with the sequence lengths.
    CHECK(r.n_ref - r.dels + r.ins == static_cast<int>(hyp.size()));
  }
}

TEST_CASE("normalize_text lowercases and strips punctuation in place") {
  CHECK(normalize_text("Hello, World!") == Words{"hello", "world"});
  CHECK(normalize_text("re-use the hy-phen") == Words{"reuse", "the", "hyphen"});
  CHECK(normalize_text("don't stop") == Words{"don't", "stop"});
  CHECK(normalize_text("  spaced\tout\nlines ") == Words{"spaced", "out", "lines"});
  CHECK(normalize_text("42 times") == Words{"42", "times"});
  CHECK(normalize_text("... --- ...") == Words{});
  CHECK(normalize_text("") == Words{});
}

TEST_CASE("normalize_words flattens multi-token entries") {
  CHECK(normalize_words({"One two", "THREE!"}) == Words{"one", "two", "three"});
}

TEST_CASE("corpus_report pools error counts over reference words") {
  WerReport a;
  a.n_ref = 10;
  a.subs = 1;
  WerReport b;
  b.n_ref = 10;
  b.subs = 1;
  b.dels = 1;
  b.ins = 1;
  TimingReport ta;
  ta.n_segments = 10;
  ta.n_segments_naive = 10;
  ta.ratio_T = 1.0;
  ta.align_time_s = 0.2;
  TimingReport tb;
  tb.n_segments = 14;
  tb.n_segments_naive = 10;
  tb.ratio_T = 1.4;
  tb.align_time_s = 0.4;

  const CorpusReport corpus = corpus_report({a, b}, {ta, tb});
  CHECK(corpus.n_utterances == 2);
  CHECK(corpus.wer.n_ref == 20);
  CHECK(corpus.wer.errors() == 4);
  CHECK(corpus.wer.wer == doctest::Approx(0.2));
  CHECK(corpus.mean_ratio_T == doctest::Approx(1.2));
  CHECK(corpus.mean_align_time_s == doctest::Approx(0.3));

  // Pooling is order-independent.
  const CorpusReport swapped = corpus_report({b, a}, {tb, ta});
  CHECK(swapped.wer.wer == corpus.wer.wer);
  CHECK(swapped.mean_ratio_T == doctest::Approx(corpus.mean_ratio_T));
}

TEST_CASE("corpus_report rejects empty or mismatched inputs") {
  CHECK_THROWS(corpus_report({}, {}));
  WerReport w;
  CHECK_THROWS(corpus_report({w}, {}));
}

TEST_CASE("pooling weights utterances by length, not equally") {
  WerReport small;
  small.n_ref = 1;
  small.subs = 1;  // 100% on one word
  WerReport large;
  large.n_ref = 99;  // clean
  const CorpusReport corpus = corpus_report({small, large}, {{}, {}});
  CHECK(corpus.wer.wer == doctest::Approx(0.01));
}

TEST_CASE("closed-form segment count matches the planner") {
  for (double duration : {24.0, 60.0, 119.9, 120.0, 121.3, 180.0}) {
    for (double pct : {0.0, 0.15, 0.30, 0.50}) {
      OverlapConfig config;
      config.segment_len_s = 12.0;
      config.overlap_pct = pct;
      const SegmentPlan plan = plan_fixed(duration, config);
      CHECK(closed_form_segment_count(duration, 12.0, pct) ==
            static_cast<int>(plan.specs.size()));
    }
  }
  CHECK(naive_segment_count(120.0, 12.0) == 10);
  CHECK(naive_segment_count(121.0, 12.0) == 11);
  CHECK(naive_segment_count(5.0, 12.0) == 1);
  CHECK(closed_form_segment_count(5.0, 12.0, 0.3) == 1);
}

TEST_CASE("report rows carry the full column set") {
  CHECK(report_csv_header() ==
        "utterance_id,n_ref,subs,dels,ins,wer,n_segments,ratio_T,align_time_s");

  WerReport wer;
  wer.n_ref = 4;
  wer.subs = 1;
  wer.dels = 1;
  wer.wer = 0.5;
  TimingReport timing;
  timing.n_segments = 14;
  timing.n_segments_naive = 10;
  timing.ratio_T = 1.4;
  timing.align_time_s = 0.25;
  CHECK(report_csv_row("long-0000", wer, timing) ==
        "long-0000,4,1,1,0,0.500000,14,1.400000,0.250000");

  WerReport empty_ref = score_wer({}, {"a"});
  CHECK(report_csv_row("long-0001", empty_ref, timing).find(",inf,") !=
        std::string::npos);

  CorpusReport corpus = corpus_report({wer}, {timing});
  const std::string row = report_csv_corpus_row(corpus);
  CHECK(row.substr(0, 7) == "corpus,");
  CHECK(row.find("0.500000") != std::string::npos);
}

}  // namespace
}  // namespace ovlinf
