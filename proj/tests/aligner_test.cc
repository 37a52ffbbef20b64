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

#include "ovlinf/aligner.h"

#include <cmath>
#include <string>
#include <vector>

#include "oracles.h"

#include "doctest.h"

namespace ovlinf {
namespace {

Hypothesis hyp(std::vector<std::string> words) {
  Hypothesis h;
  h.words = std::move(words);
  return h;
}

AlignCosts with_unit(AlignCosts costs, AlignUnit unit, bool soft = false) {
  costs.unit = unit;
  costs.soft_match = soft;
  return costs;
}

int match_ops(const AlignmentPath& path) {
  int n = 0;
  for (const AlignOp& op : path.ops) {
    if (op.kind == AlignOp::kMatch) ++n;
  }
  return n;
}

TEST_CASE("cer_word measures character distance over the longer token") {
  CHECK(cer_word("abc", "abc") == 0.0);
  CHECK(cer_word("cat", "bat") == doctest::Approx(1.0 / 3.0));
  CHECK(cer_word("a", "xyz") == doctest::Approx(1.0));
  CHECK(cer_word("kitten", "sitting") == doctest::Approx(3.0 / 7.0));
  CHECK(cer_word("", "") == 0.0);
  CHECK(cer_word("", "ab") == doctest::Approx(1.0));
  CHECK(cer_word("x", "") == doctest::Approx(1.0));
}

TEST_CASE("cer_word agrees with the reference edit distance") {
  oracle::Rng rng(41);
  for (int t = 0; t < 200; ++t) {
    const std::string a = oracle::word_from(rng, 0, 6, 4);
    const std::string b = oracle::word_from(rng, 0, 6, 4);
    const double denom =
        static_cast<double>(std::max<std::size_t>(1, std::max(a.size(), b.size())));
    CHECK(cer_word(a, b) ==
          doctest::Approx(static_cast<double>(oracle::lev_distance(a, b)) / denom));
  }
}

TEST_CASE("sub_cost hard mode prices only exact equality as a match") {
  const AlignCosts oi = AlignCosts::oi();
  CHECK(sub_cost("cat", "cat", oi) == 0.0);
  CHECK(sub_cost("cat", "cab", oi) == 1.0);
  const AlignCosts poi = AlignCosts::poi();
  CHECK(sub_cost("cat", "cat", poi) == -2.0);
  CHECK(sub_cost("cat", "bat", poi) == 1.0);
}

TEST_CASE("sub_cost soft mode interpolates between match and substitution") {
  AlignCosts poi = AlignCosts::poi();
  poi.soft_match = true;
  // One character in three differs: 1/3 * (1 - (-2)) + (-2) lands on -1.
  CHECK(sub_cost("cat", "bat", poi) == -1.0);
  CHECK(sub_cost("cat", "cat", poi) == -2.0);
  CHECK(sub_cost("abc", "xyz", poi) == 1.0);

  AlignCosts oi = AlignCosts::oi();
  oi.soft_match = true;
  CHECK(sub_cost("cat", "bat", oi) == doctest::Approx(1.0 / 3.0));
  CHECK(sub_cost("cat", "cat", oi) == 0.0);
  CHECK(sub_cost("ab", "xy", oi) == 1.0);
}

TEST_CASE("sub_cost soft mode is monotone in character distance") {
  AlignCosts poi = AlignCosts::poi();
  poi.soft_match = true;
  const double d0 = sub_cost("abcd", "abcd", poi);
  const double d1 = sub_cost("abcd", "abcx", poi);
  const double d2 = sub_cost("abcd", "abxy", poi);
  const double d4 = sub_cost("abcd", "wxyz", poi);
  CHECK(d0 < d1);
  CHECK(d1 < d2);
  CHECK(d2 < d4);
}

TEST_CASE("cost presets carry the published weights") {
  const AlignCosts oi = AlignCosts::oi();
  CHECK(oi.w_del == 1.0);
  CHECK(oi.w_ins == 1.0);
  CHECK(oi.w_sub == 1.0);
  CHECK(oi.w_match == 0.0);
  CHECK(oi.margin_policy == MarginPolicy::kOI);
  const AlignCosts poi = AlignCosts::poi();
  CHECK(poi.w_del == 2.0);
  CHECK(poi.w_ins == 2.0);
  CHECK(poi.w_sub == 1.0);
  CHECK(poi.w_match == -2.0);
  CHECK(poi.margin_policy == MarginPolicy::kPOI);

  AlignCosts bad = AlignCosts::oi();
  bad.w_match = bad.w_sub;
  CHECK_THROWS(bad.validate());
  bad = AlignCosts::oi();
  bad.w_del = -1.0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("Hypothesis::validate rejects malformed word timing") {
  Hypothesis h = hyp({"a", "b"});
  h.segment_start_s = 0.0;
  h.segment_end_s = 2.0;
  CHECK_NOTHROW(h.validate());
  h.times = {{0.0, 0.5}};
  CHECK_THROWS(h.validate());
  h.times = {{0.0, 0.5}, {1.0, 1.5}};
  CHECK_NOTHROW(h.validate());
  h.times = {{1.0, 1.5}, {0.0, 0.5}};  // starts must not decrease
  CHECK_THROWS(h.validate());
  h.times = {{0.0, 0.5}, {1.0, 2.5}};  // beyond the segment end
  CHECK_THROWS(h.validate());
  h = hyp({"a", ""});
  CHECK_THROWS(h.validate());
}

TEST_CASE("align_pair on identical inputs is all matches") {
  const Hypothesis a = hyp({"a", "b", "c"});
  const AlignmentPath path = align_pair(a, a, AlignCosts::oi());
  CHECK(path.total_cost == 0.0);
  REQUIRE(path.ops.size() == 3);
  for (const AlignOp& op : path.ops) {
    CHECK(op.kind == AlignOp::kMatch);
    CHECK(!op.margin);
  }
  CHECK(path.ops[1].i == 1);
  CHECK(path.ops[1].j == 1);
}

TEST_CASE("align_pair worked overlap example under both presets") {
  const Hypothesis prev = hyp({"x", "y", "a", "b"});
  const Hypothesis next = hyp({"a", "b", "z"});

  const AlignmentPath oi = align_pair(prev, next, AlignCosts::oi());
  CHECK(oi.total_cost == doctest::Approx(3.0));  // two dels + one ins
  CHECK(match_ops(oi) == 2);

  const AlignmentPath poi = align_pair(prev, next, AlignCosts::poi());
  CHECK(poi.total_cost == doctest::Approx(-4.0));  // two matches, margins free
  REQUIRE(poi.ops.size() == 5);
  CHECK(poi.ops[0].kind == AlignOp::kDel);
  CHECK(poi.ops[0].margin);
  CHECK(poi.ops[0].cost == 0.0);
  CHECK(poi.ops[1].kind == AlignOp::kDel);
  CHECK(poi.ops[1].margin);
  CHECK(poi.ops[2].kind == AlignOp::kMatch);
  CHECK(poi.ops[2].i == 2);
  CHECK(poi.ops[2].j == 0);
  CHECK(poi.ops[3].kind == AlignOp::kMatch);
  CHECK(poi.ops[4].kind == AlignOp::kIns);
  CHECK(poi.ops[4].margin);
}

TEST_CASE("align_pair with an empty side") {
  const Hypothesis none = hyp({});
  const Hypothesis one = hyp({"a"});

  const AlignmentPath oi_ins = align_pair(none, one, AlignCosts::oi());
  CHECK(oi_ins.total_cost == doctest::Approx(1.0));
  REQUIRE(oi_ins.ops.size() == 1);
  CHECK(oi_ins.ops[0].kind == AlignOp::kIns);

  const AlignmentPath oi_del = align_pair(one, none, AlignCosts::oi());
  CHECK(oi_del.total_cost == doctest::Approx(1.0));
  REQUIRE(oi_del.ops.size() == 1);
  CHECK(oi_del.ops[0].kind == AlignOp::kDel);

  // Margins absorb both directions for free.
  const AlignmentPath poi_ins = align_pair(none, one, AlignCosts::poi());
  CHECK(poi_ins.total_cost == 0.0);
  REQUIRE(poi_ins.ops.size() == 1);
  CHECK(poi_ins.ops[0].margin);

  const AlignmentPath poi_del = align_pair(one, none, AlignCosts::poi());
  CHECK(poi_del.total_cost == 0.0);
  REQUIRE(poi_del.ops.size() == 1);
  CHECK(poi_del.ops[0].margin);

  const AlignmentPath empty = align_pair(none, none, AlignCosts::oi());
  CHECK(empty.ops.empty());
  CHECK(empty.total_cost == 0.0);
}

TEST_CASE("equal-cost paths prefer matches over slides") {
  // Under unit costs, deleting the stale head and inserting the fresh tail
  // prices the same as substituting straight across; the shared run must
  // still come out as matches.
  std::vector<std::string> prev_words;
  std::vector<std::string> next_words;
  for (int k = 1; k <= 6; ++k) prev_words.push_back("p" + std::to_string(k));
  for (int k = 1; k <= 6; ++k) prev_words.push_back("c" + std::to_string(k));
  for (int k = 1; k <= 6; ++k) next_words.push_back("c" + std::to_string(k));
  for (int k = 1; k <= 9; ++k) next_words.push_back("n" + std::to_string(k));

  const Hypothesis prev = hyp(prev_words);
  const Hypothesis next = hyp(next_words);
  const AlignmentPath path = align_pair(prev, next, AlignCosts::oi());
  CHECK(path.total_cost == doctest::Approx(15.0));
  CHECK(match_ops(path) == 6);

  const StitchResult stitched = stitch_pair(prev, next, path);
  std::vector<std::string> expected = prev_words;
  for (int k = 1; k <= 9; ++k) expected.push_back("n" + std::to_string(k));
  CHECK(stitched.words == expected);
}

TEST_CASE("stitch_pair switches at the match closest to the path midpoint") {
  const Hypothesis prev = hyp({"a", "b"});
  const AlignmentPath path = align_pair(prev, prev, AlignCosts::oi());
  const StitchResult out = stitch_pair(prev, prev, path);
  CHECK(out.switch_op_index == 1);  // midpoint tie resolves to the later op
  CHECK(out.take_prev == 2);
  CHECK(out.next_from == 2);
  CHECK(out.words == std::vector<std::string>{"a", "b"});
  CHECK(out.matches == 2);
  CHECK(out.margin_ops == 0);
}

TEST_CASE("stitch_pair keeps margins outside the spliced region") {
  const Hypothesis prev = hyp({"x", "y", "a", "b"});
  const Hypothesis next = hyp({"a", "b", "z"});
  const AlignmentPath path = align_pair(prev, next, AlignCosts::poi());
  const StitchResult out = stitch_pair(prev, next, path);
  // Switch at the later of the two matches: all of prev, then next after b.
  CHECK(out.switch_op_index == 3);
  CHECK(out.words == std::vector<std::string>{"x", "y", "a", "b", "z"});
  CHECK(out.margin_ops == 3);
  CHECK(out.matches == 2);
}

TEST_CASE("with no match the central substitution splits the seam") {
  // Three straight substitutions: the middle one is the switch point and
  // counts as first-half, so prev supplies it.
  const Hypothesis prev3 = hyp({"p1", "p2", "p3"});
  const Hypothesis next3 = hyp({"n1", "n2", "n3"});
  const AlignmentPath path3 = align_pair(prev3, next3, AlignCosts::oi());
  REQUIRE(path3.ops.size() == 3);
  const StitchResult out3 = stitch_pair(prev3, next3, path3);
  CHECK(out3.switch_op_index == 1);
  CHECK(out3.take_prev == 2);
  CHECK(out3.next_from == 2);
  CHECK(out3.words == std::vector<std::string>{"p1", "p2", "n3"});

  // With two substitutions the tie resolves later, landing in the second
  // half, so next supplies the switch token.
  const Hypothesis prev2 = hyp({"p1", "p2"});
  const Hypothesis next2 = hyp({"n1", "n2"});
  const AlignmentPath path2 = align_pair(prev2, next2, AlignCosts::oi());
  const StitchResult out2 = stitch_pair(prev2, next2, path2);
  CHECK(out2.switch_op_index == 1);
  CHECK(out2.take_prev == 1);
  CHECK(out2.next_from == 1);
  CHECK(out2.words == std::vector<std::string>{"p1", "n2"});
}

TEST_CASE("an all-margin path falls back to plain concatenation") {
  const Hypothesis prev = hyp({"x"});
  const Hypothesis next = hyp({"y"});
  const AlignmentPath path = align_pair(prev, next, AlignCosts::poi());
  CHECK(path.total_cost == 0.0);
  const StitchResult out = stitch_pair(prev, next, path);
  CHECK(out.switch_op_index == -1);
  CHECK(out.words == std::vector<std::string>{"x", "y"});
  CHECK(out.margin_ops == 2);
}

TEST_CASE("margin ops only ever form a prefix of dels and a suffix of inses") {
  oracle::Rng rng(99);
  for (int t = 0; t < 200; ++t) {
    const Hypothesis prev = hyp(oracle::words_from(rng, 7, 1, 3, 4));
    const Hypothesis next = hyp(oracle::words_from(rng, 7, 1, 3, 4));
    const AlignmentPath path = align_pair(prev, next, AlignCosts::poi());
    bool seen_core = false;
    bool seen_suffix = false;
    double sum = 0.0;
    for (const AlignOp& op : path.ops) {
      sum += op.cost;
      if (op.margin) {
        CHECK(op.cost == 0.0);
        if (op.kind == AlignOp::kDel) CHECK(!seen_core);
        if (op.kind == AlignOp::kIns) seen_suffix = true;
        CHECK((op.kind == AlignOp::kDel || op.kind == AlignOp::kIns));
      } else {
        seen_core = true;
        CHECK(!seen_suffix);
      }
    }
    CHECK(path.total_cost == doctest::Approx(sum));
    // A full sweep of margins is always available, so the best is never
    // costlier than zero.
    CHECK(path.total_cost <= 0.0 + 1e-12);
  }
}

TEST_CASE("path op counts always cover both inputs exactly") {
  oracle::Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const Hypothesis prev = hyp(oracle::words_from(rng, 6, 1, 3, 3));
    const Hypothesis next = hyp(oracle::words_from(rng, 6, 1, 3, 3));
    for (const AlignCosts& costs : {AlignCosts::oi(), AlignCosts::poi()}) {
      const AlignmentPath path = align_pair(prev, next, costs);
      std::size_t consumed_prev = 0;
      std::size_t consumed_next = 0;
      int expect_i = 0;
      int expect_j = 0;
      for (const AlignOp& op : path.ops) {
        if (op.kind != AlignOp::kIns) {
          CHECK(op.i == expect_i);
          ++expect_i;
          ++consumed_prev;
        }
        if (op.kind != AlignOp::kDel) {
          CHECK(op.j == expect_j);
          ++expect_j;
          ++consumed_next;
        }
      }
      CHECK(consumed_prev == prev.words.size());
      CHECK(consumed_next == next.words.size());
    }
  }
}

TEST_CASE("stitched output length equals the declared splice") {
  oracle::Rng rng(13);
  for (int t = 0; t < 200; ++t) {
    const Hypothesis prev = hyp(oracle::words_from(rng, 6, 1, 3, 3));
    const Hypothesis next = hyp(oracle::words_from(rng, 6, 1, 3, 3));
    for (const AlignCosts& costs : {AlignCosts::oi(), AlignCosts::poi()}) {
      const AlignmentPath path = align_pair(prev, next, costs);
      const StitchResult out = stitch_pair(prev, next, path);
      CHECK(out.take_prev <= prev.words.size());
      CHECK(out.next_from <= next.words.size());
      CHECK(out.words.size() ==
            out.take_prev + next.words.size() - out.next_from);
    }
  }
}

TEST_CASE("alignment cost matches the exhaustive reference on small inputs") {
  oracle::Rng rng(55);
  for (int t = 0; t < 50; ++t) {
    const std::vector<std::string> prev_words = oracle::words_from(rng, 5, 1, 3, 3);
    const std::vector<std::string> next_words = oracle::words_from(rng, 5, 1, 3, 3);
    const Hypothesis prev = hyp(prev_words);
    const Hypothesis next = hyp(next_words);
    for (AlignCosts costs : {AlignCosts::oi(), AlignCosts::poi()}) {
      for (bool soft : {false, true}) {
        costs.soft_match = soft;
        const bool poi = costs.margin_policy == MarginPolicy::kPOI;
        const double expected = oracle::align_min_cost(
            prev_words, next_words, costs.w_del, costs.w_ins, costs.w_sub,
            costs.w_match, poi, soft);
        const AlignmentPath path = align_pair(prev, next, costs);
        CHECK(path.total_cost == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("character-unit alignment matches its exhaustive reference") {
  oracle::Rng rng(56);
  for (int t = 0; t < 50; ++t) {
    const std::vector<std::string> prev_words = oracle::words_from(rng, 3, 1, 2, 3);
    const std::vector<std::string> next_words = oracle::words_from(rng, 3, 1, 2, 3);
    const Hypothesis prev = hyp(prev_words);
    const Hypothesis next = hyp(next_words);
    for (AlignCosts base : {AlignCosts::oi(), AlignCosts::poi()}) {
      const AlignCosts costs = with_unit(base, AlignUnit::kChar);
      const bool poi = costs.margin_policy == MarginPolicy::kPOI;
      const double expected = oracle::align_min_cost_chars(
          prev_words, next_words, costs.w_del, costs.w_ins, costs.w_sub,
          costs.w_match, poi);
      const AlignmentPath path = align_pair(prev, next, costs);
      CHECK(path.total_cost == doctest::Approx(expected).epsilon(1e-12));
      CHECK(path.unit == AlignUnit::kChar);
    }
  }
}

TEST_CASE("character-unit paths map symbols back to their words") {
  const Hypothesis prev = hyp({"ab", "cd", "ef"});
  const Hypothesis next = hyp({"cd", "ef", "gh"});
  const AlignCosts costs = with_unit(AlignCosts::oi(), AlignUnit::kChar);
  const AlignmentPath path = align_pair(prev, next, costs);
  REQUIRE(!path.prev_word_of.empty());
  REQUIRE(!path.next_word_of.empty());
  CHECK(path.prev_word_of.size() == 8);  // 6 chars + 2 separators
  CHECK(path.prev_word_of[0] == 0);
  CHECK(path.prev_word_of[3] == 1);
  CHECK(path.next_word_of[7] == 2);

  // The shared words align whole, at both granularities.
  CHECK(count_word_matches(path, prev, next) == 2);
  const AlignmentPath word_path = align_pair(prev, next, AlignCosts::oi());
  CHECK(count_word_matches(word_path, prev, next) == 2);
}

TEST_CASE("partial character coverage does not count as a word match") {
  const Hypothesis prev = hyp({"abc"});
  const Hypothesis next = hyp({"abd"});
  const AlignCosts costs = with_unit(AlignCosts::oi(), AlignUnit::kChar);
  const AlignmentPath path = align_pair(prev, next, costs);
  CHECK(match_ops(path) == 2);  // a and b align as characters
  CHECK(count_word_matches(path, prev, next) == 0);
}

TEST_CASE("stitch_pair at char granularity still splices whole words") {
  const Hypothesis prev = hyp({"ab", "cd", "ef"});
  const Hypothesis next = hyp({"cd", "ef", "gh"});
  const AlignCosts costs = with_unit(AlignCosts::oi(), AlignUnit::kChar);
  const AlignmentPath path = align_pair(prev, next, costs);
  const StitchResult out = stitch_pair(prev, next, path);
  CHECK(out.words ==
        std::vector<std::string>{"ab", "cd", "ef", "gh"});
}

TEST_CASE("stitch_all chains segments and tracks word times") {
  Hypothesis a = hyp({"w1", "w2", "w3"});
  a.segment_index = 0;
  a.segment_start_s = 0.0;
  a.segment_end_s = 2.0;
  a.times = {{0.0, 0.4}, {0.6, 1.0}, {1.2, 1.6}};
  Hypothesis b = hyp({"w2", "w3", "w4"});
  b.segment_index = 1;
  b.segment_start_s = 0.5;
  b.segment_end_s = 2.5;
  b.times = {{0.6, 1.0}, {1.2, 1.6}, {1.8, 2.2}};

  const StitchedTranscript out = stitch_all({a, b}, AlignCosts::poi());
  CHECK(out.words == std::vector<std::string>{"w1", "w2", "w3", "w4"});
  REQUIRE(out.times.size() == 4);
  CHECK(out.times[3].first == doctest::Approx(1.8));
  for (char timed : out.timed) CHECK(timed == 1);
}

TEST_CASE("stitch_all handles empty and single-segment chains") {
  CHECK(stitch_all({}, AlignCosts::poi()).words.empty());
  Hypothesis only = hyp({"a", "b"});
  const StitchedTranscript out = stitch_all({only}, AlignCosts::poi());
  CHECK(out.words == std::vector<std::string>{"a", "b"});
  REQUIRE(out.timed.size() == 2);
  CHECK(out.timed[0] == 0);
}

TEST_CASE("stitch_all tolerates an empty middle segment") {
  Hypothesis a = hyp({"a", "b"});
  Hypothesis empty = hyp({});
  Hypothesis c = hyp({"b", "c"});
  const StitchedTranscript out = stitch_all({a, empty, c}, AlignCosts::poi());
  CHECK(out.words == std::vector<std::string>{"a", "b", "c"});
}

}  // namespace
}  // namespace ovlinf
