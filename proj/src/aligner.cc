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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>

namespace ovlinf {

namespace {

constexpr char kSentinel = '\x1f';
constexpr std::size_t kUntimedWindow = 50;

struct Sym {
  char ch = 0;
  int word = -1;
  bool sentinel = false;
};

// "ab c" -> a b <sep> c ; the separator carries the left word's index.
std::vector<Sym> explode(const std::vector<std::string>& words) {
  std::vector<Sym> syms;
  for (std::size_t w = 0; w < words.size(); ++w) {
    if (w > 0) syms.push_back({kSentinel, static_cast<int>(w) - 1, true});
    for (char c : words[w]) syms.push_back({c, static_cast<int>(w), false});
  }
  return syms;
}

bool sym_eq(const Sym& a, const Sym& b) {
  return a.sentinel == b.sentinel && a.ch == b.ch;
}

// Shared DP over any token kind. Equal-cost paths are common (e.g. the OI
// preset prices a del+ins pair the same as two substitutions), so each cell
// also carries the best achievable match count; the path realized is the one
// with the most matches among minimum-cost paths, remaining ties falling to
// Sub, then Del, then Ins.
template <typename EqFn, typename SubFn>
AlignmentPath dp_align(std::size_t m, std::size_t n, EqFn eq, SubFn subc,
                       const AlignCosts& c) {
  const bool poi = c.margin_policy == MarginPolicy::kPOI;
  enum Step : unsigned char { kNone = 0, kDiag, kUp, kLeft };
  struct Cell {
    double cost = 0.0;
    int matches = 0;
    unsigned char step = kNone;
  };
  std::vector<Cell> dp((m + 1) * (n + 1));
  auto at = [&dp, n](std::size_t i, std::size_t j) -> Cell& {
    return dp[i * (n + 1) + j];
  };

  for (std::size_t i = 1; i <= m; ++i) {
    at(i, 0).cost = poi ? 0.0 : at(i - 1, 0).cost + c.w_del;
    at(i, 0).step = kUp;
  }
  for (std::size_t j = 1; j <= n; ++j) {
    at(0, j).cost = at(0, j - 1).cost + c.w_ins;
    at(0, j).step = kLeft;
  }
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      Cell& cur = at(i, j);
      const Cell& pd = at(i - 1, j - 1);
      cur.cost = pd.cost + subc(i - 1, j - 1);
      cur.matches = pd.matches + (eq(i - 1, j - 1) ? 1 : 0);
      cur.step = kDiag;
      auto consider = [&cur](double cost, int matches, Step step) {
        if (cost < cur.cost || (cost == cur.cost && matches > cur.matches)) {
          cur.cost = cost;
          cur.matches = matches;
          cur.step = step;
        }
      };
      const Cell& pu = at(i - 1, j);
      consider(pu.cost + c.w_del, pu.matches, kUp);
      const Cell& pl = at(i, j - 1);
      consider(pl.cost + c.w_ins, pl.matches, kLeft);
    }
  }

  // POI may leave a suffix of next unconsumed; pick the cheapest row exit
  // (most matches, then smallest j, on ties).
  std::size_t jt = n;
  if (poi) {
    jt = 0;
    for (std::size_t j = 1; j <= n; ++j) {
      if (at(m, j).cost < at(m, jt).cost ||
          (at(m, j).cost == at(m, jt).cost &&
           at(m, j).matches > at(m, jt).matches)) {
        jt = j;
      }
    }
  }

  std::vector<AlignOp> rev;
  rev.reserve(m + n);
  std::size_t i = m;
  std::size_t j = jt;
  while (i > 0 || j > 0) {
    switch (at(i, j).step) {
      case kDiag: {
        AlignOp op;
        op.kind = eq(i - 1, j - 1) ? AlignOp::kMatch : AlignOp::kSub;
        op.i = static_cast<int>(i) - 1;
        op.j = static_cast<int>(j) - 1;
        op.cost = subc(i - 1, j - 1);
        rev.push_back(op);
        --i;
        --j;
        break;
      }
      case kUp: {
        const bool free_del = poi && j == 0;
        AlignOp op;
        op.kind = AlignOp::kDel;
        op.i = static_cast<int>(i) - 1;
        op.cost = free_del ? 0.0 : c.w_del;
        op.margin = free_del;
        rev.push_back(op);
        --i;
        break;
      }
      case kLeft: {
        AlignOp op;
        op.kind = AlignOp::kIns;
        op.j = static_cast<int>(j) - 1;
        op.cost = c.w_ins;
        rev.push_back(op);
        --j;
        break;
      }
      default:
        throw std::logic_error("align_pair: backtrace found no predecessor");
    }
  }
  std::reverse(rev.begin(), rev.end());

  AlignmentPath path;
  path.ops = std::move(rev);
  path.total_cost = at(m, jt).cost;
  if (poi) {
    for (std::size_t k = jt; k < n; ++k) {
      AlignOp op;
      op.kind = AlignOp::kIns;
      op.j = static_cast<int>(k);
      op.cost = 0.0;
      op.margin = true;
      path.ops.push_back(op);
    }
  }
  return path;
}

struct SwitchDecision {
  bool fallback = true;
  std::size_t take_prev = 0;
  std::size_t next_from = 0;
  int op_index = -1;
};

SwitchDecision decide_switch(std::size_t prev_words, const AlignmentPath& path) {
  SwitchDecision out;
  out.take_prev = prev_words;
  out.next_from = 0;

  std::ptrdiff_t first = -1;
  std::ptrdiff_t last = -1;
  for (std::size_t k = 0; k < path.ops.size(); ++k) {
    if (path.ops[k].margin) continue;
    if (first < 0) first = static_cast<std::ptrdiff_t>(k);
    last = static_cast<std::ptrdiff_t>(k);
  }
  if (first < 0) return out;

  const double mid = 0.5 * static_cast<double>(first + last);
  auto pick = [&](AlignOp::Kind kind) -> int {
    int best = -1;
    double best_dist = 0.0;
    for (std::ptrdiff_t k = first; k <= last; ++k) {
      const AlignOp& op = path.ops[static_cast<std::size_t>(k)];
      if (op.margin || op.kind != kind) continue;
      const double dist = std::fabs(static_cast<double>(k) - mid);
      if (best < 0 || dist < best_dist ||
          (dist == best_dist && k > best)) {
        best = static_cast<int>(k);
        best_dist = dist;
      }
    }
    return best;
  };

  int sw = pick(AlignOp::kMatch);
  bool is_sub = false;
  if (sw < 0) {
    sw = pick(AlignOp::kSub);
    is_sub = true;
  }
  if (sw < 0) return out;

  const AlignOp& op = path.ops[static_cast<std::size_t>(sw)];
  std::size_t wi;
  std::size_t wj;
  if (path.unit == AlignUnit::kChar) {
    wi = static_cast<std::size_t>(path.prev_word_of[op.i]);
    wj = static_cast<std::size_t>(path.next_word_of[op.j]);
  } else {
    wi = static_cast<std::size_t>(op.i);
    wj = static_cast<std::size_t>(op.j);
  }

  out.fallback = false;
  out.op_index = sw;
  if (is_sub) {
    const bool first_half = (sw - first) <= (last - sw);
    if (first_half) {
      out.take_prev = wi + 1;
      out.next_from = wj + 1;
    } else {
      out.take_prev = wi;
      out.next_from = wj;
    }
  } else {
    out.take_prev = wi + 1;
    out.next_from = wj + 1;
  }
  return out;
}

}  // namespace

void Hypothesis::validate() const {
  for (const std::string& w : words) {
    if (w.empty()) throw std::invalid_argument("hypothesis: empty word token");
  }
  if (!times.empty()) {
    if (times.size() != words.size()) {
      throw std::invalid_argument("hypothesis: times/words size mismatch");
    }
    double prev_start = segment_start_s - 1e-9;
    for (const auto& [s, e] : times) {
      if (s < prev_start || e < s || e > segment_end_s + 1e-9) {
        throw std::invalid_argument(
            "hypothesis: word times must be non-decreasing and inside the segment");
      }
      prev_start = s;
    }
  }
}

AlignCosts AlignCosts::oi() {
  AlignCosts c;
  c.w_del = 1.0;
  c.w_ins = 1.0;
  c.w_sub = 1.0;
  c.w_match = 0.0;
  c.margin_policy = MarginPolicy::kOI;
  return c;
}

AlignCosts AlignCosts::poi() {
  AlignCosts c;
  c.w_del = 2.0;
  c.w_ins = 2.0;
  c.w_sub = 1.0;
  c.w_match = -2.0;
  c.margin_policy = MarginPolicy::kPOI;
  return c;
}

void AlignCosts::validate() const {
  if (!(w_sub > w_match)) {
    throw std::invalid_argument("align costs: w_sub must exceed w_match");
  }
  if (w_del < 0.0 || w_ins < 0.0) {
    throw std::invalid_argument("align costs: w_del and w_ins must be >= 0");
  }
}

double cer_word(const std::string& a, const std::string& b) {
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  const auto denom = static_cast<double>(std::max<std::size_t>(1, std::max(m, n)));
  if (m == 0 || n == 0) return static_cast<double>(std::max(m, n)) / denom;

  std::vector<std::size_t> row(n + 1);
  for (std::size_t j = 0; j <= n; ++j) row[j] = j;
  for (std::size_t i = 1; i <= m; ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      diag = row[j];
      row[j] = std::min({sub, row[j] + 1, row[j - 1] + 1});
    }
  }
  return static_cast<double>(row[n]) / denom;
}

double sub_cost(const std::string& a, const std::string& b,
                const AlignCosts& costs) {
  if (!costs.soft_match) return a == b ? costs.w_match : costs.w_sub;
  return cer_word(a, b) * (costs.w_sub - costs.w_match) + costs.w_match;
}

AlignmentPath align_pair(const Hypothesis& prev, const Hypothesis& next,
                         const AlignCosts& costs) {
  costs.validate();
  if (costs.unit == AlignUnit::kWord) {
    const auto& a = prev.words;
    const auto& b = next.words;
    AlignmentPath path = dp_align(
        a.size(), b.size(),
        [&](std::size_t i, std::size_t j) { return a[i] == b[j]; },
        [&](std::size_t i, std::size_t j) { return sub_cost(a[i], b[j], costs); },
        costs);
    path.unit = AlignUnit::kWord;
    return path;
  }

  const std::vector<Sym> a = explode(prev.words);
  const std::vector<Sym> b = explode(next.words);
  // Per-symbol soft cost equals the hard cost: the error rate of two single
  // symbols is 0 or 1.
  AlignmentPath path = dp_align(
      a.size(), b.size(),
      [&](std::size_t i, std::size_t j) { return sym_eq(a[i], b[j]); },
      [&](std::size_t i, std::size_t j) {
        return sym_eq(a[i], b[j]) ? costs.w_match : costs.w_sub;
      },
      costs);
  path.unit = AlignUnit::kChar;
  path.prev_word_of.reserve(a.size());
  for (const Sym& s : a) path.prev_word_of.push_back(s.word);
  path.next_word_of.reserve(b.size());
  for (const Sym& s : b) path.next_word_of.push_back(s.word);
  return path;
}

StitchResult stitch_pair(const Hypothesis& prev, const Hypothesis& next,
                         const AlignmentPath& path) {
  const SwitchDecision sw = decide_switch(prev.words.size(), path);
  StitchResult out;
  out.switch_op_index = sw.op_index;
  out.take_prev = std::min(sw.take_prev, prev.words.size());
  out.next_from = std::min(sw.next_from, next.words.size());
  for (const AlignOp& op : path.ops) {
    if (op.margin) ++out.margin_ops;
    if (op.kind == AlignOp::kMatch) ++out.matches;
  }
  out.words.assign(prev.words.begin(),
                   prev.words.begin() + static_cast<std::ptrdiff_t>(out.take_prev));
  out.words.insert(out.words.end(),
                   next.words.begin() + static_cast<std::ptrdiff_t>(out.next_from),
                   next.words.end());
  return out;
}

StitchedTranscript stitch_all(const std::vector<Hypothesis>& hyps,
                              const AlignCosts& costs) {
  StitchedTranscript chain;
  bool first = true;
  double prev_seg_end = 0.0;
  for (const Hypothesis& h : hyps) {
    if (first) {
      chain.words = h.words;
      const bool timed = h.has_times();
      chain.times.assign(h.words.size(), {0.0, 0.0});
      chain.timed.assign(h.words.size(), timed ? 1 : 0);
      if (timed) chain.times = h.times;
      prev_seg_end = h.segment_end_s;
      first = false;
      continue;
    }

    std::size_t win = kUntimedWindow;
    if (h.has_times()) {
      // Expected overlap population, counted on both sides of the seam.
      std::size_t k_chain = 0;
      for (std::size_t idx = chain.words.size(); idx-- > 0;) {
        if (!chain.timed[idx]) break;
        const double mid = 0.5 * (chain.times[idx].first + chain.times[idx].second);
        if (mid < h.segment_start_s) break;
        ++k_chain;
      }
      std::size_t k_next = 0;
      for (const auto& [s, e] : h.times) {
        if (0.5 * (s + e) > prev_seg_end) break;
        ++k_next;
      }
      win = 2 * std::max(k_chain, k_next);
    }
    win = std::min(win, chain.words.size());
    const std::size_t base = chain.words.size() - win;

    Hypothesis window;
    window.words.assign(chain.words.begin() + static_cast<std::ptrdiff_t>(base),
                        chain.words.end());
    const AlignmentPath path = align_pair(window, h, costs);
    const SwitchDecision sw = decide_switch(window.words.size(), path);
    const std::size_t keep = base + std::min(sw.take_prev, window.words.size());
    const std::size_t from = std::min(sw.next_from, h.words.size());

    chain.words.resize(keep);
    chain.times.resize(keep);
    chain.timed.resize(keep);
    const bool timed = h.has_times();
    for (std::size_t k = from; k < h.words.size(); ++k) {
      chain.words.push_back(h.words[k]);
      chain.times.push_back(timed ? h.times[k] : std::pair<double, double>{0.0, 0.0});
      chain.timed.push_back(timed ? 1 : 0);
    }
    prev_seg_end = h.segment_end_s;
  }
  return chain;
}

int count_word_matches(const AlignmentPath& path, const Hypothesis& prev,
                       const Hypothesis& next) {
  if (path.unit == AlignUnit::kWord) {
    int n = 0;
    for (const AlignOp& op : path.ops) n += op.kind == AlignOp::kMatch ? 1 : 0;
    return n;
  }
  const std::vector<Sym> a = explode(prev.words);
  const std::vector<Sym> b = explode(next.words);
  std::map<std::pair<int, int>, std::size_t> matched;
  for (const AlignOp& op : path.ops) {
    if (op.kind != AlignOp::kMatch) continue;
    // Separator matches glue words together; only characters count.
    if (a[static_cast<std::size_t>(op.i)].sentinel) continue;
    const int wi = path.prev_word_of[op.i];
    const int wj = path.next_word_of[op.j];
    matched[{wi, wj}] += 1;
  }
  int n = 0;
  for (const auto& [pair, count] : matched) {
    const auto& [wi, wj] = pair;
    const std::size_t lp = prev.words[static_cast<std::size_t>(wi)].size();
    const std::size_t ln = next.words[static_cast<std::size_t>(wj)].size();
    if (count == lp && lp == ln) ++n;
  }
  return n;
}

}  // namespace ovlinf
