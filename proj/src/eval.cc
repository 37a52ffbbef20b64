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

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace ovlinf {

namespace {

constexpr double kCountSlack = 1e-9;

std::string format_fraction(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::vector<std::string> normalize_text(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c) || c == '\'') {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (std::isspace(c)) {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
    }
    // Other punctuation vanishes without splitting the token.
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::string> normalize_words(const std::vector<std::string>& words) {
  std::vector<std::string> out;
  for (const std::string& w : words) {
    for (std::string& token : normalize_text(w)) out.push_back(std::move(token));
  }
  return out;
}

WerReport score_wer(const std::vector<std::string>& ref,
                    const std::vector<std::string>& hyp) {
  const std::size_t m = ref.size();
  const std::size_t n = hyp.size();

  std::vector<int> dp((m + 1) * (n + 1), 0);
  auto at = [&dp, n](std::size_t i, std::size_t j) -> int& {
    return dp[i * (n + 1) + j];
  };
  for (std::size_t i = 0; i <= m; ++i) at(i, 0) = static_cast<int>(i);
  for (std::size_t j = 0; j <= n; ++j) at(0, j) = static_cast<int>(j);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const int sub = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const int del = at(i - 1, j) + 1;
      const int ins = at(i, j - 1) + 1;
      at(i, j) = std::min(sub, std::min(del, ins));
    }
  }

  WerReport report;
  report.n_ref = static_cast<int>(m);
  std::size_t i = m;
  std::size_t j = n;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const int step = ref[i - 1] == hyp[j - 1] ? 0 : 1;
      if (at(i, j) == at(i - 1, j - 1) + step) {
        report.subs += step;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++report.dels;
      --i;
      continue;
    }
    ++report.ins;
    --j;
  }

  if (m == 0) {
    report.wer = n == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    report.wer = static_cast<double>(report.errors()) / static_cast<double>(m);
  }
  return report;
}

CorpusReport corpus_report(const std::vector<WerReport>& wers,
                           const std::vector<TimingReport>& timings) {
  if (wers.empty() || wers.size() != timings.size()) {
    throw std::invalid_argument(
        "corpus_report: need matching nonempty report lists");
  }
  CorpusReport corpus;
  corpus.n_utterances = static_cast<int>(wers.size());
  for (const WerReport& w : wers) {
    corpus.wer.n_ref += w.n_ref;
    corpus.wer.subs += w.subs;
    corpus.wer.dels += w.dels;
    corpus.wer.ins += w.ins;
  }
  if (corpus.wer.n_ref == 0) {
    corpus.wer.wer = corpus.wer.errors() == 0
                         ? 0.0
                         : std::numeric_limits<double>::infinity();
  } else {
    corpus.wer.wer = static_cast<double>(corpus.wer.errors()) /
                     static_cast<double>(corpus.wer.n_ref);
  }
  for (const TimingReport& t : timings) {
    corpus.mean_ratio_T += t.ratio_T;
    corpus.mean_align_time_s += t.align_time_s;
  }
  corpus.mean_ratio_T /= static_cast<double>(timings.size());
  corpus.mean_align_time_s /= static_cast<double>(timings.size());
  return corpus;
}

int closed_form_segment_count(double duration_s, double segment_len_s,
                              double overlap_pct) {
  const double over = std::max(0.0, duration_s - segment_len_s);
  const double hop = (1.0 - overlap_pct) * segment_len_s;
  return static_cast<int>(std::ceil(over / hop - kCountSlack)) + 1;
}

int naive_segment_count(double duration_s, double segment_len_s) {
  return static_cast<int>(
      std::max(1.0, std::ceil(duration_s / segment_len_s - kCountSlack)));
}

std::string report_csv_header() {
  return "utterance_id,n_ref,subs,dels,ins,wer,n_segments,ratio_T,align_time_s";
}

std::string report_csv_row(const std::string& utterance_id, const WerReport& wer,
                           const TimingReport& timing) {
  std::string row = utterance_id;
  row += ',' + std::to_string(wer.n_ref);
  row += ',' + std::to_string(wer.subs);
  row += ',' + std::to_string(wer.dels);
  row += ',' + std::to_string(wer.ins);
  row += ',' + format_fraction(wer.wer);
  row += ',' + std::to_string(timing.n_segments);
  row += ',' + format_fraction(timing.ratio_T);
  row += ',' + format_fraction(timing.align_time_s);
  return row;
}

std::string report_csv_corpus_row(const CorpusReport& corpus) {
  std::string row = "corpus";
  row += ',' + std::to_string(corpus.wer.n_ref);
  row += ',' + std::to_string(corpus.wer.subs);
  row += ',' + std::to_string(corpus.wer.dels);
  row += ',' + std::to_string(corpus.wer.ins);
  row += ',' + format_fraction(corpus.wer.wer);
  row += ',' + std::to_string(corpus.n_utterances);
  row += ',' + format_fraction(corpus.mean_ratio_T);
  row += ',' + format_fraction(corpus.mean_align_time_s);
  return row;
}

}  // namespace ovlinf
