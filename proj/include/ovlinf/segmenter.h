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

#ifndef OVLINF_SEGMENTER_H_
#define OVLINF_SEGMENTER_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "ovlinf/vad.h"

namespace ovlinf {

struct OverlapConfig {
  double segment_len_s = 12.0;
  double overlap_pct = 0.0;  // in [0, 1)

  double hop_s() const { return segment_len_s * (1.0 - overlap_pct); }
  double overlap_len_s() const { return segment_len_s * overlap_pct; }
  void validate() const;
};

struct VadoiConfig {
  double initial_pause_s = 0.1;
  double min_pause_s = 0.01;
  // Starts move right only when overlap_pct strictly exceeds this.
  double triple_word_threshold = 0.4;

  void validate() const;
};

struct SegmentSpec {
  int index = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  bool start_shifted = false;
  bool end_shifted = false;
  // Set when a shift produced an empty interval and was rolled back.
  bool shift_discarded = false;
};

struct SegmentPlan {
  std::string utterance_id;
  std::vector<SegmentSpec> specs;
  OverlapConfig config;
  bool vadoi = false;
};

// Fixed-length plan: segment k is [k*hop, min(k*hop + len, duration));
// generation stops with the first segment whose end reaches the duration.
SegmentPlan plan_fixed(double duration_s, const OverlapConfig& config);

// Moves one segment's boundaries to the middle of the closest qualifying
// pause, searching pauses of at least initial_pause_s and halving that
// requirement (down to min_pause_s) while no pause middle lies within
// max_shift = overlap_len/2 on the admissible side. Ends only ever move
// left; starts move right when overlap_pct > triple_word_threshold, left
// otherwise. prev may be null for the first segment (its start is pinned);
// an end at duration_s is pinned too.
SegmentSpec vadoi_shift(const SegmentSpec& spec, const SegmentSpec* prev,
                        const PauseIndex& pauses, const OverlapConfig& config,
                        const VadoiConfig& vcfg, double duration_s);

// plan_fixed followed by vadoi_shift on every spec in index order.
SegmentPlan plan_vadoi(double duration_s, const VadMask& mask,
                       const OverlapConfig& config, const VadoiConfig& vcfg);

// Tab-separated debug listing, one row per segment, '#' config header.
std::string plan_to_text(const SegmentPlan& plan);

nlohmann::json plan_to_json(const SegmentPlan& plan);
SegmentPlan plan_from_json(const nlohmann::json& j);

}  // namespace ovlinf

#endif  // OVLINF_SEGMENTER_H_
