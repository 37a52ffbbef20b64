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

#include "ovlinf/segmenter.h"

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace ovlinf {

namespace {

constexpr double kEdgeTol = 1e-9;

enum class ShiftSide { kLeft, kRight };

// Middle of the pause closest to `boundary` on the admissible side, if any
// lies strictly within max_shift. Starts at the configured pause duration
// and halves the requirement while the search comes up empty.
std::optional<double> find_shift_target(const PauseIndex& pauses,
                                        double boundary, ShiftSide side,
                                        double max_shift,
                                        const VadoiConfig& vcfg) {
  for (double d = vcfg.initial_pause_s; d >= vcfg.min_pause_s - kEdgeTol;
       d *= 0.5) {
    std::optional<double> best;
    double best_dist = max_shift;
    for (const Pause& p : pauses.at_least(d)) {
      const double mid = p.mid_s();
      if (side == ShiftSide::kLeft && mid > boundary + kEdgeTol) continue;
      if (side == ShiftSide::kRight && mid < boundary - kEdgeTol) continue;
      const double dist = std::fabs(mid - boundary);
      if (dist < best_dist) {
        best_dist = dist;
        best = mid;
      }
    }
    if (best) return best;
  }
  return std::nullopt;
}

}  // namespace

void OverlapConfig::validate() const {
  if (segment_len_s <= 0.0) {
    throw std::invalid_argument("segmenter: segment_len_s must be positive");
  }
  if (overlap_pct < 0.0 || overlap_pct >= 1.0) {
    throw std::invalid_argument("segmenter: overlap_pct must be in [0, 1)");
  }
}

void VadoiConfig::validate() const {
  if (initial_pause_s <= 0.0 || min_pause_s <= 0.0 ||
      min_pause_s > initial_pause_s) {
    throw std::invalid_argument(
        "segmenter: need initial_pause_s >= min_pause_s > 0");
  }
  if (triple_word_threshold < 0.0 || triple_word_threshold >= 1.0) {
    throw std::invalid_argument(
        "segmenter: triple_word_threshold must be in [0, 1)");
  }
}

SegmentPlan plan_fixed(double duration_s, const OverlapConfig& config) {
  config.validate();
  if (duration_s <= 0.0) {
    throw std::invalid_argument("plan_fixed: duration_s must be positive");
  }
  SegmentPlan plan;
  plan.config = config;
  const double hop = config.hop_s();
  for (int k = 0;; ++k) {
    SegmentSpec spec;
    spec.index = k;
    spec.start_s = static_cast<double>(k) * hop;
    spec.end_s = spec.start_s + config.segment_len_s;
    const bool last = spec.end_s >= duration_s - kEdgeTol;
    if (last) spec.end_s = duration_s;
    plan.specs.push_back(spec);
    if (last) break;
  }
  return plan;
}

SegmentSpec vadoi_shift(const SegmentSpec& spec, const SegmentSpec* prev,
                        const PauseIndex& pauses, const OverlapConfig& config,
                        const VadoiConfig& vcfg, double duration_s) {
  config.validate();
  vcfg.validate();
  const double max_shift = 0.5 * config.overlap_len_s();
  if (max_shift <= 0.0) return spec;

  SegmentSpec out = spec;

  // Ends only move left; an end at the utterance edge stays put.
  if (spec.end_s < duration_s - kEdgeTol) {
    const auto target = find_shift_target(pauses, spec.end_s, ShiftSide::kLeft,
                                          max_shift, vcfg);
    if (target && std::fabs(*target - spec.end_s) > kEdgeTol) {
      out.end_s = *target;
      out.end_shifted = true;
    }
  }

  // The first start is pinned; other starts move right only above the
  // overlap threshold.
  if (prev != nullptr) {
    const ShiftSide side = config.overlap_pct > vcfg.triple_word_threshold
                               ? ShiftSide::kRight
                               : ShiftSide::kLeft;
    const auto target =
        find_shift_target(pauses, spec.start_s, side, max_shift, vcfg);
    if (target && std::fabs(*target - spec.start_s) > kEdgeTol) {
      out.start_s = *target;
      out.start_shifted = true;
    }
  }

  if (out.start_s >= out.end_s - kEdgeTol) {
    SegmentSpec rollback = spec;
    rollback.shift_discarded = true;
    return rollback;
  }
  return out;
}

SegmentPlan plan_vadoi(double duration_s, const VadMask& mask,
                       const OverlapConfig& config, const VadoiConfig& vcfg) {
  SegmentPlan plan = plan_fixed(duration_s, config);
  plan.vadoi = true;
  const PauseIndex pauses(mask);
  const SegmentSpec* prev = nullptr;
  for (std::size_t k = 0; k < plan.specs.size(); ++k) {
    plan.specs[k] =
        vadoi_shift(plan.specs[k], prev, pauses, config, vcfg, duration_s);
    prev = &plan.specs[k];
  }
  return plan;
}

std::string plan_to_text(const SegmentPlan& plan) {
  std::ostringstream out;
  out << "# utterance_id=" << plan.utterance_id
      << " segment_len_s=" << plan.config.segment_len_s
      << " overlap_pct=" << plan.config.overlap_pct
      << " vadoi=" << (plan.vadoi ? 1 : 0) << "\n";
  out << "# index\tstart_s\tend_s\tshifts\n";
  for (const SegmentSpec& s : plan.specs) {
    out << s.index << "\t" << s.start_s << "\t" << s.end_s << "\t"
        << (s.start_shifted ? 'S' : '-') << (s.end_shifted ? 'E' : '-')
        << (s.shift_discarded ? "!" : "") << "\n";
  }
  return out.str();
}

nlohmann::json plan_to_json(const SegmentPlan& plan) {
  nlohmann::json j;
  j["utterance_id"] = plan.utterance_id;
  j["segment_len_s"] = plan.config.segment_len_s;
  j["overlap_pct"] = plan.config.overlap_pct;
  j["vadoi"] = plan.vadoi;
  j["segments"] = nlohmann::json::array();
  for (const SegmentSpec& s : plan.specs) {
    j["segments"].push_back({{"index", s.index},
                             {"start_s", s.start_s},
                             {"end_s", s.end_s},
                             {"start_shifted", s.start_shifted},
                             {"end_shifted", s.end_shifted},
                             {"shift_discarded", s.shift_discarded}});
  }
  return j;
}

SegmentPlan plan_from_json(const nlohmann::json& j) {
  SegmentPlan plan;
  plan.utterance_id = j.at("utterance_id").get<std::string>();
  plan.config.segment_len_s = j.at("segment_len_s").get<double>();
  plan.config.overlap_pct = j.at("overlap_pct").get<double>();
  plan.vadoi = j.at("vadoi").get<bool>();
  for (const auto& js : j.at("segments")) {
    SegmentSpec s;
    s.index = js.at("index").get<int>();
    s.start_s = js.at("start_s").get<double>();
    s.end_s = js.at("end_s").get<double>();
    s.start_shifted = js.value("start_shifted", false);
    s.end_shifted = js.value("end_shifted", false);
    s.shift_discarded = js.value("shift_discarded", false);
    plan.specs.push_back(s);
  }
  return plan;
}

}  // namespace ovlinf
