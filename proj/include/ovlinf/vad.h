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

#ifndef OVLINF_VAD_H_
#define OVLINF_VAD_H_

#include <cstddef>
#include <string>
#include <vector>

#include "ovlinf/audio.h"

namespace ovlinf {

/// Per-frame speech/non-speech decisions at the frame hop of the source
/// FrameSeries.
struct VadMask {
  std::vector<bool> speech;
  double hop_s = 0.0;

  std::size_t n_frames() const { return speech.size(); }
};

/// A maximal non-speech interval, [start_s, end_s).
struct Pause {
  double start_s = 0.0;
  double end_s = 0.0;

  double duration_s() const { return end_s - start_s; }
  double mid_s() const { return 0.5 * (start_s + end_s); }
};

enum class VadMode { kEnergy, kStatistical };

struct VadConfig {
  VadMode mode = VadMode::kEnergy;
  int noise_init_frames = 10;
  // Decision margin: nats above the noise floor in energy mode, the
  // log-likelihood-ratio threshold in statistical mode.
  double threshold = 6.0;
  int hangover_frames = 5;

  void validate() const;
};

// Energy mode: noise floor from the first noise_init_frames, tracked
// downward with an exponential factor of 0.999 per frame; a frame is speech
// iff its energy exceeds floor + threshold. Statistical mode: Gaussian
// likelihood-ratio test with decision-directed a-priori SNR (smoothing
// 0.98); a frame is speech iff its mean log-likelihood ratio exceeds the
// threshold. Both modes then fill non-speech runs shorter than
// hangover_frames that are flanked by speech.
VadMask run_vad(const FrameSeries& frames, const VadConfig& config);

// Maximal non-speech runs no shorter than min_dur_s, in time order.
std::vector<Pause> find_pauses(const VadMask& mask, double min_dur_s);

/// Pause lookup over one mask at any minimum duration. at_least(d) returns
/// exactly what find_pauses(mask, d) would.
class PauseIndex {
 public:
  explicit PauseIndex(const VadMask& mask);

  const std::vector<Pause>& all() const { return runs_; }
  std::vector<Pause> at_least(double min_dur_s) const;

 private:
  std::vector<Pause> runs_;
};

// One '0'/'1' line per frame, preceded by a "# hop_s=..." header.
void write_mask(const std::string& path, const VadMask& mask);

// CSV with a start_s,end_s header row.
void write_pauses_csv(const std::string& path, const std::vector<Pause>& pauses);

}  // namespace ovlinf

#endif  // OVLINF_VAD_H_
