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

#include "ovlinf/vad.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace ovlinf {

namespace {

constexpr double kFloorDecay = 0.999;
constexpr double kSnrSmoothing = 0.98;
constexpr double kNoiseUpdate = 0.95;
constexpr double kDurationSlack = 1e-9;

void fill_short_gaps(std::vector<bool>& speech, int hangover_frames) {
  const std::size_t n = speech.size();
  std::size_t i = 0;
  while (i < n) {
    if (speech[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && !speech[j]) ++j;
    // Only interior gaps count as hangover; edges stay non-speech.
    const bool flanked = i > 0 && j < n;
    if (flanked && j - i < static_cast<std::size_t>(hangover_frames)) {
      for (std::size_t k = i; k < j; ++k) speech[k] = true;
    }
    i = j;
  }
}

std::vector<bool> energy_decisions(const FrameSeries& frames,
                                   const VadConfig& cfg) {
  const std::size_t n = frames.n_frames();
  std::vector<bool> speech(n, false);
  const std::size_t init =
      std::min<std::size_t>(n, static_cast<std::size_t>(cfg.noise_init_frames));
  double floor = 0.0;
  for (std::size_t i = 0; i < init; ++i) floor += frames.frame_energy[i];
  floor = init > 0 ? floor / static_cast<double>(init) : 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const double e = frames.frame_energy[i];
    speech[i] = e > floor + cfg.threshold;
    if (e < floor) floor = kFloorDecay * floor + (1.0 - kFloorDecay) * e;
  }
  return speech;
}

std::vector<bool> statistical_decisions(const FrameSeries& frames,
                                        const VadConfig& cfg) {
  const std::size_t n = frames.n_frames();
  std::vector<bool> speech(n, false);
  const std::size_t init =
      std::min<std::size_t>(n, static_cast<std::size_t>(cfg.noise_init_frames));
  double noise_var = 0.0;
  for (std::size_t i = 0; i < init; ++i) {
    noise_var += std::exp(frames.frame_energy[i]);
  }
  noise_var = init > 0 ? noise_var / static_cast<double>(init) : kEnergyEps;
  noise_var = std::max(noise_var, 1e-12);

  double prev_gain = 0.0;
  double prev_post_snr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double energy = std::exp(frames.frame_energy[i]);
    const double post_snr = std::min(energy / noise_var, 1e12);
    const double prio_snr =
        kSnrSmoothing * prev_gain * prev_gain * prev_post_snr +
        (1.0 - kSnrSmoothing) * std::max(post_snr - 1.0, 0.0);
    const double llr =
        post_snr * prio_snr / (1.0 + prio_snr) - std::log1p(prio_snr);
    speech[i] = llr > cfg.threshold;
    prev_gain = prio_snr / (1.0 + prio_snr);
    prev_post_snr = post_snr;
    if (!speech[i]) {
      noise_var = kNoiseUpdate * noise_var + (1.0 - kNoiseUpdate) * energy;
    }
  }
  return speech;
}

}  // namespace

void VadConfig::validate() const {
  if (noise_init_frames < 1) {
    throw std::invalid_argument("vad: noise_init_frames must be >= 1");
  }
  if (hangover_frames < 0) {
    throw std::invalid_argument("vad: hangover_frames must be >= 0");
  }
}

VadMask run_vad(const FrameSeries& frames, const VadConfig& config) {
  config.validate();
  VadMask mask;
  mask.hop_s = frames.hop_s;
  mask.speech = config.mode == VadMode::kEnergy
                    ? energy_decisions(frames, config)
                    : statistical_decisions(frames, config);
  fill_short_gaps(mask.speech, config.hangover_frames);
  return mask;
}

std::vector<Pause> find_pauses(const VadMask& mask, double min_dur_s) {
  if (min_dur_s < 0.0) {
    throw std::invalid_argument("find_pauses: min_dur_s must be >= 0");
  }
  std::vector<Pause> pauses;
  const std::size_t n = mask.n_frames();
  std::size_t i = 0;
  while (i < n) {
    if (mask.speech[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && !mask.speech[j]) ++j;
    const double dur = static_cast<double>(j - i) * mask.hop_s;
    if (dur >= min_dur_s - kDurationSlack) {
      Pause p;
      p.start_s = static_cast<double>(i) * mask.hop_s;
      p.end_s = static_cast<double>(j) * mask.hop_s;
      pauses.push_back(p);
    }
    i = j;
  }
  return pauses;
}

PauseIndex::PauseIndex(const VadMask& mask) : runs_(find_pauses(mask, 0.0)) {}

std::vector<Pause> PauseIndex::at_least(double min_dur_s) const {
  std::vector<Pause> out;
  for (const Pause& p : runs_) {
    if (p.duration_s() >= min_dur_s - kDurationSlack) out.push_back(p);
  }
  return out;
}

void write_mask(const std::string& path, const VadMask& mask) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write mask file: " + path);
  out << "# hop_s=" << mask.hop_s << "\n";
  for (bool s : mask.speech) out << (s ? '1' : '0') << "\n";
}

void write_pauses_csv(const std::string& path,
                      const std::vector<Pause>& pauses) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write pause file: " + path);
  out << "start_s,end_s\n";
  for (const Pause& p : pauses) out << p.start_s << "," << p.end_s << "\n";
}

}  // namespace ovlinf
