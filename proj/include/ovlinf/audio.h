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

#ifndef OVLINF_AUDIO_H_
#define OVLINF_AUDIO_H_

#include <cstdint>
#include <string>
#include <vector>

namespace ovlinf {

/// Mono PCM audio, amplitudes normalized to [-1, 1].
struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate = 0;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

/// Per-frame log-energy series. Frame i covers [i*hop_s, i*hop_s + win_s).
struct FrameSeries {
  std::vector<double> frame_energy;
  double hop_s = 0.0;
  double win_s = 0.0;

  std::size_t n_frames() const { return frame_energy.size(); }
};

/// A reference word with its exact time span in utterance coordinates.
struct TimedWord {
  std::string word;
  double start_s = 0.0;
  double end_s = 0.0;

  double mid_s() const { return 0.5 * (start_s + end_s); }
};

// log(kEnergyEps) is the energy of digital silence.
inline constexpr double kEnergyEps = 1e-10;
inline constexpr double kDefaultWinS = 0.025;
inline constexpr double kDefaultHopS = 0.010;

// Reads RIFF/WAVE linear PCM (16-bit int or 32-bit float). Multi-channel
// input is downmixed to mono by channel average.
AudioBuffer load_wav(const std::string& path);

// Encodes as linear PCM WAVE. bits_per_sample must be 16 or 32 (float).
std::string encode_wav(const AudioBuffer& audio, int bits_per_sample = 16);
void save_wav(const std::string& path, const AudioBuffer& audio,
              int bits_per_sample = 16);

// frame_energy[i] = log(eps + mean(x^2) over the window).
// Audio shorter than one window yields an empty series.
FrameSeries frame_signal(const AudioBuffer& audio, double win_s = kDefaultWinS,
                         double hop_s = kDefaultHopS);

struct SynthResult {
  AudioBuffer audio;
  std::vector<TimedWord> words;
};

// Alternating band-limited noise bursts (peak amplitude 0.3) and exact
// silences. Word k is the literal token "w<k>", 1-based. Bit-identical
// output for identical arguments.
SynthResult synth_utterance(int word_count, double word_dur_s, double gap_s,
                            int sample_rate, std::uint64_t seed);

/// Layout knobs for the long-form fixture generator. Word and gap lengths
/// are drawn uniformly from the given ranges; every long_gap_every-th gap
/// is stretched to roughly long_gap_s.
struct SynthLongParams {
  double target_dur_s = 120.0;
  double word_min_s = 0.20;
  double word_max_s = 0.45;
  double gap_min_s = 0.18;
  double gap_max_s = 0.50;
  double long_gap_s = 2.2;
  int long_gap_every = 9;
  double lead_silence_s = 0.30;
  double tail_silence_s = 0.30;
  int sample_rate = 16000;
};

SynthResult synth_long_utterance(const SynthLongParams& params,
                                 std::uint64_t seed);

}  // namespace ovlinf

#endif  // OVLINF_AUDIO_H_
