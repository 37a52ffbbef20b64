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

#include "ovlinf/audio.h"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"

namespace ovlinf {
namespace {

AudioBuffer constant_signal(float value, double seconds, int rate) {
  AudioBuffer audio;
  audio.sample_rate = rate;
  audio.samples.assign(static_cast<std::size_t>(seconds * rate), value);
  return audio;
}

TEST_CASE("frame_signal counts frames for one second at defaults") {
  const AudioBuffer audio = constant_signal(0.0f, 1.0, 16000);
  const FrameSeries frames = frame_signal(audio);
  // (16000 - 400) / 160 full hops plus the initial window.
  CHECK(frames.n_frames() == 98);
  CHECK(frames.hop_s == doctest::Approx(0.010));
  CHECK(frames.win_s == doctest::Approx(0.025));
}

TEST_CASE("frame_signal on silence yields the energy floor exactly") {
  const AudioBuffer audio = constant_signal(0.0f, 0.5, 16000);
  const FrameSeries frames = frame_signal(audio);
  REQUIRE(frames.n_frames() > 0);
  for (double e : frames.frame_energy) CHECK(e == std::log(kEnergyEps));
}

TEST_CASE("frame_signal on a constant signal matches mean-square energy") {
  const AudioBuffer audio = constant_signal(0.5f, 0.5, 16000);
  const FrameSeries frames = frame_signal(audio);
  const double expected = std::log(kEnergyEps + 0.25);
  REQUIRE(frames.n_frames() > 0);
  for (double e : frames.frame_energy) CHECK(e == doctest::Approx(expected));
}

TEST_CASE("frame_signal drops a tail shorter than one window") {
  AudioBuffer audio = constant_signal(0.1f, 0.0, 16000);
  audio.samples.assign(399, 0.1f);  // one sample short of a window
  CHECK(frame_signal(audio).n_frames() == 0);
  audio.samples.assign(400, 0.1f);
  CHECK(frame_signal(audio).n_frames() == 1);
}

TEST_CASE("synth_utterance lays words out on a fixed grid") {
  const SynthResult synth = synth_utterance(3, 0.4, 0.2, 16000, 7);
  CHECK(synth.audio.duration_s() == doctest::Approx(1.6));
  REQUIRE(synth.words.size() == 3);
  CHECK(synth.words[0].word == "w1");
  CHECK(synth.words[1].word == "w2");
  CHECK(synth.words[2].word == "w3");
  CHECK(synth.words[1].start_s == doctest::Approx(0.6));
  CHECK(synth.words[1].end_s == doctest::Approx(1.0));
  for (const TimedWord& w : synth.words) {
    CHECK(w.end_s - w.start_s == doctest::Approx(0.4));
    CHECK(w.mid_s() == doctest::Approx((w.start_s + w.end_s) / 2));
  }
}

TEST_CASE("synth_utterance is deterministic per seed") {
  const SynthResult a = synth_utterance(4, 0.3, 0.15, 16000, 11);
  const SynthResult b = synth_utterance(4, 0.3, 0.15, 16000, 11);
  const SynthResult c = synth_utterance(4, 0.3, 0.15, 16000, 12);
  CHECK(a.audio.samples == b.audio.samples);
  CHECK(a.audio.samples != c.audio.samples);
}

TEST_CASE("synth_utterance gaps are silent and words carry energy") {
  const SynthResult synth = synth_utterance(3, 0.4, 0.2, 16000, 3);
  const FrameSeries frames = frame_signal(synth.audio);
  const double floor_log = std::log(kEnergyEps);
  // A frame fully inside the first gap ([0.4, 0.6)) stays at the floor.
  const int gap_frame = static_cast<int>(0.47 / frames.hop_s);
  CHECK(frames.frame_energy[gap_frame] == floor_log);
  // A frame fully inside a word clears the floor by a wide margin.
  const int word_frame = static_cast<int>(0.2 / frames.hop_s);
  CHECK(frames.frame_energy[word_frame] > floor_log + 5.0);
}

TEST_CASE("synth_long_utterance respects its target duration and word bounds") {
  SynthLongParams params;
  params.target_dur_s = 30.0;
  const SynthResult synth = synth_long_utterance(params, 5);
  // The generator stops within one word of the target and may carry the
  // final gap past it.
  CHECK(synth.audio.duration_s() > params.target_dur_s - params.word_max_s);
  CHECK(synth.audio.duration_s() <=
        params.target_dur_s + 1.1 * params.long_gap_s + 1e-9);
  REQUIRE(!synth.words.empty());
  double prev_end = 0.0;
  for (const TimedWord& w : synth.words) {
    CHECK(w.start_s >= prev_end);
    CHECK(w.end_s > w.start_s);
    CHECK(w.end_s - w.start_s >= params.word_min_s - 1e-9);
    CHECK(w.end_s - w.start_s <= params.word_max_s + 1e-9);
    CHECK(w.end_s <= synth.audio.duration_s() + 1e-9);
    prev_end = w.end_s;
  }
  CHECK(synth.words.front().start_s == doctest::Approx(params.lead_silence_s));
}

TEST_CASE("synth_long_utterance inserts its periodic long gaps") {
  SynthLongParams params;
  params.target_dur_s = 60.0;
  const SynthResult synth = synth_long_utterance(params, 9);
  int long_gaps = 0;
  for (std::size_t i = 1; i < synth.words.size(); ++i) {
    const double gap = synth.words[i].start_s - synth.words[i - 1].end_s;
    CHECK(gap >= params.gap_min_s - 1e-9);
    CHECK(gap <= 1.1 * params.long_gap_s + 1e-9);
    // Stretched gaps land in [0.9, 1.1] x long_gap_s, far above gap_max_s.
    if (gap > params.gap_max_s + 0.25) ++long_gaps;
  }
  const int words = static_cast<int>(synth.words.size());
  CHECK(long_gaps >= words / params.long_gap_every - 1);
  CHECK(long_gaps <= words / params.long_gap_every);
}

TEST_CASE("wav round-trip is exact at 32-bit float") {
  const SynthResult synth = synth_utterance(2, 0.3, 0.1, 8000, 21);
  const std::string path = "audio_test_f32.wav";
  save_wav(path, synth.audio, 32);
  const AudioBuffer back = load_wav(path);
  std::remove(path.c_str());
  CHECK(back.sample_rate == synth.audio.sample_rate);
  CHECK(back.samples == synth.audio.samples);
}

TEST_CASE("wav round-trip at 16-bit stays within one quantization step") {
  const SynthResult synth = synth_utterance(2, 0.3, 0.1, 8000, 22);
  const std::string path = "audio_test_s16.wav";
  save_wav(path, synth.audio, 16);
  const AudioBuffer back = load_wav(path);
  std::remove(path.c_str());
  REQUIRE(back.samples.size() == synth.audio.samples.size());
  for (std::size_t i = 0; i < back.samples.size(); ++i) {
    CHECK(std::abs(back.samples[i] - synth.audio.samples[i]) <= 1.0f / 32767.0f);
  }
}

TEST_CASE("load_wav downmixes stereo by averaging channels") {
  // Hand-build a 2-channel 16-bit file: L = 8000, R = -4000 everywhere.
  const int rate = 8000;
  const int n = 16;
  std::string bytes;
  auto put_u32 = [&bytes](std::uint32_t v) {
    for (int k = 0; k < 4; ++k) bytes.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
  };
  auto put_u16 = [&bytes](std::uint16_t v) {
    for (int k = 0; k < 2; ++k) bytes.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
  };
  bytes += "RIFF";
  put_u32(36 + n * 4);
  bytes += "WAVEfmt ";
  put_u32(16);
  put_u16(1);          // PCM
  put_u16(2);          // channels
  put_u32(rate);
  put_u32(rate * 4);   // byte rate
  put_u16(4);          // block align
  put_u16(16);         // bits
  bytes += "data";
  put_u32(n * 4);
  for (int i = 0; i < n; ++i) {
    put_u16(static_cast<std::uint16_t>(8000));
    put_u16(static_cast<std::uint16_t>(-4000));
  }
  const std::string path = "audio_test_stereo.wav";
  {
    FILE* f = std::fopen(path.c_str(), "wb");
    REQUIRE(f != nullptr);
    std::fwrite(bytes.data(), 1, bytes.size(), f);
    std::fclose(f);
  }
  const AudioBuffer audio = load_wav(path);
  std::remove(path.c_str());
  CHECK(audio.sample_rate == rate);
  REQUIRE(audio.samples.size() == static_cast<std::size_t>(n));
  const float expected = (8000.0f / 32768.0f + -4000.0f / 32768.0f) / 2.0f;
  for (float s : audio.samples) CHECK(s == doctest::Approx(expected));
}

TEST_CASE("encode_wav rejects unsupported bit depths") {
  const AudioBuffer audio = constant_signal(0.1f, 0.01, 8000);
  CHECK_THROWS(encode_wav(audio, 24));
}

}  // namespace
}  // namespace ovlinf
