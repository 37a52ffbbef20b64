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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace ovlinf {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const std::string& b, std::size_t off) {
  std::uint32_t v;
  std::memcpy(&v, b.data() + off, 4);
  return v;
}

std::uint16_t read_u16(const std::string& b, std::size_t off) {
  std::uint16_t v;
  std::memcpy(&v, b.data() + off, 2);
  return v;
}

void put_u32(std::string& b, std::uint32_t v) {
  char raw[4];
  std::memcpy(raw, &v, 4);
  b.append(raw, 4);
}

void put_u16(std::string& b, std::uint16_t v) {
  char raw[2];
  std::memcpy(raw, &v, 2);
  b.append(raw, 2);
}

// Uniform double in [-1, 1) from the full 64-bit engine output, so the
// mapping is identical on every platform.
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

// One noise burst of n samples, one-pole smoothed, peak-normalized.
void append_burst(std::vector<float>& out, std::size_t n, double peak,
                  std::mt19937_64& rng) {
  std::vector<double> burst(n);
  double y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    y = 0.55 * y + next_unit(rng);
    burst[i] = y;
  }
  double max_abs = 0.0;
  for (double v : burst) max_abs = std::max(max_abs, std::fabs(v));
  const double scale = max_abs > 0.0 ? peak / max_abs : 0.0;
  for (double v : burst) out.push_back(static_cast<float>(v * scale));
}

}  // namespace

AudioBuffer load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open audio file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0) {
    throw std::runtime_error("not a RIFF/WAVE file: " + path);
  }

  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  std::uint32_t sample_rate = 0;
  std::size_t data_off = 0;
  std::size_t data_len = 0;
  bool have_fmt = false;

  std::size_t off = 12;
  while (off + 8 <= bytes.size()) {
    const std::string id = bytes.substr(off, 4);
    const std::uint32_t len = read_u32(bytes, off + 4);
    const std::size_t body = off + 8;
    if (body + len > bytes.size()) {
      throw std::runtime_error("truncated WAVE chunk in " + path);
    }
    if (id == "fmt ") {
      if (len < 16) throw std::runtime_error("malformed fmt chunk in " + path);
      format = read_u16(bytes, body);
      channels = read_u16(bytes, body + 2);
      sample_rate = read_u32(bytes, body + 4);
      bits = read_u16(bytes, body + 14);
      if (format == kFormatExtensible && len >= 26) {
        // First two bytes of the SubFormat GUID carry the real format tag.
        const std::uint16_t ext_size = read_u16(bytes, body + 16);
        if (ext_size >= 22) format = read_u16(bytes, body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      data_off = body;
      data_len = len;
    }
    off = body + len + (len & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw std::runtime_error("missing fmt chunk in " + path);
  if (channels == 0 || sample_rate == 0) {
    throw std::runtime_error("malformed fmt chunk in " + path);
  }
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32) {
    throw std::runtime_error("unsupported WAVE encoding in " + path +
                             " (want 16-bit PCM or 32-bit float)");
  }

  const std::size_t bytes_per = bits / 8;
  const std::size_t n_frames = data_len / (bytes_per * channels);
  if (n_frames == 0) throw std::runtime_error("empty audio stream: " + path);

  AudioBuffer out;
  out.sample_rate = static_cast<int>(sample_rate);
  out.samples.resize(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t p = data_off + (f * channels + c) * bytes_per;
      if (pcm16) {
        std::int16_t s;
        std::memcpy(&s, bytes.data() + p, 2);
        acc += s / 32768.0;
      } else {
        float s;
        std::memcpy(&s, bytes.data() + p, 4);
        acc += s;
      }
    }
    out.samples[f] = static_cast<float>(acc / channels);
  }
  return out;
}

std::string encode_wav(const AudioBuffer& audio, int bits_per_sample) {
  if (audio.sample_rate <= 0) {
    throw std::invalid_argument("encode_wav: sample_rate must be positive");
  }
  if (bits_per_sample != 16 && bits_per_sample != 32) {
    throw std::invalid_argument("encode_wav: bits_per_sample must be 16 or 32");
  }
  const std::uint32_t n = static_cast<std::uint32_t>(audio.samples.size());
  const std::uint16_t bytes_per = static_cast<std::uint16_t>(bits_per_sample / 8);
  const std::uint32_t data_len = n * bytes_per;

  std::string b;
  b.reserve(44 + data_len);
  b.append("RIFF");
  put_u32(b, 36 + data_len);
  b.append("WAVE");
  b.append("fmt ");
  put_u32(b, 16);
  put_u16(b, bits_per_sample == 16 ? kFormatPcm : kFormatFloat);
  put_u16(b, 1);  // mono
  put_u32(b, static_cast<std::uint32_t>(audio.sample_rate));
  put_u32(b, static_cast<std::uint32_t>(audio.sample_rate) * bytes_per);
  put_u16(b, bytes_per);
  put_u16(b, static_cast<std::uint16_t>(bits_per_sample));
  b.append("data");
  put_u32(b, data_len);
  for (float v : audio.samples) {
    if (bits_per_sample == 16) {
      const double clamped = std::clamp(static_cast<double>(v), -1.0, 1.0);
      const auto s = static_cast<std::int16_t>(std::lrint(clamped * 32767.0));
      char raw[2];
      std::memcpy(raw, &s, 2);
      b.append(raw, 2);
    } else {
      char raw[4];
      std::memcpy(raw, &v, 4);
      b.append(raw, 4);
    }
  }
  return b;
}

void save_wav(const std::string& path, const AudioBuffer& audio,
              int bits_per_sample) {
  const std::string bytes = encode_wav(audio, bits_per_sample);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write audio file: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to audio file: " + path);
}

FrameSeries frame_signal(const AudioBuffer& audio, double win_s, double hop_s) {
  if (hop_s <= 0.0 || win_s < hop_s) {
    throw std::invalid_argument("frame_signal: need win_s >= hop_s > 0");
  }
  if (audio.sample_rate <= 0) {
    throw std::invalid_argument("frame_signal: sample_rate must be positive");
  }
  const auto win = static_cast<std::size_t>(std::llround(win_s * audio.sample_rate));
  const auto hop = static_cast<std::size_t>(std::llround(hop_s * audio.sample_rate));
  if (win == 0 || hop == 0) {
    throw std::invalid_argument("frame_signal: window shorter than one sample");
  }

  FrameSeries out;
  out.win_s = win_s;
  out.hop_s = hop_s;
  const std::size_t n = audio.samples.size();
  if (n < win) return out;

  const std::size_t n_frames = (n - win) / hop + 1;
  out.frame_energy.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    const std::size_t base = i * hop;
    double acc = 0.0;
    for (std::size_t k = 0; k < win; ++k) {
      const double s = audio.samples[base + k];
      acc += s * s;
    }
    out.frame_energy[i] = std::log(kEnergyEps + acc / static_cast<double>(win));
  }
  return out;
}

SynthResult synth_utterance(int word_count, double word_dur_s, double gap_s,
                            int sample_rate, std::uint64_t seed) {
  if (word_count < 1 || word_dur_s <= 0.0 || gap_s <= 0.0 || sample_rate <= 0) {
    throw std::invalid_argument("synth_utterance: non-positive layout argument");
  }
  const auto n_word = static_cast<std::size_t>(std::llround(word_dur_s * sample_rate));
  const auto n_gap = static_cast<std::size_t>(std::llround(gap_s * sample_rate));
  if (n_word == 0) {
    throw std::invalid_argument("synth_utterance: word shorter than one sample");
  }

  std::mt19937_64 rng(seed);
  SynthResult res;
  res.audio.sample_rate = sample_rate;
  res.audio.samples.reserve(static_cast<std::size_t>(word_count) * n_word +
                            static_cast<std::size_t>(word_count - 1) * n_gap);
  for (int k = 0; k < word_count; ++k) {
    if (k > 0) res.audio.samples.insert(res.audio.samples.end(), n_gap, 0.0f);
    const std::size_t start = res.audio.samples.size();
    append_burst(res.audio.samples, n_word, 0.3, rng);
    TimedWord w;
    w.word = "w" + std::to_string(k + 1);
    w.start_s = static_cast<double>(start) / sample_rate;
    w.end_s = static_cast<double>(start + n_word) / sample_rate;
    res.words.push_back(std::move(w));
  }
  return res;
}

SynthResult synth_long_utterance(const SynthLongParams& p, std::uint64_t seed) {
  if (p.target_dur_s <= 0.0 || p.sample_rate <= 0 || p.word_min_s <= 0.0 ||
      p.word_max_s < p.word_min_s || p.gap_min_s <= 0.0 ||
      p.gap_max_s < p.gap_min_s || p.long_gap_every < 1) {
    throw std::invalid_argument("synth_long_utterance: bad layout parameters");
  }
  const int sr = p.sample_rate;
  const auto target = static_cast<std::size_t>(std::llround(p.target_dur_s * sr));
  const auto tail = static_cast<std::size_t>(std::llround(p.tail_silence_s * sr));

  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };

  SynthResult res;
  res.audio.sample_rate = sr;
  res.audio.samples.insert(res.audio.samples.end(),
                           static_cast<std::size_t>(std::llround(p.lead_silence_s * sr)),
                           0.0f);
  int k = 0;
  while (true) {
    const double wd = uniform(p.word_min_s, p.word_max_s);
    const auto n_word = static_cast<std::size_t>(std::llround(wd * sr));
    if (res.audio.samples.size() + n_word + tail > target) break;

    const std::size_t start = res.audio.samples.size();
    append_burst(res.audio.samples, n_word, 0.3, rng);
    ++k;
    TimedWord w;
    w.word = "w" + std::to_string(k);
    w.start_s = static_cast<double>(start) / sr;
    w.end_s = static_cast<double>(start + n_word) / sr;
    res.words.push_back(std::move(w));

    double gap = uniform(p.gap_min_s, p.gap_max_s);
    if (k % p.long_gap_every == 0) gap = p.long_gap_s * uniform(0.9, 1.1);
    res.audio.samples.insert(res.audio.samples.end(),
                             static_cast<std::size_t>(std::llround(gap * sr)),
                             0.0f);
  }
  if (res.words.empty()) {
    throw std::invalid_argument("synth_long_utterance: target too short for one word");
  }
  res.audio.samples.insert(res.audio.samples.end(), tail, 0.0f);
  return res;
}

}  // namespace ovlinf
