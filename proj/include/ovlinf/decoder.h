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

#ifndef OVLINF_DECODER_H_
#define OVLINF_DECODER_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ovlinf/aligner.h"
#include "ovlinf/audio.h"
#include "ovlinf/segmenter.h"

namespace ovlinf {

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How the mock decoder damages words near segment cuts.
enum class CorruptMode { kSubstituteSimilar, kTruncate, kDrop };

struct MockCorruption {
  double boundary_margin_s = 0.1;
  double p_corrupt = 0.0;
  CorruptMode mode = CorruptMode::kSubstituteSimilar;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-segment decoder. Implementations must return identical output for
/// identical input and must tolerate concurrent calls.
class DecoderBackend {
 public:
  virtual ~DecoderBackend() = default;
  virtual bool emits_timestamps() const = 0;
  virtual Hypothesis decode_segment(const SegmentSpec& spec) = 0;
};

/// Reads the reference words that fall inside the segment (midpoint rule)
/// and damages the ones near interior cuts. Cuts at t = 0 or at the
/// utterance end are not cuts. Deterministic under (segment, seed).
Hypothesis mock_decode(const SegmentSpec& spec,
                       const std::vector<TimedWord>& reference,
                       const MockCorruption& corruption,
                       double utterance_duration_s);

class MockBackend : public DecoderBackend {
 public:
  MockBackend(std::vector<TimedWord> reference, MockCorruption corruption,
              double utterance_duration_s);

  bool emits_timestamps() const override { return true; }
  Hypothesis decode_segment(const SegmentSpec& spec) override;

 private:
  std::vector<TimedWord> reference_;
  MockCorruption corruption_;
  double utterance_duration_s_;
};

/// External backend wire contract: request is PCM WAVE bytes, response is
/// one JSON object {"words": [string], "start_s": [number]?, "end_s":
/// [number]?} with segment-relative times.
struct ExternalBackendConfig {
  std::string command;   // subprocess mode: run via /bin/sh -c, wav on stdin
  std::string endpoint;  // service mode: http://host:port/path, wav POSTed
  double timeout_s = 30.0;
  bool timestamps = false;

  void validate() const;  // exactly one of command/endpoint must be set
};

class SubprocessBackend : public DecoderBackend {
 public:
  SubprocessBackend(const AudioBuffer& audio, ExternalBackendConfig cfg);

  bool emits_timestamps() const override { return cfg_.timestamps; }
  Hypothesis decode_segment(const SegmentSpec& spec) override;

 private:
  const AudioBuffer& audio_;
  ExternalBackendConfig cfg_;
};

class HttpBackend : public DecoderBackend {
 public:
  HttpBackend(const AudioBuffer& audio, ExternalBackendConfig cfg);

  bool emits_timestamps() const override { return cfg_.timestamps; }
  Hypothesis decode_segment(const SegmentSpec& spec) override;

 private:
  const AudioBuffer& audio_;
  ExternalBackendConfig cfg_;
};

struct DecodeFailure {
  int segment_index = -1;
  std::string message;
};

struct DecodeRun {
  std::vector<Hypothesis> hyps;  // one per segment, index order
  std::vector<DecodeFailure> failures;
  std::vector<double> segment_wall_s;

  bool ok() const { return failures.empty(); }
};

/// Decodes every segment of the plan, up to max_parallel at a time. Output
/// order follows segment index regardless of completion order; a failed
/// segment leaves an empty hypothesis and a failure record.
DecodeRun decode_plan(const SegmentPlan& plan, DecoderBackend& backend,
                      int max_parallel);

/// Runs `command` via /bin/sh with `input` on stdin and returns its stdout.
/// Throws DecodeError on nonzero exit or when timeout_s elapses.
std::string run_process_io(const std::string& command, const std::string& input,
                           double timeout_s);

/// Parses a backend response into words plus optional per-word times,
/// shifting times by the segment start. Throws DecodeError on malformed
/// JSON or mismatched array lengths.
Hypothesis parse_backend_response(const std::string& body,
                                  const SegmentSpec& spec);

/// Copies the segment's sample range out of the utterance.
AudioBuffer slice_segment(const AudioBuffer& audio, const SegmentSpec& spec);

}  // namespace ovlinf

#endif  // OVLINF_DECODER_H_
