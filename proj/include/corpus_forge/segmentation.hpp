// Copyright 2026 The corpus-forge Authors
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

#ifndef CORPUS_FORGE_SEGMENTATION_HPP_
#define CORPUS_FORGE_SEGMENTATION_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "corpus_forge/audio.hpp"

namespace cforge {

struct SilenceSpan {
  std::size_t start_sample = 0;
  std::size_t end_sample = 0;  // exclusive
  double threshold_db = 0.0;

  std::size_t center() const { return (start_sample + end_sample) / 2; }
};

enum class SegmentFlag {
  kNone,
  // Sub-minimum remainder at the end that could not merge within max_len.
  kTailShort,
  // Sub-minimum first piece whose forward merge would exceed max_len.
  kHeadShort,
  // Both merge directions exceeded max_len; the shorter result was kept.
  kOverMax,
};

struct Segment {
  std::size_t start_sample = 0;
  std::size_t end_sample = 0;  // exclusive
  std::string source_id;
  std::size_t ordinal = 0;
  SegmentFlag flag = SegmentFlag::kNone;

  std::size_t length() const { return end_sample - start_sample; }
};

struct SplitParams {
  double min_len_s = 5.0;
  double max_len_s = 40.0;
  double min_silence_s = 0.2;
  double start_db = -70.0;
  double step_db = 2.0;
  double ceiling_db = -20.0;
  double window_s = kDefaultFrameWindowS;
  double hop_s = kDefaultFrameHopS;
};

struct SplitResult {
  std::vector<Segment> segments;
  double threshold_db = 0.0;          // level at which the split succeeded
  std::vector<SilenceSpan> silences;  // spans detected at that level
};

std::vector<SilenceSpan> detect_silence(const AudioClip& clip,
                                        double threshold_db,
                                        double min_silence_s,
                                        double window_s = kDefaultFrameWindowS,
                                        double hop_s = kDefaultFrameHopS);

// Same as above over precomputed levels; lets the threshold search reuse one
// framing pass.
std::vector<SilenceSpan> detect_silence(const std::vector<FrameLevel>& frames,
                                        const FrameGrid& grid,
                                        std::size_t n_samples, int sample_rate,
                                        double threshold_db,
                                        double min_silence_s);

// Throws Error(kNoSplitFound) when the ceiling is reached without every piece
// fitting under max_len_s.
SplitResult adaptive_split(const AudioClip& clip, const SplitParams& params = {});

const char* to_string(SegmentFlag flag);

}  // namespace cforge

#endif  // CORPUS_FORGE_SEGMENTATION_HPP_
