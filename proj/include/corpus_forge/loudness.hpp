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

#ifndef CORPUS_FORGE_LOUDNESS_HPP_
#define CORPUS_FORGE_LOUDNESS_HPP_

#include <cstddef>
#include <utility>

#include "corpus_forge/audio.hpp"

namespace cforge {

struct LoudnessReport {
  double integrated_lufs = 0.0;  // measured on the output clip
  double gain_applied_db = 0.0;
  std::size_t clipped_samples = 0;  // samples that would have exceeded full scale
  bool gain_capped = false;
};

// Gated integrated loudness in LUFS (K-weighting, 400 ms blocks with 75%
// overlap, -70 LUFS absolute gate, -10 LU relative gate). Mono input has a
// channel weight of 1. Throws Error(kMeasurement) for clips shorter than one
// block or with no block above the absolute gate.
double measure_integrated_loudness(const AudioClip& clip);

// Applies one scalar gain toward `target_lufs`. When that gain would push the
// peak beyond full scale it is reduced to the largest gain that does not,
// and the report records the cap.
std::pair<AudioClip, LoudnessReport> normalize_loudness(const AudioClip& clip,
                                                        double target_lufs = -20.0);

// Linear 0 -> 1 ramp over the first fade_s and 1 -> 0 over the last fade_s.
AudioClip apply_fade(const AudioClip& clip, double fade_s = 0.1);

}  // namespace cforge

#endif  // CORPUS_FORGE_LOUDNESS_HPP_
