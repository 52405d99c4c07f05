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

#ifndef CORPUS_FORGE_AUDIO_HPP_
#define CORPUS_FORGE_AUDIO_HPP_

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cforge {

inline constexpr double kSilenceFloorDb = -100.0;
inline constexpr double kDefaultFrameWindowS = 0.050;
inline constexpr double kDefaultFrameHopS = 0.025;

// Mono sample buffer. Samples are full-scale normalized to [-1, 1]; the
// constructor rejects anything else.
class AudioClip {
 public:
  AudioClip() = default;
  AudioClip(std::vector<float> samples, int sample_rate,
            std::string source_id = {});

  std::span<const float> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  int sample_rate() const { return sample_rate_; }
  const std::string& source_id() const { return source_id_; }
  double duration_seconds() const {
    return sample_rate_ > 0 ? static_cast<double>(samples_.size()) /
                                  sample_rate_
                            : 0.0;
  }

  // Copies [begin, end) into a new clip with the same rate.
  AudioClip slice(std::size_t begin, std::size_t end,
                  std::string source_id = {}) const;

  // Releases the buffer; used by callers that transform in place.
  std::vector<float> take_samples() && { return std::move(samples_); }

 private:
  std::vector<float> samples_;
  int sample_rate_ = 0;
  std::string source_id_;
};

struct FrameLevel {
  std::size_t frame_index = 0;
  double rms_db = kSilenceFloorDb;
};

// Frame geometry in samples. Frame i covers
// [i * hop, min(i * hop + window, n)).
struct FrameGrid {
  std::size_t window = 0;
  std::size_t hop = 0;
  std::size_t count = 0;

  static FrameGrid for_clip(std::size_t n_samples, int sample_rate,
                            double window_s, double hop_s);
  std::size_t begin(std::size_t i) const { return i * hop; }
  std::size_t end(std::size_t i, std::size_t n) const {
    return std::min(i * hop + window, n);
  }
};

AudioClip read_wav(const std::filesystem::path& path);
void write_wav(const AudioClip& clip, const std::filesystem::path& path);
// Canonical 16-bit PCM encoding of `clip`, as written by write_wav.
std::string encode_wav(const AudioClip& clip);
AudioClip decode_wav(std::string_view bytes, const std::string& source_id = {});

// Band-limited (Kaiser-windowed sinc) sample-rate conversion.
AudioClip resample(const AudioClip& clip, int target_rate);

std::vector<FrameLevel> frame_rms_db(const AudioClip& clip,
                                     double window_s = kDefaultFrameWindowS,
                                     double hop_s = kDefaultFrameHopS);

}  // namespace cforge

#endif  // CORPUS_FORGE_AUDIO_HPP_
