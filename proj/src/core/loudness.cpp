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

#include "corpus_forge/loudness.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "corpus_forge/error.hpp"

namespace cforge {

namespace {

constexpr double kBlockS = 0.4;
constexpr double kStepS = 0.1;
constexpr double kAbsoluteGate = -70.0;
constexpr double kRelativeGate = -10.0;
constexpr double kOffset = -0.691;

struct Biquad {
  double b0, b1, b2, a1, a2;
  double z1 = 0.0, z2 = 0.0;

  double process(double x) {
    const double y = b0 * x + z1;
    z1 = b1 * x - a1 * y + z2;
    z2 = b2 * x - a2 * y;
    return y;
  }
};

// Pre-filter (high shelf) and RLB high-pass designed for an arbitrary rate;
// at 48 kHz these reproduce the published coefficient tables.
Biquad shelf_stage(double rate) {
  const double f0 = 1681.974450955533;
  const double gain_db = 3.999843853973347;
  const double q = 0.7071752369554196;
  const double k = std::tan(M_PI * f0 / rate);
  const double vh = std::pow(10.0, gain_db / 20.0);
  const double vb = std::pow(vh, 0.4996667741545416);
  const double a0 = 1.0 + k / q + k * k;
  return {(vh + vb * k / q + k * k) / a0, 2.0 * (k * k - vh) / a0,
          (vh - vb * k / q + k * k) / a0, 2.0 * (k * k - 1.0) / a0,
          (1.0 - k / q + k * k) / a0};
}

Biquad highpass_stage(double rate) {
  const double f0 = 38.13547087602444;
  const double q = 0.5003270373238773;
  const double k = std::tan(M_PI * f0 / rate);
  const double a0 = 1.0 + k / q + k * k;
  return {1.0, -2.0, 1.0, 2.0 * (k * k - 1.0) / a0, (1.0 - k / q + k * k) / a0};
}

double to_lufs(double mean_square) {
  return kOffset + 10.0 * std::log10(mean_square);
}

}  // namespace

double measure_integrated_loudness(const AudioClip& clip) {
  const int rate = clip.sample_rate();
  const auto block = static_cast<std::size_t>(std::lround(kBlockS * rate));
  const auto step = static_cast<std::size_t>(std::lround(kStepS * rate));
  if (clip.size() < block || block == 0) {
    throw Error(ErrorCode::kMeasurement,
                "clip '" + clip.source_id() + "' shorter than one 400 ms gating block");
  }

  Biquad shelf = shelf_stage(rate);
  Biquad highpass = highpass_stage(rate);
  std::vector<double> weighted(clip.size());
  const auto in = clip.samples();
  for (std::size_t i = 0; i < in.size(); ++i) {
    weighted[i] = highpass.process(shelf.process(in[i]));
  }

  const std::size_t n_blocks = 1 + (clip.size() - block) / step;
  std::vector<double> block_ms(n_blocks);
  for (std::size_t j = 0; j < n_blocks; ++j) {
    double acc = 0.0;
    const std::size_t b = j * step;
    for (std::size_t k = b; k < b + block; ++k) acc += weighted[k] * weighted[k];
    block_ms[j] = acc / static_cast<double>(block);
  }

  double sum = 0.0;
  std::size_t kept = 0;
  for (double ms : block_ms) {
    if (ms > 0.0 && to_lufs(ms) > kAbsoluteGate) {
      sum += ms;
      ++kept;
    }
  }
  if (kept == 0) {
    throw Error(ErrorCode::kMeasurement,
                "clip '" + clip.source_id() + "' has no block above the absolute gate");
  }
  const double relative_gate = to_lufs(sum / static_cast<double>(kept)) + kRelativeGate;

  sum = 0.0;
  kept = 0;
  for (double ms : block_ms) {
    if (ms <= 0.0) continue;
    const double l = to_lufs(ms);
    if (l > kAbsoluteGate && l > relative_gate) {
      sum += ms;
      ++kept;
    }
  }
  if (kept == 0) {
    throw Error(ErrorCode::kMeasurement,
                "clip '" + clip.source_id() + "' has no block above the relative gate");
  }
  return to_lufs(sum / static_cast<double>(kept));
}

std::pair<AudioClip, LoudnessReport> normalize_loudness(const AudioClip& clip,
                                                        double target_lufs) {
  const double measured = measure_integrated_loudness(clip);
  LoudnessReport report;
  double gain = std::pow(10.0, (target_lufs - measured) / 20.0);

  double peak = 0.0;
  for (float s : clip.samples()) peak = std::max(peak, std::abs(static_cast<double>(s)));
  if (peak * gain > 1.0) {
    for (float s : clip.samples()) {
      if (std::abs(static_cast<double>(s)) * gain > 1.0) ++report.clipped_samples;
    }
    gain = 1.0 / peak;
    report.gain_capped = true;
  }
  report.gain_applied_db = 20.0 * std::log10(gain);

  std::vector<float> out(clip.size());
  const auto in = clip.samples();
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = static_cast<float>(std::clamp(in[i] * gain, -1.0, 1.0));
  }
  AudioClip result(std::move(out), clip.sample_rate(), clip.source_id());
  report.integrated_lufs = measure_integrated_loudness(result);
  return {std::move(result), report};
}

AudioClip apply_fade(const AudioClip& clip, double fade_s) {
  const auto n = static_cast<std::size_t>(std::lround(fade_s * clip.sample_rate()));
  if (clip.size() < 2 * n) {
    throw Error(ErrorCode::kInvalidArgument,
                "clip '" + clip.source_id() + "' shorter than two fade lengths");
  }
  std::vector<float> out(clip.samples().begin(), clip.samples().end());
  const std::size_t last = out.size() - 1;
  for (std::size_t k = 0; k < n; ++k) {
    const double ramp = static_cast<double>(k) / static_cast<double>(n);
    out[k] = static_cast<float>(out[k] * ramp);
    out[last - k] = static_cast<float>(out[last - k] * ramp);
  }
  return AudioClip(std::move(out), clip.sample_rate(), clip.source_id());
}

}  // namespace cforge
