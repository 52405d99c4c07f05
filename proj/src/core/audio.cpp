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

#include "corpus_forge/audio.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>

#include "corpus_forge/error.hpp"
#include "corpus_forge/files.hpp"

namespace cforge {

AudioClip::AudioClip(std::vector<float> samples, int sample_rate,
                     std::string source_id)
    : samples_(std::move(samples)),
      sample_rate_(sample_rate),
      source_id_(std::move(source_id)) {
  if (sample_rate_ <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  }
  for (float s : samples_) {
    if (!(s >= -1.0f && s <= 1.0f)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sample outside [-1, 1] in clip '" + source_id_ + "'");
    }
  }
}

AudioClip AudioClip::slice(std::size_t begin, std::size_t end,
                           std::string source_id) const {
  if (begin > end || end > samples_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "slice out of range");
  }
  std::vector<float> part(samples_.begin() + static_cast<std::ptrdiff_t>(begin),
                          samples_.begin() + static_cast<std::ptrdiff_t>(end));
  return AudioClip(std::move(part), sample_rate_, std::move(source_id));
}

// ---------------------------------------------------------------------------
// WAV

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t le32(const char* p) {
  const auto* u = reinterpret_cast<const unsigned char*>(p);
  return std::uint32_t{u[0]} | (std::uint32_t{u[1]} << 8) |
         (std::uint32_t{u[2]} << 16) | (std::uint32_t{u[3]} << 24);
}

std::uint16_t le16(const char* p) {
  const auto* u = reinterpret_cast<const unsigned char*>(p);
  return static_cast<std::uint16_t>(u[0] | (u[1] << 8));
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

float clamp_unit(double v) {
  return static_cast<float>(std::clamp(v, -1.0, 1.0));
}

}  // namespace

AudioClip decode_wav(std::string_view bytes, const std::string& source_id) {
  const std::string who = source_id.empty() ? "wav" : source_id;
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" ||
      bytes.substr(8, 4) != "WAVE") {
    throw Error(ErrorCode::kFormat, who + ": not a RIFF/WAVE file");
  }
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  bool have_fmt = false;
  std::string_view data;
  bool have_data = false;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string_view id = bytes.substr(pos, 4);
    std::uint64_t size = le32(bytes.data() + pos + 4);
    const size_t body = pos + 8;
    const size_t avail = bytes.size() - body;
    if (id == "fmt ") {
      if (size < 16 || size > avail) {
        throw Error(ErrorCode::kFormat, who + ": truncated fmt chunk");
      }
      const char* f = bytes.data() + body;
      format = le16(f);
      channels = le16(f + 2);
      rate = le32(f + 4);
      bits = le16(f + 14);
      if (format == kFormatExtensible && size >= 26) format = le16(f + 24);
      have_fmt = true;
    } else if (id == "data") {
      // Streaming writers leave the size at 0 or 0xFFFFFFFF.
      if (size > avail || size == 0) size = avail;
      data = bytes.substr(body, static_cast<size_t>(size));
      have_data = true;
    }
    pos = body + static_cast<size_t>(size) + (size & 1);
  }
  if (!have_fmt || !have_data) {
    throw Error(ErrorCode::kFormat, who + ": missing fmt or data chunk");
  }
  if (channels < 1 || channels > 2) {
    throw Error(ErrorCode::kFormat,
                who + ": unsupported channel count " + std::to_string(channels));
  }
  if (rate == 0) throw Error(ErrorCode::kFormat, who + ": zero sample rate");
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool pcm24 = format == kFormatPcm && bits == 24;
  const bool pcm32 = format == kFormatPcm && bits == 32;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !pcm24 && !pcm32 && !f32) {
    throw Error(ErrorCode::kFormat,
                who + ": unsupported encoding (format " +
                    std::to_string(format) + ", " + std::to_string(bits) +
                    " bit)");
  }
  const size_t bytes_per_sample = bits / 8;
  const size_t frame_bytes = bytes_per_sample * channels;
  const size_t frames = data.size() / frame_bytes;
  if (frames == 0) throw Error(ErrorCode::kFormat, who + ": zero-length audio");

  auto sample_at = [&](const char* p) -> double {
    if (pcm16) return static_cast<std::int16_t>(le16(p)) / 32768.0;
    if (pcm24) {
      std::int32_t v = static_cast<std::int32_t>(
          (static_cast<std::uint32_t>(static_cast<unsigned char>(p[0])) << 8) |
          (static_cast<std::uint32_t>(static_cast<unsigned char>(p[1])) << 16) |
          (static_cast<std::uint32_t>(static_cast<unsigned char>(p[2])) << 24));
      return (v >> 8) / 8388608.0;
    }
    if (pcm32) return static_cast<std::int32_t>(le32(p)) / 2147483648.0;
    float f;
    const std::uint32_t u = le32(p);
    std::memcpy(&f, &u, sizeof f);
    return std::isfinite(f) ? f : 0.0;
  };

  std::vector<float> samples(frames);
  const char* p = data.data();
  for (size_t i = 0; i < frames; ++i, p += frame_bytes) {
    double v = sample_at(p);
    if (channels == 2) v = 0.5 * (v + sample_at(p + bytes_per_sample));
    samples[i] = clamp_unit(v);
  }
  return AudioClip(std::move(samples), static_cast<int>(rate), source_id);
}

AudioClip read_wav(const std::filesystem::path& path) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const Error&) {
    throw Error(ErrorCode::kIo, "cannot read " + path.string());
  }
  return decode_wav(bytes, path.stem().string());
}

std::string encode_wav(const AudioClip& clip) {
  const auto n = static_cast<std::uint32_t>(clip.size());
  const std::uint32_t data_bytes = n * 2;
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put32(out, 16);
  put16(out, kFormatPcm);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(clip.sample_rate()));
  put32(out, static_cast<std::uint32_t>(clip.sample_rate()) * 2);
  put16(out, 2);
  put16(out, 16);
  out += "data";
  put32(out, data_bytes);
  for (float s : clip.samples()) {
    const long q = std::lround(static_cast<double>(s) * 32768.0);
    put16(out, static_cast<std::uint16_t>(
                   static_cast<std::int16_t>(std::clamp(q, -32768L, 32767L))));
  }
  return out;
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path) {
  if (clip.sample_rate() <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "write_wav: invalid clip");
  }
  try {
    write_file_atomic(path, encode_wav(clip));
  } catch (const std::filesystem::filesystem_error& e) {
    throw Error(ErrorCode::kIo, std::string("write_wav: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Resampling

namespace {

constexpr double kKaiserBeta = 8.6;
constexpr double kZeroCrossings = 32.0;
constexpr double kRolloff = 0.95;
constexpr std::int64_t kMaxPolyphase = 4096;

double bessel_i0(double x) {
  double sum = 1.0;
  double term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

class SincKernel {
 public:
  // `cutoff` in cycles per input sample.
  explicit SincKernel(double cutoff)
      : two_fc_(2.0 * cutoff),
        half_width_(kZeroCrossings / two_fc_),
        i0_beta_(bessel_i0(kKaiserBeta)) {}

  double half_width() const { return half_width_; }

  double operator()(double t) const {
    const double a = std::abs(t);
    if (a >= half_width_) return 0.0;
    const double x = two_fc_ * t;
    const double sinc = x == 0.0 ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
    const double r = a / half_width_;
    const double w = bessel_i0(kKaiserBeta * std::sqrt(1.0 - r * r)) / i0_beta_;
    return two_fc_ * sinc * w;
  }

 private:
  double two_fc_;
  double half_width_;
  double i0_beta_;
};

}  // namespace

AudioClip resample(const AudioClip& clip, int target_rate) {
  if (target_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "resample: target rate must be positive");
  }
  if (target_rate == clip.sample_rate() || clip.empty()) {
    std::vector<float> copy(clip.samples().begin(), clip.samples().end());
    return AudioClip(std::move(copy), target_rate, clip.source_id());
  }
  const std::int64_t g = std::gcd<std::int64_t>(target_rate, clip.sample_rate());
  const std::int64_t up = target_rate / g;
  const std::int64_t down = clip.sample_rate() / g;
  const auto n_in = static_cast<std::int64_t>(clip.size());
  const std::int64_t n_out = (n_in * up + down - 1) / down;

  const double cutoff =
      0.5 * std::min(1.0, static_cast<double>(up) / static_cast<double>(down)) * kRolloff;
  const SincKernel kernel(cutoff);
  const auto reach = static_cast<std::int64_t>(std::ceil(kernel.half_width()));
  const std::int64_t taps = 2 * reach;
  const auto in = clip.samples();

  // Phase p holds weights for input k = k0 + j, j in [-reach + 1, reach],
  // at fractional offset p / up. Each phase is normalized to unit DC gain.
  auto make_phase = [&](std::int64_t p, std::vector<double>& w) {
    w.resize(static_cast<size_t>(taps));
    const double frac = static_cast<double>(p) / static_cast<double>(up);
    double sum = 0.0;
    for (std::int64_t j = -reach + 1; j <= reach; ++j) {
      const double v = kernel(frac - static_cast<double>(j));
      w[static_cast<size_t>(j + reach - 1)] = v;
      sum += v;
    }
    if (sum != 0.0) {
      for (double& v : w) v /= sum;
    }
  };

  std::vector<std::vector<double>> table;
  if (up <= kMaxPolyphase) {
    table.resize(static_cast<size_t>(up));
    for (std::int64_t p = 0; p < up; ++p) make_phase(p, table[static_cast<size_t>(p)]);
  }

  std::vector<float> out(static_cast<size_t>(n_out));
  std::vector<double> scratch;
  for (std::int64_t n = 0; n < n_out; ++n) {
    const std::int64_t pos = n * down;
    const std::int64_t k0 = pos / up;
    const std::int64_t phase = pos % up;
    const std::vector<double>* w;
    if (table.empty()) {
      make_phase(phase, scratch);
      w = &scratch;
    } else {
      w = &table[static_cast<size_t>(phase)];
    }
    double acc = 0.0;
    const std::int64_t first = k0 - reach + 1;
    const std::int64_t lo = std::max<std::int64_t>(first, 0);
    const std::int64_t hi = std::min<std::int64_t>(k0 + reach, n_in - 1);
    for (std::int64_t k = lo; k <= hi; ++k) {
      acc += (*w)[static_cast<size_t>(k - first)] * in[static_cast<size_t>(k)];
    }
    out[static_cast<size_t>(n)] = clamp_unit(acc);
  }
  return AudioClip(std::move(out), target_rate, clip.source_id());
}

// ---------------------------------------------------------------------------
// Levels

FrameGrid FrameGrid::for_clip(std::size_t n_samples, int sample_rate,
                              double window_s, double hop_s) {
  if (!(hop_s > 0.0) || hop_s > window_s) {
    throw Error(ErrorCode::kInvalidArgument,
                "frame hop must satisfy 0 < hop <= window");
  }
  FrameGrid grid;
  grid.window = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(window_s * sample_rate)));
  grid.hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(hop_s * sample_rate)));
  if (n_samples < grid.window) {
    throw Error(ErrorCode::kInvalidArgument, "clip shorter than one analysis window");
  }
  grid.count = 1 + (n_samples - grid.window + grid.hop - 1) / grid.hop;
  return grid;
}

std::vector<FrameLevel> frame_rms_db(const AudioClip& clip, double window_s,
                                     double hop_s) {
  const FrameGrid grid =
      FrameGrid::for_clip(clip.size(), clip.sample_rate(), window_s, hop_s);
  const auto s = clip.samples();
  std::vector<FrameLevel> frames(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) {
    const std::size_t b = grid.begin(i);
    const std::size_t e = grid.end(i, s.size());
    double acc = 0.0;
    for (std::size_t k = b; k < e; ++k) acc += static_cast<double>(s[k]) * s[k];
    const double ms = acc / static_cast<double>(e - b);
    frames[i].frame_index = i;
    frames[i].rms_db = ms > 0.0 ? std::max(kSilenceFloorDb, 10.0 * std::log10(ms))
                                : kSilenceFloorDb;
  }
  return frames;
}

}  // namespace cforge
