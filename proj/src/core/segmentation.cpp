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

#include "corpus_forge/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "corpus_forge/error.hpp"

namespace cforge {

std::vector<SilenceSpan> detect_silence(const std::vector<FrameLevel>& frames,
                                        const FrameGrid& grid,
                                        std::size_t n_samples, int sample_rate,
                                        double threshold_db,
                                        double min_silence_s) {
  if (!(min_silence_s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "min_silence_s must be positive");
  }
  const auto min_len = static_cast<std::size_t>(std::lround(min_silence_s * sample_rate));
  std::vector<SilenceSpan> spans;
  std::size_t i = 0;
  while (i < frames.size()) {
    if (!(frames[i].rms_db < threshold_db)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < frames.size() && frames[j + 1].rms_db < threshold_db) ++j;
    SilenceSpan span{grid.begin(i), grid.end(j, n_samples), threshold_db};
    if (span.end_sample - span.start_sample >= min_len) spans.push_back(span);
    i = j + 1;
  }
  return spans;
}

std::vector<SilenceSpan> detect_silence(const AudioClip& clip,
                                        double threshold_db,
                                        double min_silence_s, double window_s,
                                        double hop_s) {
  const FrameGrid grid =
      FrameGrid::for_clip(clip.size(), clip.sample_rate(), window_s, hop_s);
  return detect_silence(frame_rms_db(clip, window_s, hop_s), grid, clip.size(),
                        clip.sample_rate(), threshold_db, min_silence_s);
}

namespace {

struct Piece {
  std::size_t begin = 0;
  std::size_t end = 0;
  SegmentFlag flag = SegmentFlag::kNone;
  std::size_t length() const { return end - begin; }
};

std::vector<Piece> cut_at(const std::vector<SilenceSpan>& spans,
                          std::size_t n_samples) {
  std::vector<Piece> pieces;
  std::size_t begin = 0;
  for (const auto& span : spans) {
    const std::size_t c = span.center();
    if (c <= begin || c >= n_samples) continue;
    pieces.push_back({begin, c});
    begin = c;
  }
  pieces.push_back({begin, n_samples});
  return pieces;
}

// Short pieces join their predecessor; the first piece joins forward. A merge
// that would exceed max_len falls back to the other direction, and when both
// exceed it the shorter combination is kept and flagged.
std::vector<Piece> merge_short(const std::vector<Piece>& pieces,
                               std::size_t min_len, std::size_t max_len) {
  std::vector<Piece> out;
  std::optional<Piece> pending;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    Piece cur = pieces[i];
    if (pending) {
      cur.begin = pending->begin;
      if (pending->flag != SegmentFlag::kNone) cur.flag = pending->flag;
      pending.reset();
    }
    if (cur.length() >= min_len) {
      out.push_back(cur);
      continue;
    }
    const bool has_next = i + 1 < pieces.size();
    const std::size_t fwd_len =
        has_next ? cur.length() + pieces[i + 1].length() : 0;
    if (out.empty()) {
      if (has_next && fwd_len <= max_len) {
        pending = cur;
      } else {
        if (has_next) cur.flag = SegmentFlag::kHeadShort;
        out.push_back(cur);
      }
      continue;
    }
    const std::size_t back_len = out.back().length() + cur.length();
    if (back_len <= max_len) {
      out.back().end = cur.end;
      continue;
    }
    if (!has_next) {
      cur.flag = SegmentFlag::kTailShort;
      out.push_back(cur);
      continue;
    }
    if (fwd_len <= max_len) {
      pending = cur;
      continue;
    }
    if (back_len <= fwd_len) {
      out.back().end = cur.end;
      out.back().flag = SegmentFlag::kOverMax;
    } else {
      cur.flag = SegmentFlag::kOverMax;
      pending = cur;
    }
  }
  return out;
}

}  // namespace

SplitResult adaptive_split(const AudioClip& clip, const SplitParams& params) {
  const int rate = clip.sample_rate();
  const auto min_len = static_cast<std::size_t>(std::lround(params.min_len_s * rate));
  const auto max_len = static_cast<std::size_t>(std::lround(params.max_len_s * rate));
  if (!(params.min_len_s > 0.0) || params.max_len_s < params.min_len_s) {
    throw Error(ErrorCode::kInvalidArgument, "split bounds must satisfy 0 < min <= max");
  }
  if (!(params.step_db > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold step must be positive");
  }
  if (clip.size() <= min_len) {
    throw Error(ErrorCode::kInvalidArgument,
                "clip '" + clip.source_id() + "' is not longer than the minimum segment length");
  }

  const FrameGrid grid =
      FrameGrid::for_clip(clip.size(), rate, params.window_s, params.hop_s);
  const auto frames = frame_rms_db(clip, params.window_s, params.hop_s);

  SplitResult result;
  bool found = false;
  std::vector<Piece> pieces;
  for (int step = 0;; ++step) {
    const double threshold = params.start_db + step * params.step_db;
    if (threshold > params.ceiling_db + 1e-9) break;
    auto spans = detect_silence(frames, grid, clip.size(), rate, threshold,
                                params.min_silence_s);
    pieces = cut_at(spans, clip.size());
    std::size_t longest = 0;
    for (const auto& p : pieces) longest = std::max(longest, p.length());
    if (longest <= max_len) {
      result.threshold_db = threshold;
      result.silences = std::move(spans);
      found = true;
      break;
    }
  }
  if (!found) {
    throw Error(ErrorCode::kNoSplitFound,
                "no silence threshold up to " + std::to_string(params.ceiling_db) +
                    " dB splits '" + clip.source_id() + "' below " +
                    std::to_string(params.max_len_s) + " s");
  }

  const auto merged = merge_short(pieces, min_len, max_len);
  result.segments.reserve(merged.size());
  for (std::size_t i = 0; i < merged.size(); ++i) {
    result.segments.push_back({merged[i].begin, merged[i].end, clip.source_id(), i,
                               merged[i].flag});
  }
  return result;
}

const char* to_string(SegmentFlag flag) {
  switch (flag) {
    case SegmentFlag::kNone: return "none";
    case SegmentFlag::kTailShort: return "tail_short";
    case SegmentFlag::kHeadShort: return "head_short";
    case SegmentFlag::kOverMax: return "over_max";
  }
  return "none";
}

}  // namespace cforge
