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

#ifndef CORPUS_FORGE_ALIGNER_HPP_
#define CORPUS_FORGE_ALIGNER_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corpus_forge/asr.hpp"
#include "corpus_forge/text_fold.hpp"

namespace cforge {

inline constexpr double kGateThreshold = 0.2;

// Levenshtein distance over Unicode scalar values divided by the longer
// length; 0 for two empty strings.
double normalized_levenshtein(std::u32string_view a, std::u32string_view b);
double normalized_levenshtein(std::string_view a, std::string_view b);

// Plain edit distance, bit-parallel (Myers/Hyyrö).
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

struct WordSpan {
  std::size_t first_word = 0;  // index into MatchForm::words
  std::size_t last_word = 0;   // exclusive
};

struct BestMatch {
  WordSpan span;
  std::size_t begin = 0;  // match_text offsets
  std::size_t end = 0;
  std::size_t edits = 0;
  double distance = 1.0;
};

// Exact minimum of normalized_levenshtein(query, span) over every span of
// whole words inside `words` (all of `area` when omitted). Ties go to the
// earliest start, then the shortest span. Returns nullopt only for an empty
// query or an empty word range.
std::optional<BestMatch> find_best_match(const MatchForm& area, std::u32string_view query,
                                         std::optional<WordSpan> words = std::nullopt);

struct AlignmentMatch {
  std::string snippet_id;
  std::size_t source_start = 0;  // byte offsets into the normalized source
  std::size_t source_end = 0;
  double distance = 1.0;
  bool left_perfect = false;
  bool right_perfect = false;
};

struct AlignParams {
  double window_factor = 3.0;
  std::size_t window_slack = 200;  // characters
};

// Greedy windowed alignment. Untranscribed snippets are skipped; empty
// transcripts get a sentinel match (distance 1, empty span).
std::vector<AlignmentMatch> align_book(const std::vector<AsrTranscript>& transcripts,
                                       std::string_view source, const AlignParams& params = {});

enum class RejectReason { kSelfDistance, kNeighborDistance, kTransition };
const char* to_string(RejectReason reason);

struct GatedPair {
  std::string snippet_id;
  std::string transcript_official;
  bool accepted = false;
  std::optional<RejectReason> reject_reason;
};

std::vector<GatedPair> gate_matches(const std::vector<AlignmentMatch>& matches,
                                    std::string_view source,
                                    double threshold = kGateThreshold);

struct AlignmentSummary {
  std::size_t snippets = 0;
  std::size_t accepted = 0;
  std::size_t rejected_self = 0;
  std::size_t rejected_neighbor = 0;
  std::size_t rejected_transition = 0;
  std::size_t longest_rejected_run = 0;  // global misalignment shows up here
  double mean_distance = 0.0;
};

AlignmentSummary summarize(const std::vector<AlignmentMatch>& matches,
                           const std::vector<GatedPair>& gated);

// One JSON object per line: id, span, distance, flags, decision.
std::string alignment_report_jsonl(const std::vector<AlignmentMatch>& matches,
                                   const std::vector<GatedPair>& gated);

}  // namespace cforge

#endif  // CORPUS_FORGE_ALIGNER_HPP_
