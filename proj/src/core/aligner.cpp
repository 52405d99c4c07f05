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

#include "corpus_forge/aligner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "json.hpp"
#include "corpus_forge/utf8.hpp"

namespace cforge {

namespace {

using Word64 = std::uint64_t;

// Match masks of a query, one 64-bit word per block of 64 query characters.
class QueryBits {
 public:
  explicit QueryBits(std::u32string_view q)
      : length_(q.size()), blocks_((q.size() + 63) / 64) {
    table_.assign(blocks_, 0);  // row 0: characters absent from the query
    for (size_t i = 0; i < q.size(); ++i) {
      auto [it, inserted] = index_.try_emplace(q[i], table_.size() / blocks_);
      if (inserted) table_.resize(table_.size() + blocks_, 0);
      table_[it->second * blocks_ + i / 64] |= Word64{1} << (i % 64);
    }
  }

  const Word64* peq(char32_t c) const {
    const auto it = index_.find(c);
    return table_.data() + (it == index_.end() ? 0 : it->second * blocks_);
  }
  size_t length() const { return length_; }
  size_t blocks() const { return blocks_; }

 private:
  size_t length_;
  size_t blocks_;
  std::unordered_map<char32_t, size_t> index_;
  std::vector<Word64> table_;
};

// Vertical-delta state of the DP column D[i][j] = edit distance between
// query[0, i) and the j text characters consumed so far.
class Column {
 public:
  explicit Column(const QueryBits& bits)
      : bits_(bits), pv_(bits.blocks()), mv_(bits.blocks()),
        last_bit_(bits.length() == 0 ? 0 : (bits.length() - 1) % 64) {
    reset();
  }

  void reset() {
    std::fill(pv_.begin(), pv_.end(), ~Word64{0});
    std::fill(mv_.begin(), mv_.end(), Word64{0});
    score_ = bits_.length();
    consumed_ = 0;
  }

  void advance(char32_t c) {
    const Word64* eq_row = bits_.peq(c);
    const size_t n = pv_.size();
    int hin = 1;  // D[0][j] = j
    for (size_t b = 0; b < n; ++b) {
      const Word64 pv = pv_[b];
      const Word64 mv = mv_[b];
      const Word64 hin_neg = hin < 0 ? 1 : 0;
      const Word64 xv = eq_row[b] | mv;
      const Word64 eq = eq_row[b] | hin_neg;
      const Word64 xh = (((eq & pv) + pv) ^ pv) | eq;
      Word64 ph = mv | ~(xh | pv);
      Word64 mh = pv & xh;
      const unsigned bit = b + 1 == n ? last_bit_ : 63;
      const int hout = static_cast<int>((ph >> bit) & 1) - static_cast<int>((mh >> bit) & 1);
      ph = (ph << 1) | (hin > 0 ? 1 : 0);
      mh = (mh << 1) | hin_neg;
      pv_[b] = mh | ~(xv | ph);
      mv_[b] = ph & xv;
      hin = hout;
    }
    score_ = static_cast<size_t>(static_cast<long>(score_) + hin);
    ++consumed_;
  }

  size_t score() const { return score_; }

  // min over i of D[i][consumed].
  size_t column_min() const {
    long value = static_cast<long>(consumed_);
    long best = value;
    const size_t q = bits_.length();
    for (size_t i = 0; i < q; ++i) {
      const Word64 mask = Word64{1} << (i % 64);
      if (pv_[i / 64] & mask) ++value;
      else if (mv_[i / 64] & mask) --value;
      best = std::min(best, value);
    }
    return static_cast<size_t>(best);
  }

 private:
  const QueryBits& bits_;
  std::vector<Word64> pv_;
  std::vector<Word64> mv_;
  unsigned last_bit_;
  size_t score_ = 0;
  size_t consumed_ = 0;
};

}  // namespace

size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);  // query = shorter
  if (b.empty()) return a.size();
  const QueryBits bits(b);
  Column col(bits);
  for (char32_t c : a) col.advance(c);
  return col.score();
}

double normalized_levenshtein(std::u32string_view a, std::u32string_view b) {
  const size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

double normalized_levenshtein(std::string_view a, std::string_view b) {
  return normalized_levenshtein(utf8::decode(a), utf8::decode(b));
}

std::optional<BestMatch> find_best_match(const MatchForm& area, std::u32string_view query,
                                         std::optional<WordSpan> words) {
  const WordSpan range = words.value_or(WordSpan{0, area.words.size()});
  if (query.empty() || range.first_word >= range.last_word ||
      range.last_word > area.words.size()) {
    return std::nullopt;
  }
  const size_t q = query.size();
  const QueryBits bits(query);
  Column col(bits);
  const std::u32string& text = area.match_text;
  const size_t limit = area.words[range.last_word - 1].end;

  BestMatch best;
  bool have_best = false;
  size_t best_num = 0;  // distance = best_num / best_den, compared exactly
  size_t best_den = 1;

  for (size_t a = range.first_word; a < range.last_word; ++a) {
    if (have_best && best_num == 0) break;
    const size_t start = area.words[a].begin;
    col.reset();
    size_t next_end = a;
    for (size_t p = start; p < limit; ++p) {
      const size_t len = p - start + 1;
      // Every later span has at least len - q edits.
      if (have_best && len > q && (len - q) * best_den >= best_num * len) break;
      col.advance(text[p]);
      if (p + 1 == area.words[next_end].end) {
        const size_t score = col.score();
        const size_t den = std::max(q, len);
        if (!have_best || score * best_den < best_num * den) {
          have_best = true;
          best_num = score;
          best_den = den;
          best.span = {a, next_end + 1};
          best.begin = start;
          best.end = p + 1;
          best.edits = score;
        }
        ++next_end;
      }
      // Every later span passes through this column, so it costs at least
      // m edits and is at most q + m long.
      if (have_best && len % 8 == 0) {
        const size_t m = col.column_min();
        if (m * best_den >= best_num * (q + m)) break;
      }
    }
  }
  best.distance = static_cast<double>(best_num) / static_cast<double>(best_den);
  return best;
}

std::vector<AlignmentMatch> align_book(const std::vector<AsrTranscript>& transcripts,
                                       std::string_view source, const AlignParams& params) {
  const MatchForm form = MatchForm::project(source);
  const size_t n_words = form.words.size();
  std::vector<AlignmentMatch> out;
  bool prev_sentinel = false;
  size_t cursor = 0;

  for (const auto& t : transcripts) {
    if (t.untranscribed) continue;
    const std::u32string query = utf8::decode(asr_post_filter(t.text));
    AlignmentMatch m;
    m.snippet_id = t.snippet_id;

    if (query.empty() || cursor >= n_words) {
      m.source_start = m.source_end = cursor < n_words ? form.words[cursor].src_begin
                                                       : source.size();
      if (!out.empty()) out.back().right_perfect = false;
      out.push_back(std::move(m));
      prev_sentinel = true;
      continue;
    }

    const size_t area_begin = form.words[cursor].begin;
    const size_t area_end =
        area_begin +
        static_cast<size_t>(std::ceil(params.window_factor * static_cast<double>(query.size()))) +
        params.window_slack;
    size_t last = cursor + 1;
    while (last < n_words && form.words[last].begin < area_end) ++last;

    const BestMatch best = *find_best_match(form, query, WordSpan{cursor, last});
    m.source_start = form.words[best.span.first_word].src_begin;
    m.source_end = form.words[best.span.last_word - 1].src_end;
    m.distance = best.distance;
    m.left_perfect = best.span.first_word == cursor && !prev_sentinel;
    if (!out.empty()) out.back().right_perfect = m.left_perfect;
    out.push_back(std::move(m));
    prev_sentinel = false;
    cursor = best.span.last_word;
  }
  if (!out.empty() && !prev_sentinel) out.back().right_perfect = cursor == n_words;
  return out;
}

const char* to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kSelfDistance: return "self_distance";
    case RejectReason::kNeighborDistance: return "neighbor_distance";
    case RejectReason::kTransition: return "transition";
  }
  return "unknown";
}

std::vector<GatedPair> gate_matches(const std::vector<AlignmentMatch>& matches,
                                    std::string_view source, double threshold) {
  const size_t n = matches.size();
  auto close = [&](size_t k) { return matches[k].distance < threshold; };
  auto transition = [&](size_t k) {  // between k and k + 1
    return matches[k].right_perfect && matches[k + 1].left_perfect;
  };
  std::vector<GatedPair> out;
  out.reserve(n);
  for (size_t k = 0; k < n; ++k) {
    const auto& m = matches[k];
    GatedPair g;
    g.snippet_id = m.snippet_id;
    if (m.source_end <= source.size() && m.source_start <= m.source_end) {
      g.transcript_official = std::string(source.substr(m.source_start, m.source_end - m.source_start));
    }
    if (!close(k)) {
      g.reject_reason = RejectReason::kSelfDistance;
    } else if ((k > 0 && !close(k - 1)) || (k + 1 < n && !close(k + 1))) {
      g.reject_reason = RejectReason::kNeighborDistance;
    } else if ((k > 0 && !transition(k - 1)) || (k + 1 < n && !transition(k))) {
      g.reject_reason = RejectReason::kTransition;
    }
    g.accepted = !g.reject_reason.has_value();
    out.push_back(std::move(g));
  }
  return out;
}

AlignmentSummary summarize(const std::vector<AlignmentMatch>& matches,
                           const std::vector<GatedPair>& gated) {
  AlignmentSummary s;
  s.snippets = gated.size();
  size_t run = 0;
  double total = 0.0;
  for (const auto& m : matches) total += m.distance;
  s.mean_distance = matches.empty() ? 0.0 : total / static_cast<double>(matches.size());
  for (const auto& g : gated) {
    if (g.accepted) {
      ++s.accepted;
      run = 0;
      continue;
    }
    s.longest_rejected_run = std::max(s.longest_rejected_run, ++run);
    switch (*g.reject_reason) {
      case RejectReason::kSelfDistance: ++s.rejected_self; break;
      case RejectReason::kNeighborDistance: ++s.rejected_neighbor; break;
      case RejectReason::kTransition: ++s.rejected_transition; break;
    }
  }
  return s;
}

std::string alignment_report_jsonl(const std::vector<AlignmentMatch>& matches,
                                   const std::vector<GatedPair>& gated) {
  std::string out;
  for (size_t k = 0; k < matches.size(); ++k) {
    const auto& m = matches[k];
    nlohmann::json j = {
        {"snippet_id", m.snippet_id},
        {"source_start", m.source_start},
        {"source_end", m.source_end},
        {"distance", m.distance},
        {"left_perfect", m.left_perfect},
        {"right_perfect", m.right_perfect},
    };
    if (k < gated.size()) {
      j["accepted"] = gated[k].accepted;
      j["reject_reason"] = gated[k].reject_reason ? nlohmann::json(to_string(*gated[k].reject_reason))
                                                  : nlohmann::json(nullptr);
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace cforge
