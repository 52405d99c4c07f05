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

#ifndef CORPUS_FORGE_STATS_HPP_
#define CORPUS_FORGE_STATS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "corpus_forge/audio.hpp"

namespace cforge {

struct SnippetStats {
  std::string snippet_id;
  double duration_s = 0.0;
  double min_volume_db = kSilenceFloorDb;
  double silence_proportion = 1.0;  // fraction, not percent
  double avg_frequency_hz = 0.0;
};

struct StatsParams {
  double silence_threshold_db = -45.0;
  std::size_t centroid_window = 4096;
};

SnippetStats snippet_stats(const AudioClip& clip, const StatsParams& params = {});

// Distinct lowercased tokens (punctuation . ? ! , : stripped) occurring at
// least k times across all transcripts.
std::size_t unique_words(const std::vector<std::string>& transcripts, std::size_t k);

struct CleanThresholds {
  double max_min_volume_db = -50.0;
  double min_silence = 0.10;
  double max_silence = 0.45;
};

// min volume < -50 dB and 10% < silence proportion < 45%, all strict.
bool clean_filter(const SnippetStats& stats, const CleanThresholds& t = {});

struct DatasetEntry {
  SnippetStats stats;
  std::string transcript;
  std::string speaker;
};

struct DatasetStats {
  std::string name;  // speaker, or "total"
  std::size_t speakers = 0;
  double hours = 0.0;
  std::size_t count = 0;
  double mva_mean = 0.0;  // dB
  double mva_std = 0.0;
  double spa_mean = 0.0;  // percent
  double spa_std = 0.0;
  std::size_t uw1 = 0;
  std::size_t uw5 = 0;
};

struct DatasetReport {
  std::vector<DatasetStats> per_speaker;  // sorted by speaker name
  DatasetStats total;
};

// Population standard deviations. Throws on empty input.
DatasetReport dataset_stats(const std::vector<DatasetEntry>& entries);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  double width = 1.0;
  std::vector<std::size_t> counts;  // bin i covers [lo + i*width, lo + (i+1)*width)
  std::size_t below = 0;
  std::size_t above = 0;  // includes values equal to hi and NaN

  std::vector<std::pair<double, std::size_t>> bins() const;  // (center, count)
};

Histogram histogram(std::span<const double> values, double bin_width, double lo, double hi);

// "center\tcount" lines followed by "#below" and "#above" lines.
std::string histogram_tsv(const Histogram& h);

}  // namespace cforge

#endif  // CORPUS_FORGE_STATS_HPP_
