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

#include "corpus_forge/stats.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>

#include "corpus_forge/error.hpp"
#include "corpus_forge/utf8.hpp"

namespace cforge {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

double spectral_centroid(std::span<const float> x, int rate, std::size_t window) {
  if (x.empty() || rate <= 0 || window < 2) return 0.0;
  const std::size_t n = window;
  const std::size_t bins = n / 2 + 1;
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(bins);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  std::vector<double> hann(n);
  for (std::size_t i = 0; i < n; ++i) {
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                   static_cast<double>(n - 1));
  }

  // Full windows only, unless the clip is shorter than one window.
  const std::size_t full = x.size() / n;
  const std::size_t n_windows = full == 0 ? 1 : full;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t w = 0; w < n_windows; ++w) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = w * n + i;
      in[i] = k < x.size() ? static_cast<double>(x[k]) * hann[i] : 0.0;
    }
    fftw_execute(plan);
    double mag_sum = 0.0;
    double weighted = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      const double mag = std::hypot(out[b][0], out[b][1]);
      mag_sum += mag;
      weighted += mag * static_cast<double>(b) * rate / static_cast<double>(n);
    }
    if (mag_sum > 1e-9) {
      sum += weighted / mag_sum;
      ++used;
    }
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return used == 0 ? 0.0 : sum / static_cast<double>(used);
}

std::string strip_token(std::string_view token) {
  std::string out;
  for (char c : token) {
    if (c == '.' || c == '?' || c == '!' || c == ',' || c == ':') continue;
    out += c;
  }
  return utf8::to_lower(out);
}

std::map<std::string, std::size_t> word_counts(const std::vector<std::string>& transcripts) {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : transcripts) {
    std::istringstream in(t);
    std::string token;
    while (in >> token) {
      std::string w = strip_token(token);
      if (!w.empty()) ++counts[w];
    }
  }
  return counts;
}

std::pair<double, double> mean_and_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  double sq = 0.0;
  for (double x : v) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / static_cast<double>(v.size()))};
}

DatasetStats aggregate(const std::string& name, const std::vector<const DatasetEntry*>& entries) {
  DatasetStats s;
  s.name = name;
  s.count = entries.size();
  std::set<std::string> speakers;
  std::vector<double> mva, spa;
  std::vector<std::string> transcripts;
  double seconds = 0.0;
  for (const auto* e : entries) {
    speakers.insert(e->speaker);
    seconds += e->stats.duration_s;
    mva.push_back(e->stats.min_volume_db);
    spa.push_back(e->stats.silence_proportion * 100.0);
    transcripts.push_back(e->transcript);
  }
  s.speakers = speakers.size();
  s.hours = seconds / 3600.0;
  std::tie(s.mva_mean, s.mva_std) = mean_and_std(mva);
  std::tie(s.spa_mean, s.spa_std) = mean_and_std(spa);
  const auto counts = word_counts(transcripts);
  s.uw1 = counts.size();
  s.uw5 = static_cast<std::size_t>(std::count_if(
      counts.begin(), counts.end(), [](const auto& kv) { return kv.second >= 5; }));
  return s;
}

}  // namespace

SnippetStats snippet_stats(const AudioClip& clip, const StatsParams& params) {
  SnippetStats s;
  s.snippet_id = clip.source_id();
  s.duration_s = clip.duration_seconds();
  const auto frames = frame_rms_db(clip);
  if (frames.empty()) return s;
  std::size_t silent = 0;
  double min_db = 0.0;
  for (const auto& f : frames) {
    min_db = std::min(min_db, f.rms_db);
    if (f.rms_db < params.silence_threshold_db) ++silent;
  }
  s.min_volume_db = std::max(kSilenceFloorDb, min_db);
  s.silence_proportion = static_cast<double>(silent) / static_cast<double>(frames.size());
  s.avg_frequency_hz = spectral_centroid(clip.samples(), clip.sample_rate(), params.centroid_window);
  return s;
}

std::size_t unique_words(const std::vector<std::string>& transcripts, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "unique_words needs k >= 1");
  const auto counts = word_counts(transcripts);
  return static_cast<std::size_t>(std::count_if(
      counts.begin(), counts.end(), [k](const auto& kv) { return kv.second >= k; }));
}

bool clean_filter(const SnippetStats& stats, const CleanThresholds& t) {
  return stats.min_volume_db < t.max_min_volume_db && t.min_silence < stats.silence_proportion &&
         stats.silence_proportion < t.max_silence;
}

DatasetReport dataset_stats(const std::vector<DatasetEntry>& entries) {
  if (entries.empty()) throw Error(ErrorCode::kInvalidArgument, "dataset_stats needs entries");
  std::map<std::string, std::vector<const DatasetEntry*>> by_speaker;
  std::vector<const DatasetEntry*> all;
  for (const auto& e : entries) {
    by_speaker[e.speaker].push_back(&e);
    all.push_back(&e);
  }
  DatasetReport r;
  for (const auto& [speaker, list] : by_speaker) r.per_speaker.push_back(aggregate(speaker, list));
  r.total = aggregate("total", all);
  return r;
}

std::vector<std::pair<double, std::size_t>> Histogram::bins() const {
  std::vector<std::pair<double, std::size_t>> out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out.emplace_back(lo + (static_cast<double>(i) + 0.5) * width, counts[i]);
  }
  return out;
}

Histogram histogram(std::span<const double> values, double bin_width, double lo, double hi) {
  if (!(bin_width > 0.0) || !(hi > lo)) {
    throw Error(ErrorCode::kInvalidArgument, "histogram needs bin_width > 0 and lo < hi");
  }
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.width = bin_width;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / bin_width));
  h.counts.assign(n, 0);
  for (double v : values) {
    if (v < lo) {
      ++h.below;
    } else if (!(v < hi)) {
      ++h.above;
    } else {
      const auto i = std::min(n - 1, static_cast<std::size_t>(std::floor((v - lo) / bin_width)));
      ++h.counts[i];
    }
  }
  return h;
}

std::string histogram_tsv(const Histogram& h) {
  std::ostringstream out;
  for (const auto& [center, count] : h.bins()) out << center << '\t' << count << '\n';
  out << "#below\t" << h.below << '\n' << "#above\t" << h.above << '\n';
  return out.str();
}

}  // namespace cforge
