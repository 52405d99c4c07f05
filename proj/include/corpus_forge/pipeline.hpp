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

#ifndef CORPUS_FORGE_PIPELINE_HPP_
#define CORPUS_FORGE_PIPELINE_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "corpus_forge/aligner.hpp"
#include "corpus_forge/asr.hpp"
#include "corpus_forge/http.hpp"
#include "corpus_forge/ingest.hpp"
#include "corpus_forge/segmentation.hpp"
#include "corpus_forge/stats.hpp"

namespace cforge {

inline constexpr const char* kDefaultCatalogUrl =
    "https://librivox.org/api/feed/audiobooks?format=json&extended=1&limit=0";
inline constexpr int kCorpusSampleRate = 44100;

struct PipelineConfig {
  std::filesystem::path workdir = "work";
  std::string language = "de";
  int min_sample_rate = 44100;
  std::string catalog_url = kDefaultCatalogUrl;
  std::vector<std::string> book_ids;

  SplitParams split;
  double loudness_target_lufs = -20.0;
  double fade_s = 0.1;
  AlignParams align;
  double gate = kGateThreshold;
  double spa_threshold_db = -45.0;
  CleanThresholds clean;

  std::string engine_command;  // subprocess engine
  std::string engine_url;      // HTTP engine; wins over the command
  std::string engine_tag;      // defaults to the command or URL
  int asr_retries = 2;
  int asr_in_flight = 4;

  std::string converter;  // empty: ingest default
  int download_parallelism = 4;
  int jobs = 1;  // books in parallel
  bool clean_only = false;

  std::filesystem::path selectors;  // empty: built-in selector list
  std::filesystem::path rules_dir;  // empty: built-in rule tables
  std::map<std::string, std::filesystem::path> overrides;  // book_id -> file
  std::filesystem::path fixtures;   // hermetic mode: http/ and asr/ below

  // Applies one `key = value` setting; throws Error(kConfig) for unknown
  // keys and malformed values.
  void set(const std::string& key, const std::string& value);
  // Relative paths in the file resolve against the file's directory.
  void load_file(const std::filesystem::path& path);
  void validate() const;
};

// Externally provided services; anything left null is built from the config
// (fixture mode when `fixtures` is set).
struct PipelineServices {
  std::shared_ptr<HttpClient> http;
  std::shared_ptr<AsrEngine> engine;
};

struct StageCounts {
  int executed = 0;
  int cached = 0;
};

struct BookSummary {
  std::string book_id;
  std::string speaker;
  bool ok = false;
  std::string error;
  std::size_t chapters = 0;
  std::size_t unsplit_chapters = 0;   // NoSplitFound or shorter than min_len
  std::size_t snippets = 0;
  std::size_t out_of_bounds = 0;      // outside the split bounds, not emitted
  std::size_t unmeasurable = 0;       // loudness measurement failed
  std::size_t untranscribed = 0;
  std::size_t gate_accepted = 0;
  std::size_t rejected_self = 0;
  std::size_t rejected_neighbor = 0;
  std::size_t rejected_transition = 0;
  std::size_t clean_accepted = 0;
  std::size_t clean_rejected = 0;
  bool flagged = false;  // most snippets rejected: text and audio likely disagree
};

struct RunSummary {
  std::vector<BookSummary> books;
  std::map<std::string, StageCounts> stages;
  std::size_t corpus_full = 0;
  std::size_t corpus_clean = 0;

  // 0 when every requested book succeeded, 1 otherwise.
  int exit_code() const;
  std::string to_json() const;
};

// Runs every stage for the configured books and rebuilds workdir/corpus.
// Per-book failures are recorded in the summary; configuration problems
// throw Error(kConfig).
RunSummary run_pipeline(const PipelineConfig& config, const PipelineServices& services = {});

struct IngestResult {
  BookRecord book;
  int audio_fetched = 0;
  int audio_skipped = 0;
  std::size_t text_bytes = 0;
};

// Downloads one book's audio and text into the workdir without running the
// later stages.
IngestResult ingest_book(const PipelineConfig& config, const std::string& book_id,
                         const PipelineServices& services = {});

std::string make_snippet_id(const std::string& book_id, int chapter, std::size_t ordinal);

enum class ReportStatus { kOk, kNoData };

struct ReportResult {
  ReportStatus status = ReportStatus::kNoData;
  DatasetReport full;
  DatasetReport clean;  // empty per_speaker when nothing passed the filter
  std::vector<std::filesystem::path> files;
};

// Reads workdir/corpus/manifest.jsonl and writes workdir/report/: per-subset
// summary tables and histogram data.
ReportResult report(const std::filesystem::path& workdir);

// One row per speaker plus the total, tab separated.
std::string format_dataset_table(const DatasetReport& r);

}  // namespace cforge

#endif  // CORPUS_FORGE_PIPELINE_HPP_
