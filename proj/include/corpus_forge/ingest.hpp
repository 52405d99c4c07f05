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

#ifndef CORPUS_FORGE_INGEST_HPP_
#define CORPUS_FORGE_INGEST_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "corpus_forge/http.hpp"

namespace cforge {

struct BookRecord {
  std::string book_id;
  std::string title;
  std::string language;
  std::string reader_name;
  std::vector<std::string> chapter_audio_urls;
  std::string text_url;
  int native_sample_rate = 0;  // as advertised by the catalog
};

struct RawBookBundle {
  BookRecord book;
  std::vector<std::filesystem::path> audio_paths;  // WAV, one per chapter
  std::string text_raw;
};

// LibriVox-style payload: {"books": [{"id", "title", "language",
// "url_text_source", "sample_rate", "sections": [{"listen_url",
// "readers": [{"display_name"}]}]}]}.
std::vector<BookRecord> parse_catalog(std::string_view json_text, const std::string& origin);

// Records in `language` (a tag such as "de" or a name such as "German")
// advertised at min_sample_rate or above, ordered by book_id.
std::vector<BookRecord> fetch_catalog(HttpClient& http, const std::string& catalog_url,
                                      const std::string& language, int min_sample_rate);

inline constexpr const char* kDefaultConverter =
    "ffmpeg -nostdin -loglevel error -y -i {in} -ac 1 -ar 44100 -c:a pcm_s16le {out}";

struct DownloadOptions {
  std::string converter = kDefaultConverter;  // {in} and {out} are substituted
  int parallelism = 4;
};

struct DownloadReport {
  int fetched = 0;
  int skipped = 0;  // already present and verified
};

// Writes <workdir>/audio/<book_id>/chapter_NN.wav plus manifest.tsv
// (url, file, size, sha256). Failed URLs are collected and reported in one
// Error(kNetwork) after the remaining chapters finished.
RawBookBundle download_book(HttpClient& http, const BookRecord& record,
                            const std::filesystem::path& workdir,
                            const DownloadOptions& options = {},
                            DownloadReport* report = nullptr);

// Simple selectors: tag, .class, #id, tag.class, tag#id, [attr=value],
// tag[attr=value].
struct SelectorConfig {
  std::vector<std::string> content;  // roots to extract; whole body if none match
  std::vector<std::string> drop;     // page furniture
  std::vector<std::string> next;     // link to the following page

  // `key = selector` lines; keys content, drop, next; '#' comments.
  static SelectorConfig parse(std::string_view text, const std::string& origin = "selectors");
  static SelectorConfig load(const std::filesystem::path& path);
  static SelectorConfig builtin();
};

// Plain text of an HTML page: one line per paragraph, entities decoded.
std::string html_to_text(std::string_view html, const SelectorConfig& selectors);

// Href of the first element matching a `next` selector, or empty.
std::string find_next_link(std::string_view html, const SelectorConfig& selectors);

// Follows `next` links (at most max_pages pages) and joins the pages.
// Latin-1 pages are converted to UTF-8.
std::string fetch_text(HttpClient& http, const BookRecord& record,
                       const SelectorConfig& selectors = SelectorConfig::builtin(),
                       int max_pages = 500);

}  // namespace cforge

#endif  // CORPUS_FORGE_INGEST_HPP_
