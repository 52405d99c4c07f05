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

// Synthetic fixtures: speech-like audio with known word timings, a fixture
// catalog, book text pages and mock ASR transcripts.

#ifndef CORPUS_FORGE_TESTS_FIXTURE_HPP_
#define CORPUS_FORGE_TESTS_FIXTURE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "corpus_forge/audio.hpp"

namespace cforge::testsupport {

inline constexpr int kFixtureRate = 44100;
inline constexpr const char* kFixtureHost = "https://fixtures.invalid";

struct SynthVoice {
  double f0 = 120.0;
  double peak = 0.25;
  double noise_db = -62.0;  // RMS of the background noise
};

struct SpokenWord {
  std::string text;
  std::size_t start = 0;  // samples
  std::size_t end = 0;
};

struct SynthChapter {
  AudioClip clip;
  std::vector<SpokenWord> words;
  std::vector<std::size_t> sentence_gap_centers;
};

// One harmonic burst per word; short gaps inside a sentence, ~0.5 s between
// sentences.
SynthChapter synthesize(const std::vector<std::vector<std::string>>& sentences,
                        const SynthVoice& voice, std::uint64_t seed, int rate = kFixtureRate);

// Raw German prose with the odd number, year, date and abbreviation.
std::vector<std::string> make_sentences(std::mt19937_64& rng, std::size_t count);

// Words a reader would speak for `raw`: normalized, then folded.
std::vector<std::string> spoken_words(std::string_view raw);

// Character substitutions, insertions and deletions at rate `cer`, letters
// only, spaces kept.
std::string corrupt(std::string_view text, double cer, std::mt19937_64& rng);

struct FixtureBook {
  std::string id;
  std::string title;
  std::string reader;
  double f0 = 120.0;
  int chapters = 2;
  double chapter_seconds = 150.0;  // approximate
  bool intro = false;              // spoken preamble that is not in the text
  bool wrong_text = false;         // publish an unrelated text
  bool paged_text = false;         // split the HTML across two pages
  double asr_cer = 0.02;
  double noise_db = -62.0;
  double last_chapter_noise_db = -62.0;  // a noisier room for the last chapter
  std::uint64_t seed = 1;
};

struct FixtureInfo {
  std::filesystem::path root;
  std::string catalog_url;
  std::vector<std::string> snippet_ids;
  std::size_t words_spoken = 0;
};

// Writes root/http/{index.tsv,catalog.json,<book>/...} and
// root/asr/transcripts.tsv. Transcripts follow the pipeline's own split of
// each chapter, keyed by its snippet ids.
FixtureInfo write_fixture(const std::filesystem::path& root, const std::vector<FixtureBook>& books);

// Two readers: a ~5 minute book (two chapters, intro, paged text) and a
// shorter one.
std::vector<FixtureBook> default_books();

// Tone bursts separated by digitally silent gaps every `period_s`; gap
// centers in samples.
struct PeriodicSilence {
  AudioClip clip;
  std::vector<std::size_t> gap_centers;
};
PeriodicSilence silences_every(double period_s, double total_s, double gap_s = 0.5,
                               int rate = kFixtureRate);

// Running text cut into contiguous spans of whole words. Byte ranges are
// recorded while the text is built; transcripts are the spans' words,
// lowercased and unpunctuated.
struct SpanBook {
  std::string source;
  std::vector<std::size_t> span_begin;
  std::vector<std::size_t> span_end;
  std::vector<std::string> transcripts;
};
SpanBook make_span_book(std::mt19937_64& rng, std::size_t n_words, std::size_t n_spans);

AudioClip sine(double freq_hz, double peak, double seconds, int rate = 48000);

}  // namespace cforge::testsupport

#endif  // CORPUS_FORGE_TESTS_FIXTURE_HPP_
