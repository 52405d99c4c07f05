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

#ifndef CORPUS_FORGE_ASR_HPP_
#define CORPUS_FORGE_ASR_HPP_

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corpus_forge/audio.hpp"
#include "corpus_forge/http.hpp"

namespace cforge {

inline constexpr int kAsrSampleRate = 16000;

struct AsrTranscript {
  std::string snippet_id;
  std::string text;  // [a-zäöüß ]*, single-spaced
  std::string engine_tag;
  bool untranscribed = false;  // engine kept failing; excluded from alignment
};

// Lowercase, drop everything outside the German alphabet, collapse spaces.
std::string asr_post_filter(std::string_view raw);

struct EngineRequest {
  std::string snippet_id;
  std::filesystem::path wav_path;  // 16 kHz mono PCM file
  std::string_view wav_bytes;      // same content
};

// One speech recognizer. Implementations throw Error(kEngine) on failure.
class AsrEngine {
 public:
  virtual ~AsrEngine() = default;
  virtual std::string tag() const = 0;
  virtual std::string run(const EngineRequest& request) = 0;
};

// `<cmd> <wav>`; a {wav} token in the command is replaced instead of
// appending the path. Transcript on stdout, exit status 0.
class SubprocessEngine : public AsrEngine {
 public:
  SubprocessEngine(std::string command, std::string tag);
  std::string tag() const override { return tag_; }
  std::string run(const EngineRequest& request) override;

 private:
  std::string command_;
  std::string tag_;
};

// POSTs the WAV bytes; the response body is the transcript.
class HttpEngine : public AsrEngine {
 public:
  HttpEngine(std::string url, std::shared_ptr<HttpClient> client, std::string tag);
  std::string tag() const override { return tag_; }
  std::string run(const EngineRequest& request) override;

 private:
  std::string url_;
  std::shared_ptr<HttpClient> client_;
  std::string tag_;
};

// Serves canned transcripts by snippet id. Unknown ids fail, as do the
// first `failures` calls for ids registered with fail_times().
class MockEngine : public AsrEngine {
 public:
  explicit MockEngine(std::map<std::string, std::string> transcripts,
                      std::string tag = "mock");
  // Reads `<snippet_id>\t<text>` lines.
  static std::unique_ptr<MockEngine> from_file(const std::filesystem::path& path,
                                               std::string tag = "mock");

  std::string tag() const override { return tag_; }
  std::string run(const EngineRequest& request) override;

  void fail_times(const std::string& snippet_id, int failures);
  int calls() const { return calls_.load(); }

 private:
  std::map<std::string, std::string> transcripts_;
  std::map<std::string, int> failures_;
  std::mutex mu_;
  std::string tag_;
  std::atomic<int> calls_{0};
};

struct TranscriberOptions {
  int retries = 2;        // attempts after the first
  int max_in_flight = 4;  // concurrent engine calls
};

// Resamples to 16 kHz, consults the content-addressed cache, then the
// engine. Safe to call from several threads.
class Transcriber {
 public:
  Transcriber(std::shared_ptr<AsrEngine> engine, std::filesystem::path cache_dir,
              TranscriberOptions options = {});

  AsrTranscript transcribe(const AudioClip& clip, const std::string& snippet_id);

  // Order of the result follows the input.
  std::vector<AsrTranscript> transcribe_all(
      const std::vector<std::pair<std::string, AudioClip>>& snippets);

  // Cache key for a clip; exposed for tests and audit.
  std::string cache_key(const AudioClip& clip) const;

  int cache_hits() const { return cache_hits_.load(); }
  int engine_calls() const { return engine_calls_.load(); }

 private:
  std::shared_ptr<AsrEngine> engine_;
  std::filesystem::path cache_dir_;
  TranscriberOptions options_;
  std::atomic<int> cache_hits_{0};
  std::atomic<int> engine_calls_{0};
};

}  // namespace cforge

#endif  // CORPUS_FORGE_ASR_HPP_
