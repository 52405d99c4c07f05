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

#include "corpus_forge/asr.hpp"

#include <thread>

#include "corpus_forge/error.hpp"
#include "corpus_forge/files.hpp"
#include "corpus_forge/hash.hpp"
#include "corpus_forge/text_fold.hpp"

namespace cforge {

std::string asr_post_filter(std::string_view raw) { return fold_words(raw); }

SubprocessEngine::SubprocessEngine(std::string command, std::string tag)
    : command_(std::move(command)), tag_(std::move(tag)) {}

std::string SubprocessEngine::run(const EngineRequest& request) {
  auto argv = expand_command(command_, {{"wav", request.wav_path.string()}});
  if (command_.find("{wav}") == std::string::npos) argv.push_back(request.wav_path.string());
  if (argv.empty()) throw Error(ErrorCode::kEngine, "empty engine command");
  const ProcessResult r = run_process(argv);
  if (r.exit_code != 0) {
    throw Error(ErrorCode::kEngine, request.snippet_id + ": engine exited with status " +
                                        std::to_string(r.exit_code));
  }
  return r.out;
}

HttpEngine::HttpEngine(std::string url, std::shared_ptr<HttpClient> client, std::string tag)
    : url_(std::move(url)), client_(std::move(client)), tag_(std::move(tag)) {}

std::string HttpEngine::run(const EngineRequest& request) {
  HttpResponse r;
  try {
    r = client_->post(url_, std::string(request.wav_bytes), "audio/wav");
  } catch (const Error& e) {
    throw Error(ErrorCode::kEngine, request.snippet_id + ": " + e.what());
  }
  if (r.status != 200) {
    throw Error(ErrorCode::kEngine,
                request.snippet_id + ": engine returned HTTP " + std::to_string(r.status));
  }
  return r.body;
}

MockEngine::MockEngine(std::map<std::string, std::string> transcripts, std::string tag)
    : transcripts_(std::move(transcripts)), tag_(std::move(tag)) {}

std::unique_ptr<MockEngine> MockEngine::from_file(const std::filesystem::path& path,
                                                  std::string tag) {
  std::map<std::string, std::string> m;
  for (const auto& line : split_lines(read_file(path))) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      m[line] = "";
    } else {
      m[line.substr(0, tab)] = line.substr(tab + 1);
    }
  }
  return std::make_unique<MockEngine>(std::move(m), std::move(tag));
}

void MockEngine::fail_times(const std::string& snippet_id, int failures) {
  std::lock_guard lock(mu_);
  failures_[snippet_id] = failures;
}

std::string MockEngine::run(const EngineRequest& request) {
  ++calls_;
  std::lock_guard lock(mu_);
  auto f = failures_.find(request.snippet_id);
  if (f != failures_.end() && f->second > 0) {
    --f->second;
    throw Error(ErrorCode::kEngine, request.snippet_id + ": injected failure");
  }
  const auto it = transcripts_.find(request.snippet_id);
  if (it == transcripts_.end()) {
    throw Error(ErrorCode::kEngine, request.snippet_id + ": no transcript in mock table");
  }
  return it->second;
}

Transcriber::Transcriber(std::shared_ptr<AsrEngine> engine, std::filesystem::path cache_dir,
                         TranscriberOptions options)
    : engine_(std::move(engine)), cache_dir_(std::move(cache_dir)), options_(options) {
  if (!engine_) throw Error(ErrorCode::kInvalidArgument, "transcriber needs an engine");
  if (options_.max_in_flight < 1) options_.max_in_flight = 1;
  if (options_.retries < 0) options_.retries = 0;
}

namespace {

std::string wav16k_bytes(const AudioClip& clip) {
  if (clip.sample_rate() == kAsrSampleRate) return encode_wav(clip);
  return encode_wav(resample(clip, kAsrSampleRate));
}

std::string key_for(std::string_view wav, const std::string& tag) {
  Sha256 h;
  h.field(wav).field(tag);
  return h.hex_digest();
}

}  // namespace

std::string Transcriber::cache_key(const AudioClip& clip) const {
  return key_for(wav16k_bytes(clip), engine_->tag());
}

AsrTranscript Transcriber::transcribe(const AudioClip& clip, const std::string& snippet_id) {
  AsrTranscript t{snippet_id, "", engine_->tag(), false};
  const std::string wav = wav16k_bytes(clip);
  const std::string key = key_for(wav, t.engine_tag);
  const auto cached = cache_dir_ / key.substr(0, 2) / (key + ".txt");
  if (std::filesystem::exists(cached)) {
    ++cache_hits_;
    t.text = read_file(cached);
    return t;
  }

  const auto tmp_dir = cache_dir_ / "tmp";
  std::filesystem::create_directories(tmp_dir);
  const auto wav_path = tmp_dir / (key + ".wav");
  write_file_atomic(wav_path, wav);

  std::string last_error;
  bool ok = false;
  for (int attempt = 0; attempt <= options_.retries && !ok; ++attempt) {
    ++engine_calls_;
    try {
      t.text = asr_post_filter(engine_->run({snippet_id, wav_path, wav}));
      ok = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEngine) throw;
      last_error = e.what();
    }
  }
  std::error_code ec;
  std::filesystem::remove(wav_path, ec);
  if (!ok) {
    t.untranscribed = true;
    return t;
  }
  write_file_atomic(cached, t.text);
  return t;
}

std::vector<AsrTranscript> Transcriber::transcribe_all(
    const std::vector<std::pair<std::string, AudioClip>>& snippets) {
  std::vector<AsrTranscript> out(snippets.size());
  std::atomic<size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (size_t i = next++; i < snippets.size(); i = next++) {
      try {
        out[i] = transcribe(snippets[i].second, snippets[i].first);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const size_t n_workers =
      std::min(static_cast<size_t>(options_.max_in_flight), std::max<size_t>(1, snippets.size()));
  std::vector<std::thread> pool;
  for (size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace cforge
