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

#include "corpus_forge/corpus_forge.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "json.hpp"
#include "corpus_forge/aligner.hpp"
#include "corpus_forge/audio.hpp"
#include "corpus_forge/error.hpp"
#include "corpus_forge/loudness.hpp"
#include "corpus_forge/pipeline.hpp"
#include "corpus_forge/segmentation.hpp"
#include "corpus_forge/textnorm.hpp"

struct cf_config {
  cforge::PipelineConfig config;
};

struct cf_run {
  cforge::RunSummary summary;
};

struct cf_clip {
  cforge::AudioClip clip;
};

struct cf_segments {
  std::vector<cforge::Segment> segments;
};

namespace {

thread_local std::string g_last_error;

cf_status to_status(cforge::ErrorCode code) {
  using cforge::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return CF_ERR_INVALID_ARGUMENT;
    case ErrorCode::kIo: return CF_ERR_IO;
    case ErrorCode::kFormat: return CF_ERR_FORMAT;
    case ErrorCode::kNetwork: return CF_ERR_NETWORK;
    case ErrorCode::kConverter: return CF_ERR_CONVERTER;
    case ErrorCode::kNoSplitFound: return CF_ERR_NO_SPLIT;
    case ErrorCode::kMeasurement: return CF_ERR_MEASUREMENT;
    case ErrorCode::kEngine: return CF_ERR_ENGINE;
    case ErrorCode::kNormalization: return CF_ERR_NORMALIZATION;
    case ErrorCode::kConfig: return CF_ERR_CONFIG;
    case ErrorCode::kInternal: return CF_ERR_INTERNAL;
  }
  return CF_ERR_INTERNAL;
}

// Runs `fn`, translating exceptions into a status and the thread's last
// error message.
template <typename Fn>
cf_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const cforge::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CF_ERR_INTERNAL;
  }
}

cf_status invalid(const char* what) {
  g_last_error = what;
  return CF_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p == nullptr) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size());
  p[s.size()] = '\0';
  return p;
}

}  // namespace

extern "C" {

const char* cf_version(void) { return "0.1.0"; }

const char* cf_status_string(cf_status status) {
  switch (status) {
    case CF_OK: return "ok";
    case CF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CF_ERR_IO: return "i/o error";
    case CF_ERR_FORMAT: return "format error";
    case CF_ERR_NETWORK: return "network error";
    case CF_ERR_CONVERTER: return "converter error";
    case CF_ERR_NO_SPLIT: return "no split found";
    case CF_ERR_MEASUREMENT: return "measurement error";
    case CF_ERR_ENGINE: return "engine error";
    case CF_ERR_NORMALIZATION: return "normalization error";
    case CF_ERR_CONFIG: return "configuration error";
    case CF_ERR_NO_DATA: return "no data";
    case CF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* cf_last_error(void) { return g_last_error.c_str(); }

void cf_free(void* p) { std::free(p); }

cf_status cf_config_new(cf_config** out) {
  if (out == nullptr) return invalid("out is null");
  return guarded([&] {
    *out = new cf_config();
    return CF_OK;
  });
}

cf_status cf_config_load(cf_config* config, const char* path) {
  if (config == nullptr || path == nullptr) return invalid("config and path are required");
  return guarded([&] {
    config->config.load_file(path);
    return CF_OK;
  });
}

cf_status cf_config_set(cf_config* config, const char* key, const char* value) {
  if (config == nullptr || key == nullptr || value == nullptr) return invalid("config, key and value are required");
  return guarded([&] {
    config->config.set(key, value);
    return CF_OK;
  });
}

void cf_config_free(cf_config* config) { delete config; }

cf_status cf_run_pipeline(const cf_config* config, cf_run** out) {
  if (config == nullptr || out == nullptr) return invalid("config and out are required");
  *out = nullptr;
  return guarded([&] {
    auto run = std::make_unique<cf_run>();
    run->summary = cforge::run_pipeline(config->config);
    *out = run.release();
    return CF_OK;
  });
}

int cf_run_exit_code(const cf_run* run) { return run == nullptr ? 1 : run->summary.exit_code(); }

cf_status cf_run_summary_json(const cf_run* run, char** out_json) {
  if (run == nullptr || out_json == nullptr) return invalid("run and out_json are required");
  return guarded([&] {
    *out_json = dup_string(run->summary.to_json());
    return CF_OK;
  });
}

void cf_run_free(cf_run* run) { delete run; }

cf_status cf_ingest(const cf_config* config, const char* book_id, char** out_json) {
  if (config == nullptr || book_id == nullptr || out_json == nullptr) {
    return invalid("config, book_id and out_json are required");
  }
  return guarded([&] {
    const auto r = cforge::ingest_book(config->config, book_id);
    nlohmann::json j = {{"book_id", r.book.book_id},
                        {"title", r.book.title},
                        {"reader", r.book.reader_name},
                        {"chapters", r.book.chapter_audio_urls.size()},
                        {"audio_fetched", r.audio_fetched},
                        {"audio_skipped", r.audio_skipped},
                        {"text_bytes", r.text_bytes}};
    *out_json = dup_string(j.dump(2) + "\n");
    return CF_OK;
  });
}

cf_status cf_report(const char* workdir, char** out_text) {
  if (workdir == nullptr || out_text == nullptr) return invalid("workdir and out_text are required");
  return guarded([&] {
    const auto r = cforge::report(workdir);
    if (r.status == cforge::ReportStatus::kNoData) {
      g_last_error = std::string("no data: no emitted corpus under ") + workdir;
      return CF_ERR_NO_DATA;
    }
    std::string text = "# full\n" + cforge::format_dataset_table(r.full) + "\n# clean\n" +
                       cforge::format_dataset_table(r.clean);
    *out_text = dup_string(text);
    return CF_OK;
  });
}

cf_status cf_normalize_text(const char* raw, const char* overrides_path, char** out_text) {
  if (raw == nullptr || out_text == nullptr) return invalid("raw and out_text are required");
  return guarded([&] {
    const cforge::BookOverrides ov =
        overrides_path ? cforge::BookOverrides::load(overrides_path) : cforge::BookOverrides{};
    *out_text = dup_string(cforge::normalize_text(raw, ov).text);
    return CF_OK;
  });
}

cf_status cf_normalized_levenshtein(const char* a, const char* b, double* out) {
  if (a == nullptr || b == nullptr || out == nullptr) return invalid("a, b and out are required");
  return guarded([&] {
    *out = cforge::normalized_levenshtein(std::string_view(a), std::string_view(b));
    return CF_OK;
  });
}

cf_status cf_align(const char* source, const char* const* snippet_ids, const char* const* transcripts,
                   size_t count, char** out_jsonl) {
  if (source == nullptr || out_jsonl == nullptr || (count > 0 && (snippet_ids == nullptr || transcripts == nullptr))) {
    return invalid("source, ids, transcripts and out_jsonl are required");
  }
  return guarded([&] {
    std::vector<cforge::AsrTranscript> ts;
    for (size_t i = 0; i < count; ++i) {
      if (snippet_ids[i] == nullptr || transcripts[i] == nullptr) return invalid("null entry in input arrays");
      ts.push_back({snippet_ids[i], cforge::asr_post_filter(transcripts[i]), "external", false});
    }
    const auto matches = cforge::align_book(ts, source);
    const auto gated = cforge::gate_matches(matches, source);
    *out_jsonl = dup_string(cforge::alignment_report_jsonl(matches, gated));
    return CF_OK;
  });
}

cf_status cf_clip_read_wav(const char* path, cf_clip** out) {
  if (path == nullptr || out == nullptr) return invalid("path and out are required");
  return guarded([&] {
    *out = new cf_clip{cforge::read_wav(path)};
    return CF_OK;
  });
}

cf_status cf_clip_from_samples(const float* samples, size_t count, int sample_rate, cf_clip** out) {
  if ((samples == nullptr && count > 0) || out == nullptr) return invalid("samples and out are required");
  return guarded([&] {
    *out = new cf_clip{cforge::AudioClip(std::vector<float>(samples, samples + count), sample_rate)};
    return CF_OK;
  });
}

cf_status cf_clip_write_wav(const cf_clip* clip, const char* path) {
  if (clip == nullptr || path == nullptr) return invalid("clip and path are required");
  return guarded([&] {
    cforge::write_wav(clip->clip, path);
    return CF_OK;
  });
}

size_t cf_clip_length(const cf_clip* clip) { return clip == nullptr ? 0 : clip->clip.size(); }

int cf_clip_sample_rate(const cf_clip* clip) { return clip == nullptr ? 0 : clip->clip.sample_rate(); }

size_t cf_clip_copy_samples(const cf_clip* clip, float* dst, size_t capacity) {
  if (clip == nullptr || dst == nullptr) return 0;
  const auto s = clip->clip.samples();
  const size_t n = std::min(capacity, s.size());
  std::copy_n(s.begin(), n, dst);
  return n;
}

void cf_clip_free(cf_clip* clip) { delete clip; }

cf_status cf_measure_loudness(const cf_clip* clip, double* out_lufs) {
  if (clip == nullptr || out_lufs == nullptr) return invalid("clip and out_lufs are required");
  return guarded([&] {
    *out_lufs = cforge::measure_integrated_loudness(clip->clip);
    return CF_OK;
  });
}

cf_status cf_normalize_loudness(const cf_clip* clip, double target_lufs, double fade_s, cf_clip** out,
                                double* out_gain_db) {
  if (clip == nullptr || out == nullptr) return invalid("clip and out are required");
  return guarded([&] {
    auto [normalized, report] = cforge::normalize_loudness(clip->clip, target_lufs);
    if (fade_s > 0.0) normalized = cforge::apply_fade(normalized, fade_s);
    if (out_gain_db != nullptr) *out_gain_db = report.gain_applied_db;
    *out = new cf_clip{std::move(normalized)};
    return CF_OK;
  });
}

cf_status cf_adaptive_split(const cf_clip* clip, double min_len_s, double max_len_s, double min_silence_s,
                            cf_segments** out) {
  if (clip == nullptr || out == nullptr) return invalid("clip and out are required");
  return guarded([&] {
    cforge::SplitParams p;
    p.min_len_s = min_len_s;
    p.max_len_s = max_len_s;
    p.min_silence_s = min_silence_s;
    *out = new cf_segments{cforge::adaptive_split(clip->clip, p).segments};
    return CF_OK;
  });
}

size_t cf_segments_count(const cf_segments* segments) {
  return segments == nullptr ? 0 : segments->segments.size();
}

cf_status cf_segments_get(const cf_segments* segments, size_t index, size_t* start_sample, size_t* end_sample,
                          cf_segment_flag* flag) {
  if (segments == nullptr || index >= segments->segments.size()) return invalid("segment index out of range");
  const auto& s = segments->segments[index];
  if (start_sample) *start_sample = s.start_sample;
  if (end_sample) *end_sample = s.end_sample;
  if (flag) *flag = static_cast<cf_segment_flag>(s.flag);
  g_last_error.clear();
  return CF_OK;
}

void cf_segments_free(cf_segments* segments) { delete segments; }

}  // extern "C"
