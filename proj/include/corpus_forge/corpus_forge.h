/*
 * Copyright 2026 The corpus-forge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CORPUS_FORGE_H_
#define CORPUS_FORGE_H_

/* C interface of the corpus-forge library. All handles are opaque and owned
 * by the caller; release them with the matching *_free function. Strings
 * returned through char** are heap allocated and released with cf_free.
 * Functions return CF_OK or an error status; cf_last_error() then describes
 * the failure of the most recent call on the calling thread. */

#include <stddef.h>

#if defined(_WIN32)
#  define CF_API __declspec(dllexport)
#elif defined(__GNUC__)
#  define CF_API __attribute__((visibility("default")))
#else
#  define CF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cf_status {
  CF_OK = 0,
  CF_ERR_INVALID_ARGUMENT = 1,
  CF_ERR_IO = 2,
  CF_ERR_FORMAT = 3,
  CF_ERR_NETWORK = 4,
  CF_ERR_CONVERTER = 5,
  CF_ERR_NO_SPLIT = 6,
  CF_ERR_MEASUREMENT = 7,
  CF_ERR_ENGINE = 8,
  CF_ERR_NORMALIZATION = 9,
  CF_ERR_CONFIG = 10,
  CF_ERR_NO_DATA = 11,
  CF_ERR_INTERNAL = 99
} cf_status;

typedef enum cf_segment_flag {
  CF_SEGMENT_OK = 0,
  CF_SEGMENT_TAIL_SHORT = 1,
  CF_SEGMENT_HEAD_SHORT = 2,
  CF_SEGMENT_OVER_MAX = 3
} cf_segment_flag;

typedef struct cf_config cf_config;
typedef struct cf_run cf_run;
typedef struct cf_clip cf_clip;
typedef struct cf_segments cf_segments;

CF_API const char* cf_version(void);
CF_API const char* cf_status_string(cf_status status);
/* Message of the last failed call on this thread; "" after a success. */
CF_API const char* cf_last_error(void);
CF_API void cf_free(void* p);

/* Pipeline configuration: flat key = value settings. */
CF_API cf_status cf_config_new(cf_config** out);
CF_API cf_status cf_config_load(cf_config* config, const char* path);
CF_API cf_status cf_config_set(cf_config* config, const char* key, const char* value);
CF_API void cf_config_free(cf_config* config);

/* Runs every stage. CF_OK means the run completed; individual books may
 * still have failed, see cf_run_exit_code (0 all ok, 1 partial failure). */
CF_API cf_status cf_run_pipeline(const cf_config* config, cf_run** out);
CF_API int cf_run_exit_code(const cf_run* run);
CF_API cf_status cf_run_summary_json(const cf_run* run, char** out_json);
CF_API void cf_run_free(cf_run* run);

/* Downloads one book (audio and text) without processing it. */
CF_API cf_status cf_ingest(const cf_config* config, const char* book_id, char** out_json);

/* Writes workdir/report and returns the summary tables as text.
 * CF_ERR_NO_DATA when no corpus has been emitted yet. */
CF_API cf_status cf_report(const char* workdir, char** out_text);

/* overrides_path may be NULL. */
CF_API cf_status cf_normalize_text(const char* raw, const char* overrides_path, char** out_text);
CF_API cf_status cf_normalized_levenshtein(const char* a, const char* b, double* out);

/* Aligns transcripts (recording order) against normalized source text and
 * gates the matches. Output: one JSON object per snippet and line. */
CF_API cf_status cf_align(const char* source, const char* const* snippet_ids,
                          const char* const* transcripts, size_t count, char** out_jsonl);

/* Audio. */
CF_API cf_status cf_clip_read_wav(const char* path, cf_clip** out);
CF_API cf_status cf_clip_from_samples(const float* samples, size_t count, int sample_rate,
                                      cf_clip** out);
CF_API cf_status cf_clip_write_wav(const cf_clip* clip, const char* path);
CF_API size_t cf_clip_length(const cf_clip* clip);
CF_API int cf_clip_sample_rate(const cf_clip* clip);
/* Copies up to `capacity` samples; returns the number copied. */
CF_API size_t cf_clip_copy_samples(const cf_clip* clip, float* dst, size_t capacity);
CF_API void cf_clip_free(cf_clip* clip);

CF_API cf_status cf_measure_loudness(const cf_clip* clip, double* out_lufs);
CF_API cf_status cf_normalize_loudness(const cf_clip* clip, double target_lufs, double fade_s,
                                       cf_clip** out, double* out_gain_db);

CF_API cf_status cf_adaptive_split(const cf_clip* clip, double min_len_s, double max_len_s,
                                   double min_silence_s, cf_segments** out);
CF_API size_t cf_segments_count(const cf_segments* segments);
CF_API cf_status cf_segments_get(const cf_segments* segments, size_t index, size_t* start_sample,
                                 size_t* end_sample, cf_segment_flag* flag);
CF_API void cf_segments_free(cf_segments* segments);

#ifdef __cplusplus
}
#endif

#endif /* CORPUS_FORGE_H_ */
