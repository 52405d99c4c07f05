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

#include "corpus_forge/pipeline.hpp"

#include <spdlog/cfg/env.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "corpus_forge/audio.hpp"
#include "corpus_forge/error.hpp"
#include "corpus_forge/files.hpp"
#include "corpus_forge/hash.hpp"
#include "corpus_forge/ingest.hpp"
#include "corpus_forge/loudness.hpp"
#include "corpus_forge/textnorm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cforge {

// ---------------------------------------------------------------------------
// Configuration

namespace {

// Progress goes to stderr so stdout stays machine readable. SPDLOG_LEVEL
// adjusts verbosity.
spdlog::logger* logger() {
  static const std::shared_ptr<spdlog::logger> log = [] {
    auto l = spdlog::get("corpus-forge");
    if (!l) l = spdlog::stderr_color_mt("corpus-forge");
    spdlog::cfg::load_env_levels();
    return l;
  }();
  return log.get();
}

double to_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kConfig, "config key '" + key + "' expects a number, got '" + value + "'");
}

int to_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kConfig, "config key '" + key + "' expects an integer, got '" + value + "'");
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw Error(ErrorCode::kConfig, "config key '" + key + "' expects a boolean, got '" + value + "'");
}

bool is_path_key(const std::string& key) {
  return key == "workdir" || key == "selectors" || key == "rules_dir" || key == "fixtures" ||
         key.rfind("override.", 0) == 0;
}

bool safe_book_id(const std::string& id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '-' ||
           c == '_' || c == '.';
  });
}

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value) {
  if (key == "workdir") workdir = value;
  else if (key == "language") language = value;
  else if (key == "min_sample_rate") min_sample_rate = to_int(key, value);
  else if (key == "catalog_url") catalog_url = value;
  else if (key == "book_id") book_ids.push_back(value);
  else if (key == "book_ids") {
    book_ids.clear();
    std::size_t pos = 0;
    while (pos <= value.size()) {
      const std::size_t comma = std::min(value.find(',', pos), value.size());
      std::string id(trim(std::string_view(value).substr(pos, comma - pos)));
      if (!id.empty()) book_ids.push_back(std::move(id));
      pos = comma + 1;
    }
  }
  else if (key == "min_split_s") split.min_len_s = to_double(key, value);
  else if (key == "max_split_s") split.max_len_s = to_double(key, value);
  else if (key == "min_silence_s") split.min_silence_s = to_double(key, value);
  else if (key == "split_start_db") split.start_db = to_double(key, value);
  else if (key == "split_step_db") split.step_db = to_double(key, value);
  else if (key == "split_ceiling_db") split.ceiling_db = to_double(key, value);
  else if (key == "loudness_target_lufs") loudness_target_lufs = to_double(key, value);
  else if (key == "fade_s") fade_s = to_double(key, value);
  else if (key == "window_factor") align.window_factor = to_double(key, value);
  else if (key == "window_slack") align.window_slack = static_cast<size_t>(to_int(key, value));
  else if (key == "gate") gate = to_double(key, value);
  else if (key == "spa_threshold_db") spa_threshold_db = to_double(key, value);
  else if (key == "clean_max_min_volume_db") clean.max_min_volume_db = to_double(key, value);
  else if (key == "clean_min_silence") clean.min_silence = to_double(key, value);
  else if (key == "clean_max_silence") clean.max_silence = to_double(key, value);
  else if (key == "engine_command") engine_command = value;
  else if (key == "engine_url") engine_url = value;
  else if (key == "engine_tag") engine_tag = value;
  else if (key == "asr_retries") asr_retries = to_int(key, value);
  else if (key == "asr_in_flight") asr_in_flight = to_int(key, value);
  else if (key == "converter") converter = value;
  else if (key == "download_parallelism") download_parallelism = to_int(key, value);
  else if (key == "jobs") jobs = to_int(key, value);
  else if (key == "clean_only") clean_only = to_bool(key, value);
  else if (key == "selectors") selectors = value;
  else if (key == "rules_dir") rules_dir = value;
  else if (key == "fixtures") fixtures = value;
  else if (key.rfind("override.", 0) == 0 && key.size() > 9) overrides[key.substr(9)] = value;
  else throw Error(ErrorCode::kConfig, "unknown config key '" + key + "'");
}

void PipelineConfig::load_file(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::kConfig, "config file not found: " + path.string());
  const fs::path base = path.parent_path();
  int line_no = 0;
  for (const auto& raw : split_lines(read_file(path))) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfig,
                  path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (is_path_key(key) && !value.empty() && fs::path(value).is_relative()) {
      value = (base / value).lexically_normal().string();
    }
    try {
      set(key, value);
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfig, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void PipelineConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kConfig, msg); };
  if (workdir.empty()) fail("workdir must be set");
  if (language.empty()) fail("language must be set");
  if (min_sample_rate <= 0) fail("min_sample_rate must be positive");
  if (!(split.min_len_s > 0.0) || split.max_len_s < split.min_len_s) {
    fail("split bounds must satisfy 0 < min_split_s <= max_split_s");
  }
  if (!(split.min_silence_s > 0.0)) fail("min_silence_s must be positive");
  if (!(split.step_db > 0.0)) fail("split_step_db must be positive");
  if (split.ceiling_db < split.start_db) fail("split_ceiling_db must not be below split_start_db");
  if (fade_s < 0.0 || 2.0 * fade_s > split.min_len_s) fail("fade_s must be in [0, min_split_s / 2]");
  if (!(gate > 0.0 && gate < 1.0)) fail("gate must be in (0, 1)");
  if (!(align.window_factor > 0.0)) fail("window_factor must be positive");
  if (!(clean.min_silence < clean.max_silence)) fail("clean_min_silence must be below clean_max_silence");
  if (asr_retries < 0) fail("asr_retries must not be negative");
  if (asr_in_flight < 1 || download_parallelism < 1 || jobs < 1) {
    fail("parallelism settings must be at least 1");
  }
  for (const auto& id : book_ids) {
    if (!safe_book_id(id)) fail("book id '" + id + "' contains unsupported characters");
  }
}

std::string make_snippet_id(const std::string& book_id, int chapter, std::size_t ordinal) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%02d_f%06zu", chapter, ordinal);
  return book_id + buf;
}

int RunSummary::exit_code() const {
  return std::all_of(books.begin(), books.end(), [](const BookSummary& b) { return b.ok; }) ? 0 : 1;
}

std::string RunSummary::to_json() const {
  json j;
  j["corpus_full"] = corpus_full;
  j["corpus_clean"] = corpus_clean;
  j["stages"] = json::object();
  for (const auto& [name, c] : stages) j["stages"][name] = {{"executed", c.executed}, {"cached", c.cached}};
  j["books"] = json::array();
  for (const auto& b : books) {
    j["books"].push_back({
        {"book_id", b.book_id},
        {"speaker", b.speaker},
        {"ok", b.ok},
        {"error", b.error},
        {"chapters", b.chapters},
        {"unsplit_chapters", b.unsplit_chapters},
        {"snippets", b.snippets},
        {"out_of_bounds", b.out_of_bounds},
        {"unmeasurable", b.unmeasurable},
        {"untranscribed", b.untranscribed},
        {"gate_accepted", b.gate_accepted},
        {"rejected_self_distance", b.rejected_self},
        {"rejected_neighbor_distance", b.rejected_neighbor},
        {"rejected_transition", b.rejected_transition},
        {"clean_accepted", b.clean_accepted},
        {"clean_rejected", b.clean_rejected},
        {"flagged", b.flagged},
    });
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Stage bookkeeping

namespace {

std::string hash_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  if (fs::exists(dir)) {
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (!e.is_regular_file()) continue;
      const std::string name = e.path().filename().string();
      if (name == ".stamp" || name.find(".tmp") != std::string::npos) continue;
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  Sha256 h;
  for (const auto& f : files) {
    h.field(fs::relative(f, dir).generic_string());
    h.field(sha256_file(f));
  }
  return h.hex_digest();
}

std::string hash_fields(std::initializer_list<std::string> fields) {
  Sha256 h;
  for (const auto& f : fields) h.field(f);
  return h.hex_digest();
}

std::string num(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

struct SegmentRow {
  std::string id;
  int chapter = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  int rate = 0;
  std::string flag;
};

std::vector<SegmentRow> read_segments(const fs::path& file) {
  std::vector<SegmentRow> rows;
  for (const auto& line : split_lines(read_file(file))) {
    const auto f = split(line, '\t');
    if (f.size() != 6) continue;
    rows.push_back({f[0], std::stoi(f[1]), std::stoull(f[2]), std::stoull(f[3]), std::stoi(f[4]), f[5]});
  }
  return rows;
}

std::vector<std::vector<std::string>> read_tsv(const fs::path& file) {
  std::vector<std::vector<std::string>> rows;
  if (!fs::exists(file)) return rows;
  for (const auto& line : split_lines(read_file(file))) {
    if (!line.empty()) rows.push_back(split(line, '\t'));
  }
  return rows;
}

std::string one_line(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == '\n' || c == '\r' || c == '\t' || c == ' ') {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

std::string speaker_dir(const std::string& speaker) {
  std::string out;
  for (char c : speaker.empty() ? std::string("unknown") : speaker) {
    const bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out;
}

class Runner {
 public:
  Runner(const PipelineConfig& cfg, std::shared_ptr<HttpClient> http,
         std::shared_ptr<AsrEngine> engine)
      : cfg_(cfg), http_(std::move(http)), engine_(std::move(engine)) {}

  RunSummary run();

 private:
  // Runs `body` in workdir/<name>/<book> unless the stamp there matches
  // `input` and the directory still hashes to the stamped output.
  std::string stage(const std::string& name, const std::string& book, const std::string& input,
                    bool clear, const std::function<void(const fs::path&)>& body);
  std::string stage_at(const std::string& name, const fs::path& dir, const std::string& input,
                       bool clear, const std::function<void(const fs::path&)>& body);
  BookSummary process_book(const BookRecord& rec);
  void emit(const std::vector<BookSummary>& books);

  const PipelineConfig& cfg_;
  std::shared_ptr<HttpClient> http_;
  std::shared_ptr<AsrEngine> engine_;
  std::mutex mu_;
  std::map<std::string, StageCounts> stages_;
  std::map<std::string, std::string> stats_outputs_;  // book -> stats stage hash
  std::size_t corpus_full_ = 0;
  std::size_t corpus_clean_ = 0;
};

std::string Runner::stage(const std::string& name, const std::string& book,
                          const std::string& input, bool clear,
                          const std::function<void(const fs::path&)>& body) {
  return stage_at(name, cfg_.workdir / name / book, input, clear, body);
}

std::string Runner::stage_at(const std::string& name, const fs::path& dir, const std::string& input,
                             bool clear, const std::function<void(const fs::path&)>& body) {
  const fs::path stamp = dir / ".stamp";
  if (fs::exists(stamp)) {
    const auto lines = split_lines(read_file(stamp));
    if (lines.size() >= 2 && lines[0] == input && hash_dir(dir) == lines[1]) {
      std::lock_guard lock(mu_);
      ++stages_[name].cached;
      logger()->debug("{} {}: up to date", name, dir.filename().string());
      return lines[1];
    }
  }
  if (clear && fs::exists(dir)) fs::remove_all(dir);
  fs::create_directories(dir);
  fs::remove(stamp);
  body(dir);
  const std::string output = hash_dir(dir);
  write_file_atomic(stamp, input + "\n" + output + "\n");
  std::lock_guard lock(mu_);
  ++stages_[name].executed;
  logger()->info("{} {}: done", name, dir.filename().string());
  return output;
}

BookSummary Runner::process_book(const BookRecord& rec) {
  BookSummary s;
  s.book_id = rec.book_id;
  s.speaker = rec.reader_name;
  s.chapters = rec.chapter_audio_urls.size();
  const std::string& id = rec.book_id;
  const fs::path work = cfg_.workdir;

  // Acquire audio.
  std::string record_fields = rec.book_id + '\n' + std::to_string(rec.native_sample_rate);
  for (const auto& u : rec.chapter_audio_urls) record_fields += '\n' + u;
  const std::string audio_out =
      stage("audio", id, hash_fields({record_fields, cfg_.converter}), false, [&](const fs::path&) {
        DownloadOptions opts;
        if (!cfg_.converter.empty()) opts.converter = cfg_.converter;
        opts.parallelism = cfg_.download_parallelism;
        download_book(*http_, rec, work, opts);
      });

  // Split.
  const auto& sp = cfg_.split;
  const std::string split_in =
      hash_fields({audio_out, num(sp.min_len_s), num(sp.max_len_s), num(sp.min_silence_s),
                   num(sp.start_db), num(sp.step_db), num(sp.ceiling_db), num(sp.window_s), num(sp.hop_s)});
  const std::string split_out = stage("split", id, split_in, true, [&](const fs::path& dir) {
    std::string segments;
    std::string unsplit;
    for (size_t ch = 1; ch <= rec.chapter_audio_urls.size(); ++ch) {
      char name[32];
      std::snprintf(name, sizeof name, "chapter_%02zu.wav", ch);
      const AudioClip clip = read_wav(work / "audio" / id / name);
      SplitResult r;
      try {
        if (clip.duration_seconds() <= sp.min_len_s) {
          throw Error(ErrorCode::kNoSplitFound, "chapter shorter than the minimum segment");
        }
        r = adaptive_split(clip, sp);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNoSplitFound) throw;
        unsplit += std::to_string(ch) + '\t' + e.what() + '\n';
        continue;
      }
      for (const auto& seg : r.segments) {
        const std::string sid = make_snippet_id(id, static_cast<int>(ch), seg.ordinal + 1);
        write_wav(clip.slice(seg.start_sample, seg.end_sample, sid), dir / (sid + ".wav"));
        segments += sid + '\t' + std::to_string(ch) + '\t' + std::to_string(seg.start_sample) + '\t' +
                    std::to_string(seg.end_sample) + '\t' + std::to_string(clip.sample_rate()) + '\t' +
                    to_string(seg.flag) + '\n';
      }
    }
    write_file_atomic(dir / "segments.tsv", segments);
    write_file_atomic(dir / "unsplit.tsv", unsplit);
  });
  const auto segments = read_segments(work / "split" / id / "segments.tsv");

  // Audio normalization.
  const std::string norm_in = hash_fields({split_out, num(cfg_.loudness_target_lufs), num(cfg_.fade_s)});
  const std::string norm_out = stage("normalize", id, norm_in, true, [&](const fs::path& dir) {
    std::string table;
    for (const auto& row : segments) {
      AudioClip clip = read_wav(work / "split" / id / (row.id + ".wav"));
      if (clip.sample_rate() != kCorpusSampleRate) clip = resample(clip, kCorpusSampleRate);
      std::string status = "ok";
      LoudnessReport rep;
      try {
        auto [normalized, r] = normalize_loudness(clip, cfg_.loudness_target_lufs);
        clip = std::move(normalized);
        rep = r;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kMeasurement) throw;
        status = "unmeasurable";
      }
      clip = apply_fade(clip, cfg_.fade_s);
      write_wav(clip, dir / (row.id + ".wav"));
      table += row.id + '\t' + status + '\t' + num(rep.integrated_lufs) + '\t' + num(rep.gain_applied_db) +
               '\t' + std::to_string(rep.clipped_samples) + '\t' + (rep.gain_capped ? "1" : "0") + '\n';
    }
    write_file_atomic(dir / "loudness.tsv", table);
  });

  // Transcribe.
  const std::string tr_in = hash_fields({norm_out, engine_->tag()});
  const std::string tr_out = stage("transcribe", id, tr_in, true, [&](const fs::path& dir) {
    Transcriber tr(engine_, work / "asr_cache", {cfg_.asr_retries, cfg_.asr_in_flight});
    std::vector<std::pair<std::string, AudioClip>> clips;
    for (const auto& row : segments) {
      clips.emplace_back(row.id, read_wav(work / "normalize" / id / (row.id + ".wav")));
    }
    std::string table;
    for (const auto& t : tr.transcribe_all(clips)) {
      table += t.snippet_id + '\t' + (t.untranscribed ? "1" : "0") + '\t' + t.text + '\n';
    }
    write_file_atomic(dir / "transcripts.tsv", table);
  });

  // Acquire text.
  const std::string selectors_text = cfg_.selectors.empty() ? "builtin" : read_file(cfg_.selectors);
  const std::string text_out =
      stage("text", id, hash_fields({rec.text_url, selectors_text}), true, [&](const fs::path& dir) {
        const SelectorConfig sel = cfg_.selectors.empty() ? SelectorConfig::builtin()
                                                          : SelectorConfig::load(cfg_.selectors);
        write_file_atomic(dir / "raw.txt", fetch_text(*http_, rec, sel));
      });

  // Normalize text.
  const auto ov_it = cfg_.overrides.find(id);
  const std::string overrides_text =
      ov_it == cfg_.overrides.end() ? std::string() : read_file(ov_it->second);
  std::string rules_text = "builtin";
  if (!cfg_.rules_dir.empty()) {
    for (const char* f : {"abbreviations.tsv", "currency.tsv", "symbols.tsv"}) {
      const auto p = cfg_.rules_dir / f;
      rules_text += '\n' + (fs::exists(p) ? read_file(p) : std::string("-"));
    }
  }
  const std::string tn_out = stage(
      "textnorm", id, hash_fields({text_out, overrides_text, rules_text}), true, [&](const fs::path& dir) {
        const BookOverrides ov =
            ov_it == cfg_.overrides.end() ? BookOverrides{} : BookOverrides::parse(overrides_text, ov_it->second.string());
        const RuleTables tables =
            cfg_.rules_dir.empty() ? RuleTables::builtin() : RuleTables::load(cfg_.rules_dir);
        const NormalizedText nt = TextNormalizer(ov, tables).normalize(read_file(work / "text" / id / "raw.txt"));
        write_file_atomic(dir / "normalized.txt", nt.text);
        std::string counts;
        for (const auto& [cat, n] : nt.applied_rules) counts += std::string(to_string(cat)) + '\t' + std::to_string(n) + '\n';
        write_file_atomic(dir / "rules.tsv", counts);
      });
  const std::string source = read_file(work / "textnorm" / id / "normalized.txt");

  // Align.
  const std::string align_in = hash_fields(
      {tr_out, tn_out, num(cfg_.align.window_factor), std::to_string(cfg_.align.window_slack)});
  const std::string align_out = stage("align", id, align_in, true, [&](const fs::path& dir) {
    std::vector<AsrTranscript> transcripts;
    for (const auto& f : read_tsv(work / "transcribe" / id / "transcripts.tsv")) {
      transcripts.push_back({f[0], f.size() > 2 ? f[2] : "", engine_->tag(), f[1] == "1"});
    }
    const auto matches = align_book(transcripts, source, cfg_.align);
    write_file_atomic(dir / "matches.jsonl", alignment_report_jsonl(matches, {}));
  });

  // Gate.
  const std::string gate_out =
      stage("gate", id, hash_fields({align_out, tn_out, num(cfg_.gate)}), true, [&](const fs::path& dir) {
        std::vector<AlignmentMatch> matches;
        for (const auto& line : split_lines(read_file(work / "align" / id / "matches.jsonl"))) {
          if (line.empty()) continue;
          const json j = json::parse(line);
          matches.push_back({j["snippet_id"], j["source_start"], j["source_end"], j["distance"],
                             j["left_perfect"], j["right_perfect"]});
        }
        const auto gated = gate_matches(matches, source, cfg_.gate);
        write_file_atomic(dir / "report.jsonl", alignment_report_jsonl(matches, gated));
        std::string accepted;
        for (const auto& g : gated) {
          if (g.accepted) accepted += g.snippet_id + '\t' + one_line(g.transcript_official) + '\n';
        }
        write_file_atomic(dir / "accepted.tsv", accepted);
      });

  // Stats and clean filter.
  const std::string stats_in =
      hash_fields({gate_out, norm_out, split_out, num(cfg_.spa_threshold_db), num(cfg_.clean.max_min_volume_db),
                   num(cfg_.clean.min_silence), num(cfg_.clean.max_silence)});
  std::map<std::string, std::string> flags;
  for (const auto& row : segments) flags[row.id] = row.flag;
  std::map<std::string, std::string> loudness_status;
  for (const auto& f : read_tsv(work / "normalize" / id / "loudness.tsv")) loudness_status[f[0]] = f[1];

  const std::string stats_out = stage("stats", id, stats_in, true, [&](const fs::path& dir) {
    StatsParams params;
    params.silence_threshold_db = cfg_.spa_threshold_db;
    std::string table;
    for (const auto& f : read_tsv(work / "gate" / id / "accepted.tsv")) {
      const std::string& sid = f[0];
      if (flags[sid] != "none" || loudness_status[sid] != "ok") continue;
      AudioClip clip = read_wav(work / "normalize" / id / (sid + ".wav"));
      clip = AudioClip(std::move(clip).take_samples(), kCorpusSampleRate, sid);
      const SnippetStats st = snippet_stats(clip, params);
      table += sid + '\t' + num(st.duration_s) + '\t' + num(st.min_volume_db) + '\t' +
               num(st.silence_proportion) + '\t' + num(st.avg_frequency_hz) + '\t' +
               (clean_filter(st, cfg_.clean) ? "1" : "0") + '\t' + (f.size() > 1 ? f[1] : "") + '\n';
    }
    write_file_atomic(dir / "stats.tsv", table);
  });
  {
    std::lock_guard lock(mu_);
    stats_outputs_[id] = stats_out;
  }

  // Summary counts come from the stage files so cached runs report the same.
  s.unsplit_chapters = read_tsv(work / "split" / id / "unsplit.tsv").size();
  s.snippets = segments.size();
  for (const auto& row : segments) s.out_of_bounds += row.flag != "none";
  for (const auto& [sid, st] : loudness_status) s.unmeasurable += st != "ok";
  for (const auto& f : read_tsv(work / "transcribe" / id / "transcripts.tsv")) s.untranscribed += f[1] == "1";
  for (const auto& line : split_lines(read_file(work / "gate" / id / "report.jsonl"))) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    if (j["accepted"].get<bool>()) {
      ++s.gate_accepted;
      continue;
    }
    const std::string reason = j["reject_reason"];
    if (reason == "self_distance") ++s.rejected_self;
    else if (reason == "neighbor_distance") ++s.rejected_neighbor;
    else ++s.rejected_transition;
  }
  for (const auto& f : read_tsv(work / "stats" / id / "stats.tsv")) {
    (f[5] == "1" ? s.clean_accepted : s.clean_rejected)++;
  }
  const std::size_t rejected = s.rejected_self + s.rejected_neighbor + s.rejected_transition;
  s.flagged = s.snippets > 0 && 2 * rejected >= s.snippets;
  s.ok = true;
  if (s.flagged) {
    logger()->warn("book {}: {} of {} snippets rejected by the alignment gate", id, rejected, s.snippets);
  }
  return s;
}

void Runner::emit(const std::vector<BookSummary>& books) {
  std::string input = "emit\n" + std::string(cfg_.clean_only ? "clean_only" : "all");
  for (const auto& b : books) {
    if (!b.ok) continue;
    input += '\n' + b.book_id + '\t' + b.speaker + '\t' + stats_outputs_[b.book_id];
  }
  const fs::path corpus = cfg_.workdir / "corpus";
  stage_at("emit", corpus, hash_fields({input}), true, [&](const fs::path& dir) {
    struct Entry {
      std::string id, book, speaker, transcript;
      double duration, min_volume, silence, frequency;
      bool clean;
    };
    std::vector<Entry> entries;
    for (const auto& b : books) {
      if (!b.ok) continue;
      for (const auto& f : read_tsv(cfg_.workdir / "stats" / b.book_id / "stats.tsv")) {
        entries.push_back({f[0], b.book_id, speaker_dir(b.speaker), f.size() > 6 ? f[6] : "",
                           std::stod(f[1]), std::stod(f[2]), std::stod(f[3]), std::stod(f[4]), f[5] == "1"});
      }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      return std::tie(a.speaker, a.id) < std::tie(b.speaker, b.id);
    });
    std::map<std::string, std::string> metadata;  // "<speaker>/<subset>" -> csv
    std::string manifest;
    for (const char* subset : {"full", "clean"}) {
      const bool clean_subset = std::string(subset) == "clean";
      if (cfg_.clean_only && !clean_subset) continue;
      for (const auto& e : entries) {
        if (clean_subset && !e.clean) continue;
        const fs::path rel = fs::path(e.speaker) / subset / "wavs" / (e.id + ".wav");
        fs::create_directories((dir / rel).parent_path());
        fs::copy_file(cfg_.workdir / "normalize" / e.book / (e.id + ".wav"), dir / rel,
                      fs::copy_options::overwrite_existing);
        metadata[e.speaker + "/" + subset] += e.id + "|" + e.transcript + "\n";
        json j = {{"snippet_id", e.id},         {"book_id", e.book},
                  {"speaker", e.speaker},       {"subset", subset},
                  {"wav_path", rel.generic_string()}, {"transcript", e.transcript},
                  {"duration_s", e.duration},   {"min_volume_db", e.min_volume},
                  {"silence_proportion", e.silence}, {"avg_frequency_hz", e.frequency}};
        manifest += j.dump() + "\n";
        (clean_subset ? corpus_clean_ : corpus_full_)++;
      }
    }
    for (const auto& [key, csv] : metadata) write_file_atomic(dir / key / "metadata.csv", csv);
    write_file_atomic(dir / "manifest.jsonl", manifest);
  });
  // Counts on a cache hit come from the manifest.
  corpus_full_ = corpus_clean_ = 0;
  for (const auto& line : split_lines(read_file(corpus / "manifest.jsonl"))) {
    if (line.empty()) continue;
    (json::parse(line)["subset"] == "clean" ? corpus_clean_ : corpus_full_)++;
  }
}

RunSummary Runner::run() {
  RunSummary summary;
  fs::create_directories(cfg_.workdir);

  std::vector<BookRecord> catalog;
  std::string catalog_error;
  try {
    catalog = fetch_catalog(*http_, cfg_.catalog_url, cfg_.language, cfg_.min_sample_rate);
  } catch (const Error& e) {
    catalog_error = e.what();
  }
  std::vector<std::string> ids = cfg_.book_ids;
  if (ids.empty()) {
    for (const auto& r : catalog) ids.push_back(r.book_id);
  }

  std::vector<BookSummary> books(ids.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < ids.size(); i = next++) {
      BookSummary& b = books[i];
      b.book_id = ids[i];
      if (!catalog_error.empty()) {
        b.error = catalog_error;
        continue;
      }
      const auto it = std::find_if(catalog.begin(), catalog.end(),
                                   [&](const BookRecord& r) { return r.book_id == ids[i]; });
      if (it == catalog.end()) {
        b.error = "book not in the filtered catalog (language " + cfg_.language + ", min rate " +
                  std::to_string(cfg_.min_sample_rate) + ")";
        continue;
      }
      try {
        b = process_book(*it);
      } catch (const std::exception& e) {
        b.book_id = ids[i];
        b.speaker = it->reader_name;
        b.ok = false;
        b.error = e.what();
      }
      if (!b.ok) logger()->error("book {}: {}", b.book_id, b.error);
    }
  };
  const size_t workers = std::min<size_t>(static_cast<size_t>(cfg_.jobs), std::max<size_t>(1, ids.size()));
  std::vector<std::thread> pool;
  for (size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  emit(books);
  summary.books = std::move(books);
  summary.stages = stages_;
  summary.corpus_full = corpus_full_;
  summary.corpus_clean = corpus_clean_;
  write_file_atomic(cfg_.workdir / "run_summary.json", summary.to_json());
  return summary;
}

}  // namespace

namespace {

PipelineConfig with_environment(const PipelineConfig& config_in) {
  PipelineConfig config = config_in;
  if (config.fixtures.empty()) {
    if (const char* env = std::getenv("CORPUS_FORGE_FIXTURES"); env != nullptr && *env != '\0') {
      config.fixtures = env;
    }
  }
  config.validate();
  return config;
}

std::shared_ptr<HttpClient> http_for(const PipelineConfig& config, const PipelineServices& services) {
  if (services.http) return services.http;
  if (!config.fixtures.empty()) return std::make_shared<FixtureHttpClient>(config.fixtures / "http");
  return std::make_shared<NetHttpClient>();
}

}  // namespace

IngestResult ingest_book(const PipelineConfig& config_in, const std::string& book_id,
                         const PipelineServices& services) {
  const PipelineConfig config = with_environment(config_in);
  const auto http = http_for(config, services);
  IngestResult result;
  const auto catalog = fetch_catalog(*http, config.catalog_url, config.language, config.min_sample_rate);
  const auto it = std::find_if(catalog.begin(), catalog.end(),
                               [&](const BookRecord& r) { return r.book_id == book_id; });
  if (it == catalog.end()) {
    throw Error(ErrorCode::kInvalidArgument, "book " + book_id + " not in the filtered catalog");
  }
  result.book = *it;
  DownloadOptions opts;
  if (!config.converter.empty()) opts.converter = config.converter;
  opts.parallelism = config.download_parallelism;
  DownloadReport rep;
  download_book(*http, *it, config.workdir, opts, &rep);
  result.audio_fetched = rep.fetched;
  result.audio_skipped = rep.skipped;
  const SelectorConfig sel =
      config.selectors.empty() ? SelectorConfig::builtin() : SelectorConfig::load(config.selectors);
  const std::string text = fetch_text(*http, *it, sel);
  write_file_atomic(config.workdir / "text" / book_id / "raw.txt", text);
  result.text_bytes = text.size();
  return result;
}

RunSummary run_pipeline(const PipelineConfig& config_in, const PipelineServices& services) {
  const PipelineConfig config = with_environment(config_in);
  std::shared_ptr<HttpClient> http = http_for(config, services);
  std::shared_ptr<AsrEngine> engine = services.engine;
  if (!engine) {
    if (!config.engine_url.empty()) {
      engine = std::make_shared<HttpEngine>(
          config.engine_url, http, config.engine_tag.empty() ? config.engine_url : config.engine_tag);
    } else if (!config.engine_command.empty()) {
      engine = std::make_shared<SubprocessEngine>(
          config.engine_command, config.engine_tag.empty() ? config.engine_command : config.engine_tag);
    } else if (!config.fixtures.empty()) {
      engine = std::shared_ptr<AsrEngine>(
          MockEngine::from_file(config.fixtures / "asr" / "transcripts.tsv",
                                config.engine_tag.empty() ? "mock" : config.engine_tag));
    } else {
      throw Error(ErrorCode::kConfig, "no ASR engine configured (engine_command or engine_url)");
    }
  }
  for (const auto& [book, path] : config.overrides) {
    if (!fs::exists(path)) throw Error(ErrorCode::kConfig, "override file for " + book + " not found: " + path.string());
  }
  if (!config.selectors.empty() && !fs::exists(config.selectors)) {
    throw Error(ErrorCode::kConfig, "selector file not found: " + config.selectors.string());
  }
  Runner runner(config, std::move(http), std::move(engine));
  return runner.run();
}

// ---------------------------------------------------------------------------
// Report

std::string format_dataset_table(const DatasetReport& r) {
  std::string out = "name\tspeakers\thours\tcount\tmva_db\tspa_percent\tuw1\tuw5\n";
  auto row = [&](const DatasetStats& s) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s\t%zu\t%.4f\t%zu\t%.2f (%.2f)\t%.2f (%.2f)\t%zu\t%zu\n", s.name.c_str(),
                  s.speakers, s.hours, s.count, s.mva_mean, s.mva_std, s.spa_mean, s.spa_std, s.uw1, s.uw5);
    out += buf;
  };
  for (const auto& s : r.per_speaker) row(s);
  if (r.total.count > 0) row(r.total);
  return out;
}

ReportResult report(const fs::path& workdir) {
  ReportResult result;
  const fs::path manifest = workdir / "corpus" / "manifest.jsonl";
  if (!fs::exists(manifest)) return result;

  std::map<std::string, std::vector<DatasetEntry>> subsets;
  for (const auto& line : split_lines(read_file(manifest))) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    DatasetEntry e;
    e.stats.snippet_id = j["snippet_id"];
    e.stats.duration_s = j["duration_s"];
    e.stats.min_volume_db = j["min_volume_db"];
    e.stats.silence_proportion = j["silence_proportion"];
    e.stats.avg_frequency_hz = j["avg_frequency_hz"];
    e.transcript = j["transcript"];
    e.speaker = j["speaker"];
    subsets[j["subset"].get<std::string>()].push_back(std::move(e));
  }
  if (subsets["full"].empty() && subsets["clean"].empty()) return result;

  const fs::path out = workdir / "report";
  fs::create_directories(out);
  std::string snippets = "subset\tsnippet_id\tspeaker\tduration_s\tmin_volume_db\tsilence_proportion\tavg_frequency_hz\n";
  for (const char* name : {"full", "clean"}) {
    const auto& entries = subsets[name];
    DatasetReport r;
    if (!entries.empty()) r = dataset_stats(entries);
    (std::string(name) == "full" ? result.full : result.clean) = r;
    const fs::path table = out / (std::string("table_") + name + ".tsv");
    write_file_atomic(table, format_dataset_table(r));
    result.files.push_back(table);

    std::vector<double> duration, volume, silence, frequency;
    for (const auto& e : entries) {
      duration.push_back(e.stats.duration_s);
      volume.push_back(e.stats.min_volume_db);
      silence.push_back(e.stats.silence_proportion * 100.0);
      frequency.push_back(e.stats.avg_frequency_hz);
      char buf[512];
      std::snprintf(buf, sizeof buf, "%s\t%s\t%s\t%.6f\t%.6f\t%.6f\t%.3f\n", name, e.stats.snippet_id.c_str(),
                    e.speaker.c_str(), e.stats.duration_s, e.stats.min_volume_db, e.stats.silence_proportion,
                    e.stats.avg_frequency_hz);
      snippets += buf;
    }
    const struct {
      const char* metric;
      const std::vector<double>* values;
      double width, lo, hi;
    } hists[] = {{"duration", &duration, 2.5, 0.0, 45.0},
                 {"min_volume", &volume, 2.5, -100.0, 0.0},
                 {"silence", &silence, 2.5, 0.0, 100.0},
                 {"frequency", &frequency, 50.0, 0.0, 5000.0}};
    for (const auto& h : hists) {
      const fs::path file = out / (std::string("hist_") + name + "_" + h.metric + ".tsv");
      write_file_atomic(file, histogram_tsv(histogram(*h.values, h.width, h.lo, h.hi)));
      result.files.push_back(file);
    }
  }
  write_file_atomic(out / "snippets.tsv", snippets);
  result.files.push_back(out / "snippets.tsv");
  result.status = ReportStatus::kOk;
  return result;
}

}  // namespace cforge
