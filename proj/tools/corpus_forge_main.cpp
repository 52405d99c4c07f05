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

// corpus-forge command line. Talks to the library only through the C API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "corpus_forge/corpus_forge.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

// Owns a malloc'd string handed out by the library.
struct CfString {
  char* p = nullptr;
  ~CfString() { cf_free(p); }
  std::string str() const { return p ? p : ""; }
};

int report_error(const char* what, cf_status st) {
  std::cerr << "corpus-forge: " << what << ": " << cf_status_string(st);
  const std::string detail = cf_last_error();
  if (!detail.empty()) std::cerr << ": " << detail;
  std::cerr << "\n";
  return st == CF_ERR_CONFIG || st == CF_ERR_INVALID_ARGUMENT ? kExitConfig : kExitPartial;
}

struct ConfigHandle {
  cf_config* c = nullptr;
  ~ConfigHandle() { cf_config_free(c); }
};

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += ',';
    out += s;
  }
  return out;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corpus-forge: build a TTS corpus from public-domain audiobooks"};
  app.set_version_flag("--version", std::string(cf_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> book_ids;
  bool clean_only = false;
  int jobs = 0;
  std::vector<std::string> sets;
  auto* run = app.add_subcommand("run", "run every stage and emit the corpus");
  run->add_option("--config", config_path, "key = value configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--book-id", book_ids, "book to process, repeatable; replaces the file's list");
  run->add_flag("--clean-only", clean_only, "emit only the clean subset");
  run->add_option("--jobs", jobs, "books processed in parallel")->check(CLI::PositiveNumber);
  run->add_option("--set", sets, "extra key=value override, repeatable");

  std::string report_workdir;
  auto* rep = app.add_subcommand("report", "summarize an emitted corpus");
  rep->add_option("--workdir", report_workdir, "pipeline working directory")->required();

  std::string text_path;
  std::string overrides_path;
  auto* norm = app.add_subcommand("normalize-text", "normalize a German text file to stdout");
  norm->add_option("file", text_path, "UTF-8 input, '-' for stdin")->required();
  norm->add_option("--overrides", overrides_path, "per-book override file");

  std::string language = "de";
  int min_rate = 44100;
  std::string ingest_book;
  std::string ingest_workdir;
  std::string fixtures;
  std::string ingest_config;
  auto* ing = app.add_subcommand("ingest", "download one book's audio and text");
  ing->add_option("--language", language, "catalog language code");
  ing->add_option("--min-rate", min_rate, "minimum sample rate in Hz")->check(CLI::PositiveNumber);
  ing->add_option("--book-id", ingest_book, "catalog book id")->required();
  ing->add_option("--workdir", ingest_workdir, "working directory")->required();
  ing->add_option("--fixtures", fixtures, "fixture directory (hermetic mode)");
  ing->add_option("--config", ingest_config, "optional configuration file")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (*run) {
    ConfigHandle cfg;
    cf_status st = cf_config_new(&cfg.c);
    if (st == CF_OK) st = cf_config_load(cfg.c, config_path.c_str());
    if (st == CF_OK && !book_ids.empty()) st = cf_config_set(cfg.c, "book_ids", join(book_ids).c_str());
    if (st == CF_OK && clean_only) st = cf_config_set(cfg.c, "clean_only", "true");
    if (st == CF_OK && jobs > 0) st = cf_config_set(cfg.c, "jobs", std::to_string(jobs).c_str());
    for (const auto& kv : sets) {
      if (st != CF_OK) break;
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::cerr << "corpus-forge: --set expects key=value, got '" << kv << "'\n";
        return kExitConfig;
      }
      st = cf_config_set(cfg.c, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    }
    if (st != CF_OK) return report_error("configuration", st);

    cf_run* r = nullptr;
    st = cf_run_pipeline(cfg.c, &r);
    if (st != CF_OK) return report_error("run", st);
    CfString json;
    if (cf_run_summary_json(r, &json.p) == CF_OK) std::cout << json.str();
    const int rc = cf_run_exit_code(r);
    cf_run_free(r);
    return rc == 0 ? kExitOk : kExitPartial;
  }

  if (*rep) {
    CfString text;
    const cf_status st = cf_report(report_workdir.c_str(), &text.p);
    if (st == CF_ERR_NO_DATA) {
      std::cerr << "corpus-forge: no data: " << cf_last_error() << "\n";
      return kExitPartial;
    }
    if (st != CF_OK) return report_error("report", st);
    std::cout << text.str();
    return kExitOk;
  }

  if (*norm) {
    std::string raw;
    if (text_path == "-") {
      std::ostringstream ss;
      ss << std::cin.rdbuf();
      raw = ss.str();
    } else if (!read_file(text_path, raw)) {
      std::cerr << "corpus-forge: cannot read " << text_path << "\n";
      return kExitPartial;
    }
    CfString out;
    const cf_status st =
        cf_normalize_text(raw.c_str(), overrides_path.empty() ? nullptr : overrides_path.c_str(), &out.p);
    if (st != CF_OK) return report_error("normalize-text", st);
    std::cout << out.str();
    if (!out.str().empty() && out.str().back() != '\n') std::cout << '\n';
    return kExitOk;
  }

  if (*ing) {
    ConfigHandle cfg;
    cf_status st = cf_config_new(&cfg.c);
    if (st == CF_OK && !ingest_config.empty()) st = cf_config_load(cfg.c, ingest_config.c_str());
    if (st == CF_OK) st = cf_config_set(cfg.c, "language", language.c_str());
    if (st == CF_OK) st = cf_config_set(cfg.c, "min_sample_rate", std::to_string(min_rate).c_str());
    if (st == CF_OK) st = cf_config_set(cfg.c, "workdir", ingest_workdir.c_str());
    if (st == CF_OK && !fixtures.empty()) st = cf_config_set(cfg.c, "fixtures", fixtures.c_str());
    if (st != CF_OK) return report_error("configuration", st);
    CfString json;
    st = cf_ingest(cfg.c, ingest_book.c_str(), &json.p);
    if (st != CF_OK) return report_error("ingest", st);
    std::cout << json.str();
    return kExitOk;
  }
  return kExitConfig;
}
