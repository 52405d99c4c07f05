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

#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixture.hpp"
#include "tempdir.hpp"
#include "json.hpp"
#include "corpus_forge/audio.hpp"
#include "corpus_forge/error.hpp"
#include "corpus_forge/files.hpp"
#include "corpus_forge/ingest.hpp"

using namespace cforge;
using namespace cforge::testsupport;
namespace fs = std::filesystem;

namespace {

const std::string kHost = "https://mirror.invalid";

// Small served directory: files plus index.tsv.
struct Served {
  TempDir dir{"ingest"};
  std::string index;

  void add(const std::string& path, const std::string& body) {
    write_file_atomic(dir / ("files/" + path), body);
    index += kHost + "/" + path + "\tfiles/" + path + "\n";
  }
  void status(const std::string& path, int code) {
    index += kHost + "/" + path + "\t!" + std::to_string(code) + "\n";
  }
  FixtureHttpClient client() {
    write_file_atomic(dir / "index.tsv", index);
    return FixtureHttpClient(dir.path());
  }
};

nlohmann::json book(const std::string& id, const std::string& lang, int rate) {
  return {{"id", id},
          {"title", "Buch " + id},
          {"language", lang},
          {"sample_rate", rate},
          {"url_text_source", kHost + "/text/" + id + ".html"},
          {"sections", {{{"listen_url", kHost + "/a/" + id + "_1.wav"},
                         {"readers", {{{"display_name", "Leser " + id}}}}}}}};
}

std::string catalog(const std::vector<nlohmann::json>& books) {
  nlohmann::json j = {{"books", nlohmann::json::array()}};
  for (const auto& b : books) j["books"].push_back(b);
  return j.dump();
}

std::string small_wav(double f) { return encode_wav(sine(f, 0.2, 0.3, 44100)); }

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("catalog parsing") {
    const auto recs = parse_catalog(catalog({book("7", "German", 44100)}), "t");
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].book_id == "7");
    CHECK(recs[0].reader_name == "Leser 7");
    CHECK(recs[0].native_sample_rate == 44100);
    REQUIRE(recs[0].chapter_audio_urls.size() == 1);
    CHECK(recs[0].text_url == kHost + "/text/7.html");
    CHECK(parse_catalog("[]", "t").empty());
    CHECK(parse_catalog(R"({"books": []})", "t").empty());
    try {
      parse_catalog("{not json", "t");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kFormat);
    }
  }

  TEST_CASE("catalog filters on rate and language") {
    Served s;
    s.add("rate.json", catalog({book("1", "German", 32000), book("2", "German", 44100),
                                book("3", "German", 44100)}));
    s.add("lang.json", catalog({book("12", "de", 48000), book("4", "German", 44100),
                                book("5", "English", 44100), book("6", "en", 44100),
                                book("10", "German", 44100)}));
    s.add("empty.json", R"({"books": []})");
    auto http = s.client();

    const auto r = fetch_catalog(http, kHost + "/rate.json", "de", 44100);
    CHECK(r.size() == 2);
    for (const auto& b : r) CHECK(b.native_sample_rate >= 44100);

    const auto l = fetch_catalog(http, kHost + "/lang.json", "de", 44100);
    REQUIRE(l.size() == 3);
    CHECK(l[0].book_id == "4");
    CHECK(l[1].book_id == "10");
    CHECK(l[2].book_id == "12");

    CHECK(fetch_catalog(http, kHost + "/empty.json", "de", 44100).empty());
    CHECK_THROWS_AS(fetch_catalog(http, kHost + "/missing.json", "de", 44100), Error);
  }

  TEST_CASE("download is resumable") {
    Served s;
    s.add("a/b_1.wav", small_wav(200));
    s.add("a/b_2.wav", small_wav(300));
    auto http = s.client();
    BookRecord rec;
    rec.book_id = "b";
    rec.chapter_audio_urls = {kHost + "/a/b_1.wav", kHost + "/a/b_2.wav"};
    TempDir work("dl");

    DownloadReport first;
    const auto bundle = download_book(http, rec, work.path(), {}, &first);
    CHECK(first.fetched == 2);
    CHECK(first.skipped == 0);
    REQUIRE(bundle.audio_paths.size() == 2);
    CHECK(bundle.audio_paths[0].filename() == "chapter_01.wav");
    CHECK(read_wav(bundle.audio_paths[1]).sample_rate() == 44100);
    CHECK(fs::exists(work / "audio/b/manifest.tsv"));

    const int before = http.request_count();
    DownloadReport second;
    download_book(http, rec, work.path(), {}, &second);
    CHECK(second.fetched == 0);
    CHECK(second.skipped == 2);
    CHECK(http.request_count() == before);

    // A damaged file is fetched again.
    write_file_atomic(bundle.audio_paths[0], "junk");
    DownloadReport third;
    download_book(http, rec, work.path(), {}, &third);
    CHECK(third.fetched == 1);
    CHECK(third.skipped == 1);
  }

  TEST_CASE("dead urls are reported together") {
    Served s;
    s.add("a/ok.wav", small_wav(250));
    s.status("a/gone.wav", 404);
    auto http = s.client();
    BookRecord rec;
    rec.book_id = "d";
    rec.chapter_audio_urls = {kHost + "/a/ok.wav", kHost + "/a/gone.wav"};
    TempDir work("dl");
    try {
      download_book(http, rec, work.path());
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNetwork);
      const std::string msg = e.what();
      CHECK(msg.find(kHost + "/a/gone.wav") != std::string::npos);
      CHECK(msg.find(kHost + "/a/ok.wav") == std::string::npos);
    }
    CHECK(fs::exists(work / "audio/d/chapter_01.wav"));
  }

  TEST_CASE("non-wav audio goes through the converter") {
    Served s;
    const std::string wav = small_wav(220);
    s.add("a/c.mp3", wav);  // the fake converter just copies
    auto http = s.client();
    TempDir work("conv");
    const fs::path script = work / "fakeconv.sh";
    write_file_atomic(script, "#!/bin/sh\ncp \"$1\" \"$2\"\n");
    fs::permissions(script, fs::perms::owner_all);
    BookRecord rec;
    rec.book_id = "c";
    rec.chapter_audio_urls = {kHost + "/a/c.mp3"};

    DownloadOptions opt;
    opt.converter = script.string() + " {in} {out}";
    const auto bundle = download_book(http, rec, work.path(), opt);
    CHECK(read_file(bundle.audio_paths[0]) == wav);
    CHECK_FALSE(fs::exists(work / "audio/c/chapter_01.mp3"));

    opt.converter = "/nonexistent/converter {in} {out}";
    TempDir work2("conv");
    try {
      download_book(http, rec, work2.path(), opt);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConverter);
    }

    opt.converter = "false {in} {out}";
    TempDir work3("conv");
    try {
      download_book(http, rec, work3.path(), opt);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConverter);
    }
  }

  TEST_CASE("html extraction") {
    const auto sel = SelectorConfig::builtin();
    CHECK(html_to_text("<html><body><p>Ein Satz.</p></body></html>", sel) == "Ein Satz.");
    const std::string page =
        "<html><body><nav>Startseite | Inhalt</nav>"
        "<p>Erster Absatz &amp; mehr.</p>\n<p>Zweiter\n  Absatz.</p>"
        "<footer>Impressum</footer></body></html>";
    CHECK(html_to_text(page, sel) == "Erster Absatz & mehr.\nZweiter Absatz.");

    const std::string gutenb =
        "<div class=\"navi\">zurück</div><div id=\"gutenb\"><h3>Erstes Kapitel</h3>"
        "<p>Text.</p></div><p>Werbung</p>";
    CHECK(html_to_text(gutenb, sel) == "Erstes Kapitel\nText.");

    const auto custom = SelectorConfig::parse("content = div.x\ndrop = span.n\n# note\n");
    CHECK(html_to_text("<div class=\"x\"><p>A<span class=\"n\">12</span>B</p></div>", custom) == "AB");
    CHECK_THROWS_AS(SelectorConfig::parse("colour = p\n"), Error);
  }

  TEST_CASE("multi-page text and latin-1") {
    Served s;
    s.add("text/m.html", "<p>Seite eins.</p><a class=\"next\" href=\"m2.html\">weiter</a>");
    s.add("text/m2.html", "<p>Seite zwei.</p>");
    s.add("text/l.html", std::string("<p>Gr\xfc\xdf" "e aus M\xfc" "nchen.</p>"));
    auto http = s.client();
    BookRecord rec;
    rec.text_url = kHost + "/text/m.html";
    const auto text = fetch_text(http, rec);
    CHECK(text.find("Seite eins.") != std::string::npos);
    CHECK(text.find("Seite zwei.") != std::string::npos);
    CHECK(text.find("Seite eins.") < text.find("Seite zwei."));
    CHECK(text.find("weiter") == std::string::npos);

    rec.text_url = kHost + "/text/l.html";
    CHECK(fetch_text(http, rec) == "Grüße aus München.");

    rec.text_url = kHost + "/text/none.html";
    CHECK_THROWS_AS(fetch_text(http, rec), Error);
  }
}
