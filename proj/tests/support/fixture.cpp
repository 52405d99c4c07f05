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

#include "fixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "corpus_forge/pipeline.hpp"
#include "corpus_forge/segmentation.hpp"
#include "corpus_forge/text_fold.hpp"
#include "corpus_forge/textnorm.hpp"
#include "corpus_forge/utf8.hpp"

namespace cforge::testsupport {

namespace fs = std::filesystem;

namespace {

constexpr double kWordBase = 0.12;
constexpr double kPerChar = 0.055;

const std::vector<std::string> kDeterminers = {"der", "die", "das", "ein", "eine", "kein", "jener", "dieser"};
const std::vector<std::string> kAdjectives = {
    "alte",    "junge",   "stille", "dunkle",  "große",   "kleine",  "müde",    "fröhliche",
    "fremde",  "schöne",  "kühle",  "weiße",   "graue",   "ferne",   "treue",   "schwere",
    "leise",   "helle",   "stolze", "arme",    "reiche",  "kluge",   "wilde",   "sanfte"};
const std::vector<std::string> kNouns = {
    "Müller",  "Förster", "Wanderer", "Brücke",  "Straße",   "Garten",   "Schloss",  "Kirche",
    "Mühle",   "Fluss",   "Wald",     "Abend",   "Morgen",   "Winter",   "Sommer",   "Nachbar",
    "Lehrer",  "Bäcker",  "Pfarrer",  "Kutscher", "Fenster", "Tür",      "Stube",    "Herd",
    "Brief",   "Wagen",   "Pferd",    "Hund",    "Vogel",    "Baum",     "Hügel",    "Dorf",
    "Stadt",   "Markt",   "Turm",     "Glocke",  "Laterne",  "Weg",      "Feld",     "Wiese",
    "Bach",    "Ufer",    "Kahn",     "Hafen",   "Schiff",   "Reise",    "Heimat",   "Fremde",
    "Tochter", "Sohn",    "Mutter",   "Vater",   "Bruder",   "Schwester", "Freund",  "Gast"};
const std::vector<std::string> kVerbs = {
    "ging",    "kam",     "sah",      "hörte",   "fand",     "trug",     "rief",     "schrieb",
    "wartete", "lachte",  "dachte",   "sprach",  "stand",    "saß",      "lief",     "fragte",
    "erzählte", "suchte", "brachte",  "verließ", "betrat",   "grüßte",   "öffnete",  "schloss"};
const std::vector<std::string> kAdverbs = {
    "langsam", "plötzlich", "leise",  "endlich", "schweigend", "heute",  "damals",   "wieder",
    "draußen", "drüben",    "bald",   "kaum",    "gerne",      "oft",    "sogleich", "abends"};
const std::vector<std::string> kPrepositions = {"über", "durch", "hinter", "neben", "vor", "unter", "zwischen",
                                                "entlang"};
const std::vector<std::string> kPlurals = {"Schritte", "Meilen", "Bäume", "Häuser", "Gulden", "Tage",
                                           "Stunden",  "Wochen", "Briefe", "Gäste"};
const std::vector<std::string> kMonths = {"Januar", "Februar", "März",      "April",   "Mai",      "Juni",
                                          "Juli",   "August",  "September", "Oktober", "November", "Dezember"};
const std::vector<std::string> kNames = {"Hoffmann", "Brenner", "Lindner", "Wagner", "Keller", "Sommer"};

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(std::mt19937_64& rng, double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }

std::string capitalize_first(std::string s) {
  std::u32string u = utf8::decode(s);
  if (!u.empty()) u[0] = utf8::to_upper(u[0]);
  return utf8::encode(u);
}

std::string noun_phrase(std::mt19937_64& rng) {
  std::string s = pick(rng, kDeterminers);
  if (chance(rng, 0.6)) s += " " + pick(rng, kAdjectives);
  return s + " " + pick(rng, kNouns);
}

std::string numeric_phrase(std::mt19937_64& rng) {
  switch (uniform(rng, 0, 5)) {
    case 0: return "im Jahre " + std::to_string(uniform(rng, 1700, 1899));
    case 1: return "am " + std::to_string(uniform(rng, 1, 28)) + ". " + pick(rng, kMonths);
    case 2: return "nach " + std::to_string(uniform(rng, 2, 999)) + " " + pick(rng, kPlurals);
    case 3: return "für " + std::to_string(uniform(rng, 2, 90)) + " Mark";
    case 4: return "mit Dr. " + pick(rng, kNames);
    default:
      return "etwa " + std::to_string(uniform(rng, 1, 9)) + "," + std::to_string(uniform(rng, 1, 9)) + " Meilen";
  }
}

std::string make_sentence(std::mt19937_64& rng) {
  std::string s = noun_phrase(rng) + " " + pick(rng, kVerbs);
  if (chance(rng, 0.7)) s += " " + pick(rng, kAdverbs);
  if (chance(rng, 0.5)) s += " " + pick(rng, kPrepositions) + " " + noun_phrase(rng);
  if (chance(rng, 0.3)) s += " " + numeric_phrase(rng);
  if (chance(rng, 0.35)) {
    s += ", und " + noun_phrase(rng) + " " + pick(rng, kVerbs);
    if (chance(rng, 0.5)) s += " " + pick(rng, kAdverbs);
  }
  const int end = uniform(rng, 0, 9);
  s += end == 0 ? "!" : end == 1 ? "?" : ".";
  return capitalize_first(s);
}

double estimate_seconds(const std::vector<std::string>& words) {
  double t = 0.6;
  for (const auto& w : words) t += kWordBase + kPerChar * static_cast<double>(utf8::decode(w).size()) + 0.085;
  return t;
}

void write_bytes(const fs::path& p, std::string_view bytes) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

std::string html_page(const std::string& title, const std::string& body, const std::string& next_href) {
  std::string h = "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>" + html_escape(title) +
                  "</title></head>\n<body>\n<div class=\"navi\"><a href=\"/\">Startseite</a> Inhalt</div>\n" +
                  body;
  if (!next_href.empty()) h += "<p><a class=\"next\" href=\"" + next_href + "\">weiter</a></p>\n";
  h += "<footer>Gemeinfreier Text</footer>\n</body></html>\n";
  return h;
}

}  // namespace

std::vector<std::string> make_sentences(std::mt19937_64& rng, std::size_t count) {
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(make_sentence(rng));
  return out;
}

std::vector<std::string> spoken_words(std::string_view raw) {
  const std::string folded = fold_words(normalize_text(raw).text);
  std::vector<std::string> words;
  std::istringstream in(folded);
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

std::string corrupt(std::string_view text, double cer, std::mt19937_64& rng) {
  static const std::u32string letters = U"abcdefghijklmnopqrstuvwxyzäöüß";
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> letter(0, letters.size() - 1);
  std::u32string out;
  for (char32_t c : utf8::decode(text)) {
    if (c == U' ' || u(rng) >= cer) {
      out.push_back(c);
      continue;
    }
    const double op = u(rng);
    if (op < 0.6) {
      char32_t r = letters[letter(rng)];
      if (r == c) r = c == U'e' ? U'a' : U'e';
      out.push_back(r);
    } else if (op < 0.8) {
      // deletion
    } else {
      out.push_back(c);
      out.push_back(letters[letter(rng)]);
    }
  }
  return utf8::encode(out);
}

SynthChapter synthesize(const std::vector<std::vector<std::string>>& sentences, const SynthVoice& voice,
                        std::uint64_t seed, int rate) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double fs_ = static_cast<double>(rate);
  auto secs = [&](double s) { return static_cast<std::size_t>(std::llround(s * fs_)); };

  SynthChapter ch;
  std::vector<float> x;
  x.resize(secs(0.4), 0.0f);
  for (std::size_t si = 0; si < sentences.size(); ++si) {
    const auto& words = sentences[si];
    for (std::size_t wi = 0; wi < words.size(); ++wi) {
      const std::size_t nchar = utf8::decode(words[wi]).size();
      const std::size_t len = secs(kWordBase + kPerChar * static_cast<double>(nchar));
      const std::size_t start = x.size();
      const double f0 = voice.f0 * (0.9 + 0.2 * u(rng));
      const double glide = (u(rng) - 0.5) * 0.2;
      const double syll = 3.5 + 2.0 * u(rng);
      const std::size_t ramp = std::min(secs(0.02), len / 2);
      double phase = 0.0;
      for (std::size_t n = 0; n < len; ++n) {
        const double t = static_cast<double>(n) / fs_;
        const double f = f0 * (1.0 + glide * static_cast<double>(n) / static_cast<double>(len));
        phase += 2.0 * std::numbers::pi * f / fs_;
        double v = 0.0;
        for (int h = 1; h <= 10; ++h) v += std::sin(h * phase) / h;
        const double am = 0.55 + 0.45 * std::abs(std::sin(std::numbers::pi * syll * t));
        double env = 1.0;
        if (n < ramp) env = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(n) / ramp);
        if (len - n <= ramp) env = std::min(env, 0.5 - 0.5 * std::cos(std::numbers::pi * (len - n - 1) / ramp));
        x.push_back(static_cast<float>(voice.peak * 0.5 * v * am * env));
      }
      ch.words.push_back({words[wi], start, x.size()});
      const double gap = wi + 1 < words.size() ? 0.05 + 0.07 * u(rng) : 0.45 + 0.3 * u(rng);
      if (wi + 1 == words.size()) ch.sentence_gap_centers.push_back(x.size() + secs(gap / 2));
      x.resize(x.size() + secs(gap), 0.0f);
    }
  }
  x.resize(x.size() + secs(0.4), 0.0f);
  if (!ch.sentence_gap_centers.empty()) ch.sentence_gap_centers.pop_back();

  std::normal_distribution<double> noise(0.0, std::pow(10.0, voice.noise_db / 20.0));
  for (float& s : x) s = static_cast<float>(std::clamp(s + noise(rng), -1.0, 1.0));
  ch.clip = AudioClip(std::move(x), rate);
  return ch;
}

std::vector<FixtureBook> default_books() {
  FixtureBook a;
  a.id = "9001";
  a.title = "Die Mühle am Bach";
  a.reader = "Anna Keller";
  a.f0 = 205.0;
  a.chapters = 2;
  a.chapter_seconds = 150.0;
  a.intro = true;
  a.paged_text = true;
  a.seed = 11;
  a.last_chapter_noise_db = -47.0;
  FixtureBook b;
  b.id = "9002";
  b.title = "Briefe aus der Stadt";
  b.reader = "Jonas Brenner";
  b.f0 = 115.0;
  b.chapters = 1;
  b.chapter_seconds = 90.0;
  b.seed = 23;
  return {a, b};
}

FixtureInfo write_fixture(const fs::path& root, const std::vector<FixtureBook>& books) {
  FixtureInfo info;
  info.root = root;
  info.catalog_url = kDefaultCatalogUrl;
  const fs::path http = root / "http";
  fs::create_directories(http);
  fs::create_directories(root / "asr");

  std::string index = "# url\tfile\n";
  index += info.catalog_url + "\tcatalog.json\n";
  std::string transcripts;
  nlohmann::json catalog = {{"books", nlohmann::json::array()}};

  for (const auto& book : books) {
    std::mt19937_64 rng(book.seed);
    std::mt19937_64 text_rng(book.seed ^ 0x5a5a5a5aULL);
    std::mt19937_64 asr_rng(book.seed * 7919 + 1);
    const std::string base = std::string(kFixtureHost) + "/books/" + book.id + "/";
    nlohmann::json sections = nlohmann::json::array();
    std::vector<std::string> chapter_html;

    for (int c = 1; c <= book.chapters; ++c) {
      std::vector<std::vector<std::string>> spoken;
      if (book.intro && c == 1) {
        spoken.push_back(spoken_words("Dies ist eine LibriVox Aufnahme."));
        spoken.push_back(spoken_words("Alle LibriVox Aufnahmen sind gemeinfrei."));
      }
      std::vector<std::string> raw;
      double seconds = 0.0;
      while (seconds < book.chapter_seconds) {
        raw.push_back(make_sentence(rng));
        spoken.push_back(spoken_words(raw.back()));
        seconds += estimate_seconds(spoken.back());
      }
      if (book.wrong_text) raw = make_sentences(text_rng, raw.size());

      std::string body = "<div class=\"chapter\">\n<h2>Kapitel " + std::to_string(c) + "</h2>\n";
      for (std::size_t i = 0; i < raw.size(); i += 3) {
        body += "<p>";
        for (std::size_t k = i; k < std::min(raw.size(), i + 3); ++k) {
          if (k > i) body += ' ';
          body += html_escape(raw[k]);
        }
        body += "</p>\n";
      }
      body += "</div>\n";
      chapter_html.push_back(body);

      SynthVoice voice;
      voice.f0 = book.f0;
      voice.noise_db = c == book.chapters ? book.last_chapter_noise_db : book.noise_db;
      const SynthChapter audio = synthesize(spoken, voice, book.seed * 1000 + static_cast<std::uint64_t>(c));
      info.words_spoken += audio.words.size();
      const std::string wav = encode_wav(audio.clip);
      char name[32];
      std::snprintf(name, sizeof name, "chapter_%02d.wav", c);
      write_bytes(http / "books" / book.id / name, wav);
      index += base + name + "\tbooks/" + book.id + "/" + name + "\n";
      sections.push_back({{"listen_url", base + name},
                          {"title", "Kapitel " + std::to_string(c)},
                          {"readers", {{{"display_name", book.reader}}}}});

      // Transcripts for the segments the pipeline will cut.
      const AudioClip decoded = decode_wav(wav);
      const SplitResult split = adaptive_split(decoded, SplitParams{});
      for (const auto& seg : split.segments) {
        std::string text;
        for (const auto& w : audio.words) {
          const std::size_t mid = (w.start + w.end) / 2;
          if (mid < seg.start_sample || mid >= seg.end_sample) continue;
          if (!text.empty()) text += ' ';
          text += w.text;
        }
        const std::string id = make_snippet_id(book.id, c, seg.ordinal + 1);
        info.snippet_ids.push_back(id);
        transcripts += id + '\t' + corrupt(text, book.asr_cer, asr_rng) + '\n';
      }
    }

    // Text pages.
    std::vector<std::string> pages;
    if (book.paged_text && chapter_html.size() > 1) {
      const std::size_t half = chapter_html.size() / 2;
      std::string p1, p2;
      for (std::size_t i = 0; i < chapter_html.size(); ++i) (i < half ? p1 : p2) += chapter_html[i];
      pages = {p1, p2};
    } else {
      std::string all;
      for (const auto& h : chapter_html) all += h;
      pages = {all};
    }
    for (std::size_t p = 0; p < pages.size(); ++p) {
      const std::string file = p == 0 ? "text.html" : "text_" + std::to_string(p + 1) + ".html";
      const std::string next = p + 1 < pages.size() ? "text_" + std::to_string(p + 2) + ".html" : "";
      write_bytes(http / "books" / book.id / file, html_page(book.title, pages[p], next));
      index += base + file + "\tbooks/" + book.id + "/" + file + "\n";
    }

    catalog["books"].push_back({{"id", book.id},
                                {"title", book.title},
                                {"language", "German"},
                                {"url_text_source", base + "text.html"},
                                {"sample_rate", kFixtureRate},
                                {"sections", sections}});
  }
  // Filtered out by language and by sample rate.
  catalog["books"].push_back({{"id", "9100"},
                              {"title", "An English Book"},
                              {"language", "English"},
                              {"url_text_source", std::string(kFixtureHost) + "/books/9100/text.html"},
                              {"sample_rate", kFixtureRate},
                              {"sections", {{{"listen_url", std::string(kFixtureHost) + "/books/9100/c1.wav"}}}}});
  catalog["books"].push_back({{"id", "9101"},
                              {"title", "Ein leises Buch"},
                              {"language", "German"},
                              {"url_text_source", std::string(kFixtureHost) + "/books/9101/text.html"},
                              {"sample_rate", 22050},
                              {"sections", {{{"listen_url", std::string(kFixtureHost) + "/books/9101/c1.wav"}}}}});

  write_bytes(http / "catalog.json", catalog.dump(1) + "\n");
  write_bytes(http / "index.tsv", index);
  write_bytes(root / "asr" / "transcripts.tsv", transcripts);
  return info;
}

PeriodicSilence silences_every(double period_s, double total_s, double gap_s, int rate) {
  PeriodicSilence out;
  const double fs_ = static_cast<double>(rate);
  const auto n_total = static_cast<std::size_t>(std::llround(total_s * fs_));
  const auto period = static_cast<std::size_t>(std::llround(period_s * fs_));
  const auto gap = static_cast<std::size_t>(std::llround(gap_s * fs_));
  std::vector<float> x(n_total, 0.0f);
  for (std::size_t n = 0; n < n_total; ++n) {
    const std::size_t in_period = n % period;
    double v = 0.0;
    if (in_period < period - gap) {
      const double t = static_cast<double>(n) / fs_;
      for (int h = 1; h <= 6; ++h) v += 0.2 * std::sin(2.0 * std::numbers::pi * 180.0 * h * t) / h;
    }
    x[n] = static_cast<float>(v);
  }
  for (std::size_t start = period - gap; start + gap <= n_total; start += period) {
    if (start + gap >= n_total) break;
    out.gap_centers.push_back(start + gap / 2);
  }
  out.clip = AudioClip(std::move(x), rate);
  return out;
}

SpanBook make_span_book(std::mt19937_64& rng, std::size_t n_words, std::size_t n_spans) {
  std::vector<std::string> vocab;
  for (const auto* list : {&kDeterminers, &kAdjectives, &kNouns, &kVerbs, &kAdverbs, &kPrepositions, &kPlurals,
                           &kMonths, &kNames}) {
    vocab.insert(vocab.end(), list->begin(), list->end());
  }
  // Cut points: near-equal spans with some jitter.
  std::vector<std::size_t> cuts = {0};
  const double per = static_cast<double>(n_words) / static_cast<double>(n_spans);
  for (std::size_t k = 1; k < n_spans; ++k) {
    const double jitter = std::uniform_real_distribution<double>(-0.2, 0.2)(rng) * per;
    cuts.push_back(static_cast<std::size_t>(std::llround(per * static_cast<double>(k) + jitter)));
  }
  cuts.push_back(n_words);

  SpanBook book;
  std::vector<std::size_t> tok_begin, tok_end;
  std::vector<std::string> lower;
  std::size_t sentence_left = 0;
  for (std::size_t w = 0; w < n_words; ++w) {
    std::string word = pick(rng, vocab);
    const bool starts = sentence_left == 0;
    if (starts) sentence_left = static_cast<std::size_t>(uniform(rng, 5, 15));
    lower.push_back(utf8::to_lower(word));
    if (starts) word = capitalize_first(word);
    --sentence_left;
    if (w > 0) book.source += (starts && chance(rng, 0.2)) ? "\n" : " ";
    tok_begin.push_back(book.source.size());
    book.source += word;
    if (sentence_left == 0 || w + 1 == n_words) {
      book.source += chance(rng, 0.15) ? "?" : ".";
    } else if (chance(rng, 0.08)) {
      book.source += ",";
    }
    tok_end.push_back(book.source.size());
  }
  for (std::size_t k = 0; k < n_spans; ++k) {
    book.span_begin.push_back(tok_begin[cuts[k]]);
    book.span_end.push_back(tok_end[cuts[k + 1] - 1]);
    std::string t;
    for (std::size_t w = cuts[k]; w < cuts[k + 1]; ++w) {
      if (!t.empty()) t += ' ';
      t += lower[w];
    }
    book.transcripts.push_back(std::move(t));
  }
  return book;
}

AudioClip sine(double freq_hz, double peak, double seconds, int rate) {
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate));
  std::vector<float> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<float>(peak * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / rate));
  }
  return AudioClip(std::move(x), rate);
}

}  // namespace cforge::testsupport
