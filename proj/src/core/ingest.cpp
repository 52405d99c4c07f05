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

#include "corpus_forge/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include "json.hpp"
#include "corpus_forge/audio.hpp"
#include "corpus_forge/error.hpp"
#include "corpus_forge/files.hpp"
#include "corpus_forge/hash.hpp"
#include "corpus_forge/utf8.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cforge {

// ---------------------------------------------------------------------------
// Catalog

namespace {

std::string json_string(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return {};
  const json& v = j[key];
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return v.dump();
}

int json_int(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return 0;
  const json& v = j[key];
  if (v.is_number()) return v.get<int>();
  if (v.is_string()) {
    try {
      return std::stoi(v.get<std::string>());
    } catch (const std::exception&) {
      return 0;
    }
  }
  return 0;
}

std::string language_name(const std::string& tag) {
  static const std::map<std::string, std::string> kNames = {
      {"de", "german"}, {"en", "english"}, {"fr", "french"}, {"es", "spanish"},
      {"it", "italian"}, {"nl", "dutch"}, {"pl", "polish"}, {"pt", "portuguese"}};
  const std::string lower = utf8::to_lower(tag);
  const std::string primary = lower.substr(0, lower.find_first_of("-_"));
  const auto it = kNames.find(primary);
  return it == kNames.end() ? lower : it->second;
}

bool language_matches(const std::string& record_language, const std::string& wanted) {
  return language_name(record_language) == language_name(wanted);
}

// Numeric ids sort numerically, everything else lexicographically after.
bool book_id_less(const std::string& a, const std::string& b) {
  auto numeric = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  const bool na = numeric(a);
  const bool nb = numeric(b);
  if (na && nb) return a.size() != b.size() ? a.size() < b.size() : a < b;
  if (na != nb) return na;
  return a < b;
}

}  // namespace

std::vector<BookRecord> parse_catalog(std::string_view json_text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, "malformed catalog payload from " + origin + ": " + e.what());
  }
  if (doc.is_array() && doc.empty()) return {};
  if (!doc.is_object()) {
    throw Error(ErrorCode::kFormat, "malformed catalog payload from " + origin + ": not an object");
  }
  if (!doc.contains("books") || doc["books"].is_null()) return {};
  if (!doc["books"].is_array()) {
    throw Error(ErrorCode::kFormat, "malformed catalog payload from " + origin + ": books is not a list");
  }
  std::vector<BookRecord> out;
  for (const json& b : doc["books"]) {
    if (!b.is_object()) {
      throw Error(ErrorCode::kFormat, "malformed catalog payload from " + origin + ": book entry");
    }
    BookRecord r;
    r.book_id = json_string(b, "id");
    r.title = json_string(b, "title");
    r.language = json_string(b, "language");
    r.text_url = json_string(b, "url_text_source");
    r.native_sample_rate = json_int(b, "sample_rate");
    if (b.contains("sections") && b["sections"].is_array()) {
      for (const json& s : b["sections"]) {
        const std::string url = json_string(s, "listen_url");
        if (!url.empty()) r.chapter_audio_urls.push_back(url);
        if (r.reader_name.empty() && s.contains("readers") && s["readers"].is_array() &&
            !s["readers"].empty()) {
          r.reader_name = json_string(s["readers"][0], "display_name");
        }
      }
    }
    if (r.reader_name.empty() && b.contains("readers") && b["readers"].is_array() &&
        !b["readers"].empty()) {
      r.reader_name = json_string(b["readers"][0], "display_name");
    }
    if (r.book_id.empty()) {
      throw Error(ErrorCode::kFormat, "malformed catalog payload from " + origin + ": book without id");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<BookRecord> fetch_catalog(HttpClient& http, const std::string& catalog_url,
                                      const std::string& language, int min_sample_rate) {
  const HttpResponse res = http.get(catalog_url);
  if (res.status != 200) {
    throw Error(ErrorCode::kNetwork,
                "catalog unreachable (HTTP " + std::to_string(res.status) + "): " + catalog_url);
  }
  std::vector<BookRecord> out;
  for (auto& r : parse_catalog(res.body, catalog_url)) {
    if (!language_matches(r.language, language)) continue;
    if (r.native_sample_rate < min_sample_rate) continue;
    if (r.chapter_audio_urls.empty()) continue;
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const BookRecord& a, const BookRecord& b) {
    return book_id_less(a.book_id, b.book_id);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Audio download

namespace {

struct ManifestEntry {
  std::string file;
  std::uintmax_t size = 0;
  std::string sha256;
};

std::map<std::string, ManifestEntry> read_manifest(const fs::path& path) {
  std::map<std::string, ManifestEntry> m;
  if (!fs::exists(path)) return m;
  for (const auto& line : split_lines(read_file(path))) {
    const auto f = split(line, '\t');
    if (f.size() != 4) continue;
    m[f[0]] = {f[1], std::stoull(f[2]), f[3]};
  }
  return m;
}

std::string render_manifest(const std::map<std::string, ManifestEntry>& m) {
  std::string out;
  for (const auto& [url, e] : m) {
    out += url + '\t' + e.file + '\t' + std::to_string(e.size) + '\t' + e.sha256 + '\n';
  }
  return out;
}

std::string url_extension(const std::string& url) {
  std::string path = url.substr(0, url.find_first_of("?#"));
  const size_t slash = path.rfind('/');
  const size_t dot = path.rfind('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return "";
  return utf8::to_lower(path.substr(dot));
}

std::string safe_component(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

}  // namespace

RawBookBundle download_book(HttpClient& http, const BookRecord& record, const fs::path& workdir,
                            const DownloadOptions& options, DownloadReport* report) {
  if (record.chapter_audio_urls.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "book " + record.book_id + " has no chapters");
  }
  const fs::path dir = workdir / "audio" / safe_component(record.book_id);
  fs::create_directories(dir);
  const fs::path manifest_path = dir / "manifest.tsv";

  std::mutex mu;  // guards manifest, failures and the report
  auto manifest = read_manifest(manifest_path);
  std::vector<std::string> failures;
  DownloadReport local;

  bool needs_converter = false;
  for (const auto& url : record.chapter_audio_urls) needs_converter |= url_extension(url) != ".wav";
  if (needs_converter) {
    const auto argv = expand_command(options.converter, {{"in", "x"}, {"out", "y"}});
    if (argv.empty() || !executable_available(argv[0])) {
      throw Error(ErrorCode::kConverter,
                  "audio converter not found: '" + (argv.empty() ? std::string() : argv[0]) + "'");
    }
  }

  RawBookBundle bundle;
  bundle.book = record;
  const size_t n = record.chapter_audio_urls.size();
  for (size_t i = 0; i < n; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "chapter_%02zu.wav", i + 1);
    bundle.audio_paths.push_back(dir / name);
  }

  auto fetch_one = [&](size_t i) {
    const std::string& url = record.chapter_audio_urls[i];
    const fs::path out = bundle.audio_paths[i];
    {
      std::lock_guard lock(mu);
      const auto it = manifest.find(url);
      if (it != manifest.end() && it->second.file == out.filename().string() && fs::exists(out) &&
          fs::file_size(out) == it->second.size && sha256_file(out) == it->second.sha256) {
        ++local.skipped;
        return;
      }
    }
    HttpResponse res;
    try {
      res = http.get(url);
    } catch (const Error&) {
      std::lock_guard lock(mu);
      failures.push_back(url);
      return;
    }
    if (res.status != 200) {
      std::lock_guard lock(mu);
      failures.push_back(url);
      return;
    }
    const std::string ext = url_extension(url);
    if (ext == ".wav") {
      decode_wav(res.body, url);  // rejects non-WAV payloads early
      write_file_atomic(out, res.body);
    } else {
      const fs::path raw = fs::path(out).replace_extension(ext.empty() ? ".bin" : ext);
      write_file_atomic(raw, res.body);
      const fs::path tmp_out = fs::path(out).replace_extension(".conv.wav");
      const auto argv =
          expand_command(options.converter, {{"in", raw.string()}, {"out", tmp_out.string()}});
      const ProcessResult r = run_process(argv);
      fs::remove(raw);
      if (r.exit_code != 0 || !fs::exists(tmp_out)) {
        throw Error(ErrorCode::kConverter,
                    "converter failed (status " + std::to_string(r.exit_code) + ") for " + url);
      }
      fs::rename(tmp_out, out);
    }
    ManifestEntry e{out.filename().string(), fs::file_size(out), sha256_file(out)};
    std::lock_guard lock(mu);
    manifest[url] = e;
    write_file_atomic(manifest_path, render_manifest(manifest));
    ++local.fetched;
  };

  std::atomic<size_t> next{0};
  std::exception_ptr hard_error;
  auto worker = [&] {
    for (size_t i = next++; i < n; i = next++) {
      try {
        fetch_one(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!hard_error) hard_error = std::current_exception();
      }
    }
  };
  const size_t workers = std::clamp<size_t>(static_cast<size_t>(std::max(1, options.parallelism)), 1, n);
  std::vector<std::thread> pool;
  for (size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (report) *report = local;
  if (hard_error) std::rethrow_exception(hard_error);
  if (!failures.empty()) {
    std::sort(failures.begin(), failures.end());
    std::string msg = "book " + record.book_id + ": download failed for";
    for (const auto& u : failures) msg += " " + u;
    throw Error(ErrorCode::kNetwork, msg);
  }
  return bundle;
}

// ---------------------------------------------------------------------------
// HTML

namespace {

struct Node {
  std::string tag;  // empty for text nodes
  std::map<std::string, std::string> attrs;
  std::string text;
  std::vector<std::unique_ptr<Node>> children;
};

bool is_void_tag(const std::string& t) {
  static const std::set<std::string> kVoid = {"br", "img", "hr", "meta", "link", "input",
                                              "area", "base", "col", "wbr", "source", "param"};
  return kVoid.count(t) > 0;
}

bool is_block_tag(const std::string& t) {
  static const std::set<std::string> kBlock = {
      "p", "div", "h1", "h2", "h3", "h4", "h5", "h6", "li", "ul", "ol", "tr", "table",
      "blockquote", "section", "article", "pre", "br", "hr", "dd", "dt", "dl", "center",
      "header", "footer", "nav", "main", "aside", "body", "html", "td", "th"};
  return kBlock.count(t) > 0;
}

bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
         c == '_' || c == ':';
}

std::string lower_ascii(std::string s) {
  for (auto& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

std::unique_ptr<Node> parse_html(std::string_view html) {
  auto root = std::make_unique<Node>();
  root->tag = "#root";
  std::vector<Node*> stack{root.get()};
  size_t i = 0;
  const size_t n = html.size();

  auto add_text = [&](std::string_view t) {
    if (t.empty()) return;
    auto node = std::make_unique<Node>();
    node->text = std::string(t);
    stack.back()->children.push_back(std::move(node));
  };

  while (i < n) {
    if (html[i] != '<') {
      const size_t lt = html.find('<', i);
      const size_t end = lt == std::string_view::npos ? n : lt;
      add_text(html.substr(i, end - i));
      i = end;
      continue;
    }
    if (html.compare(i, 4, "<!--") == 0) {
      const size_t e = html.find("-->", i + 4);
      i = e == std::string_view::npos ? n : e + 3;
      continue;
    }
    if (i + 1 < n && (html[i + 1] == '!' || html[i + 1] == '?')) {
      const size_t e = html.find('>', i);
      i = e == std::string_view::npos ? n : e + 1;
      continue;
    }
    if (i + 1 < n && html[i + 1] == '/') {
      size_t j = i + 2;
      while (j < n && is_name_char(html[j])) ++j;
      const std::string name = lower_ascii(std::string(html.substr(i + 2, j - i - 2)));
      const size_t e = html.find('>', j);
      i = e == std::string_view::npos ? n : e + 1;
      for (size_t k = stack.size(); k-- > 1;) {
        if (stack[k]->tag == name) {
          stack.resize(k);
          break;
        }
      }
      continue;
    }
    size_t j = i + 1;
    while (j < n && is_name_char(html[j])) ++j;
    if (j == i + 1) {  // a lone '<'
      add_text("<");
      ++i;
      continue;
    }
    auto node = std::make_unique<Node>();
    node->tag = lower_ascii(std::string(html.substr(i + 1, j - i - 1)));
    bool self_closing = false;
    // Attributes.
    while (j < n && html[j] != '>') {
      if (html[j] == '/') {
        self_closing = true;
        ++j;
        continue;
      }
      if (!is_name_char(html[j])) {
        ++j;
        continue;
      }
      size_t k = j;
      while (k < n && is_name_char(html[k])) ++k;
      const std::string key = lower_ascii(std::string(html.substr(j, k - j)));
      std::string value;
      while (k < n && html[k] == ' ') ++k;
      if (k < n && html[k] == '=') {
        ++k;
        while (k < n && html[k] == ' ') ++k;
        if (k < n && (html[k] == '"' || html[k] == '\'')) {
          const char q = html[k];
          const size_t e = html.find(q, k + 1);
          const size_t stop = e == std::string_view::npos ? n : e;
          value = std::string(html.substr(k + 1, stop - k - 1));
          k = stop == n ? n : stop + 1;
        } else {
          size_t e = k;
          while (e < n && html[e] != '>' && html[e] != ' ' && html[e] != '\t' && html[e] != '\n') ++e;
          value = std::string(html.substr(k, e - k));
          k = e;
        }
      }
      node->attrs[key] = value;
      self_closing = false;
      j = k;
    }
    i = j < n ? j + 1 : n;

    const std::string tag = node->tag;
    if (tag == "script" || tag == "style") {
      const std::string close = "</" + tag;
      size_t e = i;
      while (e < n) {
        e = html.find("</", e);
        if (e == std::string_view::npos) break;
        if (lower_ascii(std::string(html.substr(e, close.size()))) == close) break;
        e += 2;
      }
      const size_t gt = e == std::string_view::npos ? std::string_view::npos : html.find('>', e);
      i = gt == std::string_view::npos ? n : gt + 1;
      continue;
    }
    // Implied end tags of sloppy markup.
    if ((tag == "p" || is_block_tag(tag)) && stack.back()->tag == "p" && tag != "br") stack.pop_back();
    if (tag == "li" && stack.back()->tag == "li") stack.pop_back();
    Node* raw = node.get();
    stack.back()->children.push_back(std::move(node));
    if (!self_closing && !is_void_tag(tag)) stack.push_back(raw);
  }
  return root;
}

struct Selector {
  std::string tag;
  std::string id;
  std::string cls;
  std::string attr;
  std::string value;
};

Selector parse_selector(const std::string& text) {
  Selector s;
  std::string t(trim(text));
  const size_t br = t.find('[');
  if (br != std::string::npos) {
    const size_t close = t.find(']', br);
    std::string inner = t.substr(br + 1, (close == std::string::npos ? t.size() : close) - br - 1);
    const size_t eq = inner.find('=');
    s.attr = lower_ascii(std::string(trim(inner.substr(0, eq))));
    if (eq != std::string::npos) {
      std::string v(trim(inner.substr(eq + 1)));
      if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'')) v = v.substr(1, v.size() - 2);
      s.value = v;
    }
    t.resize(br);
  }
  const size_t mark = t.find_first_of(".#");
  s.tag = lower_ascii(t.substr(0, mark));
  if (mark != std::string::npos) {
    (t[mark] == '.' ? s.cls : s.id) = t.substr(mark + 1);
  }
  return s;
}

bool matches(const Node& n, const Selector& s) {
  if (n.tag.empty() || n.tag == "#root") return false;
  if (!s.tag.empty() && s.tag != n.tag) return false;
  auto attr = [&](const std::string& k) -> const std::string* {
    const auto it = n.attrs.find(k);
    return it == n.attrs.end() ? nullptr : &it->second;
  };
  if (!s.id.empty()) {
    const auto* v = attr("id");
    if (!v || *v != s.id) return false;
  }
  if (!s.cls.empty()) {
    const auto* v = attr("class");
    if (!v) return false;
    bool found = false;
    for (const auto& c : split(*v, ' ')) found |= c == s.cls;
    if (!found) return false;
  }
  if (!s.attr.empty()) {
    const auto* v = attr(s.attr);
    if (!v || (!s.value.empty() && *v != s.value)) return false;
  }
  return true;
}

bool matches_any(const Node& n, const std::vector<Selector>& list) {
  return std::any_of(list.begin(), list.end(), [&](const Selector& s) { return matches(n, s); });
}

std::vector<Selector> compile(const std::vector<std::string>& list) {
  std::vector<Selector> out;
  for (const auto& s : list) out.push_back(parse_selector(s));
  return out;
}

void collect_matches(const Node& n, const std::vector<Selector>& sel, std::vector<const Node*>& out) {
  if (matches_any(n, sel)) {
    out.push_back(&n);
    return;
  }
  for (const auto& c : n.children) collect_matches(*c, sel, out);
}

void append_code_point(std::string& out, unsigned long cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  utf8::append(out, static_cast<char32_t>(cp));
}

std::string decode_entities(std::string_view s) {
  static const std::map<std::string, char32_t> kNamed = {
      {"amp", U'&'},     {"lt", U'<'},      {"gt", U'>'},      {"quot", U'"'},   {"apos", U'\''},
      {"nbsp", 0xA0},    {"auml", U'ä'},    {"ouml", U'ö'},    {"uuml", U'ü'},   {"Auml", U'Ä'},
      {"Ouml", U'Ö'},    {"Uuml", U'Ü'},    {"szlig", U'ß'},   {"laquo", U'«'},  {"raquo", U'»'},
      {"bdquo", 0x201E}, {"ldquo", 0x201C}, {"rdquo", 0x201D}, {"lsquo", 0x2018}, {"rsquo", 0x2019},
      {"sbquo", 0x201A}, {"ndash", 0x2013}, {"mdash", 0x2014}, {"hellip", 0x2026}, {"eacute", U'é'},
      {"egrave", U'è'},  {"agrave", U'à'},  {"aacute", U'á'},  {"ecirc", U'ê'},  {"ccedil", U'ç'},
      {"copy", U'©'},    {"sect", U'§'},    {"deg", U'°'},     {"frac12", U'½'}, {"frac14", U'¼'},
      {"frac34", U'¾'},  {"times", U'×'},   {"lsaquo", 0x2039}, {"rsaquo", 0x203A}, {"thinsp", 0x2009}};
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out += s[i++];
      continue;
    }
    const size_t semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += s[i++];
      continue;
    }
    const std::string name(s.substr(i + 1, semi - i - 1));
    if (name == "shy") {
      i = semi + 1;
      continue;
    }
    if (!name.empty() && name[0] == '#') {
      try {
        const unsigned long cp = (name.size() > 1 && (name[1] == 'x' || name[1] == 'X'))
                                     ? std::stoul(name.substr(2), nullptr, 16)
                                     : std::stoul(name.substr(1), nullptr, 10);
        append_code_point(out, cp);
        i = semi + 1;
        continue;
      } catch (const std::exception&) {
      }
    }
    const auto it = kNamed.find(name);
    if (it != kNamed.end()) {
      utf8::append(out, it->second);
      i = semi + 1;
      continue;
    }
    out += s[i++];
  }
  return out;
}

class ParagraphWriter {
 public:
  void text(std::string_view t) {
    for (char32_t c : utf8::decode(decode_entities(t))) {
      if (utf8::is_space(c)) {
        pending_space_ = !current_.empty();
        continue;
      }
      if (pending_space_) current_ += ' ';
      pending_space_ = false;
      utf8::append(current_, c);
    }
  }
  void paragraph_break() {
    if (!current_.empty()) paragraphs_.push_back(std::move(current_));
    current_.clear();
    pending_space_ = false;
  }
  std::string join() {
    paragraph_break();
    std::string out;
    for (size_t i = 0; i < paragraphs_.size(); ++i) {
      if (i) out += '\n';
      out += paragraphs_[i];
    }
    return out;
  }

 private:
  std::vector<std::string> paragraphs_;
  std::string current_;
  bool pending_space_ = false;
};

void emit(const Node& n, const std::vector<Selector>& drop, ParagraphWriter& w) {
  if (n.tag.empty()) {
    w.text(n.text);
    return;
  }
  if (n.tag == "head" || n.tag == "title" || n.tag == "noscript") return;
  if (matches_any(n, drop)) return;
  const bool block = is_block_tag(n.tag);
  if (block) w.paragraph_break();
  for (const auto& c : n.children) emit(*c, drop, w);
  if (block) w.paragraph_break();
}

std::string to_utf8(std::string body) {
  return utf8::is_valid(body) ? body : utf8::from_latin1(body);
}

}  // namespace

SelectorConfig SelectorConfig::parse(std::string_view text, const std::string& origin) {
  SelectorConfig c;
  int line_no = 0;
  for (const auto& raw : split_lines(text)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfig, origin + ":" + std::to_string(line_no) + ": expected key = selector");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key == "content") c.content.push_back(value);
    else if (key == "drop") c.drop.push_back(value);
    else if (key == "next") c.next.push_back(value);
    else throw Error(ErrorCode::kConfig, origin + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  return c;
}

SelectorConfig SelectorConfig::load(const fs::path& path) { return parse(read_file(path), path.string()); }

SelectorConfig SelectorConfig::builtin() {
  return parse(R"(content = div#gutenb
content = div.chapter
drop = nav
drop = header
drop = footer
drop = div.navi
drop = div#navi
drop = div.dropdown
drop = div.license
drop = div#pg-header
drop = div#pg-footer
drop = section.pg-boilerplate
next = a[rel=next]
next = a.next
)", "builtin selectors");
}

std::string html_to_text(std::string_view html, const SelectorConfig& selectors) {
  const auto root = parse_html(html);
  std::vector<const Node*> roots;
  collect_matches(*root, compile(selectors.content), roots);
  if (roots.empty()) roots.push_back(root.get());
  std::vector<std::string> dropped = selectors.drop;
  dropped.insert(dropped.end(), selectors.next.begin(), selectors.next.end());  // "weiter" links
  const auto drop = compile(dropped);
  ParagraphWriter w;
  for (const Node* r : roots) emit(*r, drop, w);
  return w.join();
}

std::string find_next_link(std::string_view html, const SelectorConfig& selectors) {
  const auto root = parse_html(html);
  std::vector<const Node*> found;
  collect_matches(*root, compile(selectors.next), found);
  for (const Node* n : found) {
    const auto it = n->attrs.find("href");
    if (it != n->attrs.end() && !it->second.empty()) return decode_entities(it->second);
  }
  return {};
}

std::string fetch_text(HttpClient& http, const BookRecord& record, const SelectorConfig& selectors,
                       int max_pages) {
  if (record.text_url.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "book " + record.book_id + " has no text URL");
  }
  std::string url = record.text_url;
  std::set<std::string> visited;
  std::string joined;
  for (int page = 0; page < max_pages && !url.empty() && visited.insert(url).second; ++page) {
    const HttpResponse res = http.get(url);
    if (res.status != 200) {
      throw Error(ErrorCode::kNetwork, "text unreachable (HTTP " + std::to_string(res.status) + "): " + url);
    }
    const std::string body = to_utf8(res.body);
    std::string text;
    std::string next;
    if (url_extension(url) == ".txt" || res.content_type.rfind("text/plain", 0) == 0) {
      for (const auto& line : split_lines(body)) {
        if (!text.empty()) text += '\n';
        text += std::string(trim(line));
      }
    } else {
      text = html_to_text(body, selectors);
      next = find_next_link(body, selectors);
    }
    if (!text.empty()) {
      if (!joined.empty()) joined += '\n';
      joined += text;
    }
    url = next.empty() ? std::string() : resolve_url(url, next);
  }
  if (trim(joined).empty()) {
    throw Error(ErrorCode::kFormat, "empty extraction result: " + record.text_url);
  }
  return joined;
}

}  // namespace cforge
