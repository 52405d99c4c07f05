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

#include "corpus_forge/textnorm.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

#include "corpus_forge/error.hpp"
#include "corpus_forge/files.hpp"
#include "corpus_forge/utf8.hpp"
#include "embedded_rules.hpp"

namespace cforge {

using U = std::u32string;
using Counts = std::map<RuleCategory, std::size_t>;

namespace {

constexpr std::array<std::string_view, 20> kOnes = {
    "null",    "eins",     "zwei",     "drei",      "vier",
    "fünf",    "sechs",    "sieben",   "acht",      "neun",
    "zehn",    "elf",      "zwölf",    "dreizehn",  "vierzehn",
    "fünfzehn", "sechzehn", "siebzehn", "achtzehn", "neunzehn"};

constexpr std::array<std::string_view, 10> kTens = {
    "", "zehn", "zwanzig", "dreißig", "vierzig",
    "fünfzig", "sechzig", "siebzig", "achtzig", "neunzig"};

constexpr std::array<std::pair<std::string_view, RuleCategory>, 15> kCategoryNames = {{
    {"roman", RuleCategory::kRoman},
    {"ordinal", RuleCategory::kOrdinal},
    {"cardinal", RuleCategory::kCardinal},
    {"decimal", RuleCategory::kDecimal},
    {"fraction", RuleCategory::kFraction},
    {"year", RuleCategory::kYear},
    {"year_range", RuleCategory::kYearRange},
    {"currency", RuleCategory::kCurrency},
    {"abbreviation", RuleCategory::kAbbreviation},
    {"name", RuleCategory::kName},
    {"censorship", RuleCategory::kCensorship},
    {"symbol", RuleCategory::kSymbol},
    {"emphasis", RuleCategory::kEmphasis},
    {"footnote", RuleCategory::kFootnote},
    {"comment", RuleCategory::kComment},
}};

// `final` selects "eins" over the compounding "ein".
std::string below_hundred(long n, bool final) {
  if (n == 1) return final ? "eins" : "ein";
  if (n < 20) return std::string(kOnes[static_cast<size_t>(n)]);
  const long unit = n % 10;
  const long ten = n / 10;
  if (unit == 0) return std::string(kTens[static_cast<size_t>(ten)]);
  const std::string u = unit == 1 ? "ein" : std::string(kOnes[static_cast<size_t>(unit)]);
  return u + "und" + std::string(kTens[static_cast<size_t>(ten)]);
}

std::string below_thousand(long n, bool final) {
  std::string out;
  const long hundreds = n / 100;
  const long rest = n % 100;
  if (hundreds > 0) {
    out += hundreds == 1 ? "ein" : std::string(kOnes[static_cast<size_t>(hundreds)]);
    out += "hundert";
  }
  if (rest > 0) out += below_hundred(rest, final);
  return out;
}

std::string small_ordinal_stem(int n) {
  switch (n) {
    case 1: return "erst";
    case 2: return "zweit";
    case 3: return "dritt";
    case 7: return "siebt";
    case 8: return "acht";
    default: return std::string(kOnes[static_cast<size_t>(n)]) + "t";
  }
}

std::string ordinal_stem(int n) {
  if (n < 20) return small_ordinal_stem(n);
  const int rest = n % 100;
  if (rest >= 1 && rest <= 19) return cardinal_to_words(n - rest) + small_ordinal_stem(rest);
  return cardinal_to_words(n) + "st";
}

bool in_year_range(int y) { return y >= 1100 && y <= 2099; }

}  // namespace

const char* to_string(RuleCategory category) {
  for (const auto& [name, c] : kCategoryNames) {
    if (c == category) return name.data();
  }
  return "unknown";
}

std::optional<RuleCategory> parse_category(std::string_view name) {
  for (const auto& [n, c] : kCategoryNames) {
    if (n == name) return c;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Number words

std::string cardinal_to_words(long n) {
  if (n < 0 || n > 999999) {
    throw Error(ErrorCode::kInvalidArgument,
                "cardinal out of range 0..999999: " + std::to_string(n));
  }
  if (n == 0) return "null";
  std::string out;
  const long thousands = n / 1000;
  const long rest = n % 1000;
  if (thousands > 0) out += below_thousand(thousands, false) + "tausend";
  if (rest > 0) out += below_thousand(rest, true);
  return out;
}

std::string ordinal_to_words(int n, OrdinalForm form) {
  if (n < 1 || n > 9999) {
    throw Error(ErrorCode::kInvalidArgument,
                "ordinal out of range 1..9999: " + std::to_string(n));
  }
  const std::string stem = ordinal_stem(n);
  switch (form) {
    case OrdinalForm::kNominativeM: return "der " + stem + "e";
    case OrdinalForm::kGenericTe: return stem + "e";
    case OrdinalForm::kDative:
    case OrdinalForm::kGenericTen: return stem + "en";
  }
  return stem + "en";
}

std::string year_to_words(int year) {
  if (!in_year_range(year)) {
    throw Error(ErrorCode::kInvalidArgument,
                "year out of range 1100..2099: " + std::to_string(year));
  }
  if (year >= 2000) return cardinal_to_words(year);
  const int rest = year % 100;
  std::string out = std::string(kOnes[static_cast<size_t>(year / 100)]) + "hundert";
  if (rest > 0) out += below_hundred(rest, true);
  return out;
}

std::string year_range_to_words(int first_year, int suffix) {
  if (!in_year_range(first_year)) {
    throw Error(ErrorCode::kInvalidArgument,
                "year out of range 1100..2099: " + std::to_string(first_year));
  }
  const int next = first_year + 1;
  if (suffix < 0 || suffix > 99 || suffix != next % 100) {
    throw Error(ErrorCode::kInvalidArgument,
                "year range suffix " + std::to_string(suffix) +
                    " does not follow " + std::to_string(first_year));
  }
  if (next / 100 != first_year / 100) {
    throw Error(ErrorCode::kInvalidArgument,
                "year range crosses a century: " + std::to_string(first_year));
  }
  return year_to_words(first_year) + " bis " + below_hundred(suffix, true);
}

std::string decimal_to_words(long int_part, std::string_view frac_digits) {
  if (frac_digits.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "decimal needs fraction digits");
  }
  std::string out = cardinal_to_words(int_part) + " komma";
  for (char d : frac_digits) {
    if (d < '0' || d > '9') {
      throw Error(ErrorCode::kInvalidArgument, "non-digit in decimal fraction");
    }
    out += ' ';
    out += kOnes[static_cast<size_t>(d - '0')];
  }
  return out;
}

int roman_to_int(std::string_view numeral) {
  static constexpr std::array<std::pair<std::string_view, int>, 13> kTable = {{
      {"M", 1000}, {"CM", 900}, {"D", 500}, {"CD", 400}, {"C", 100},
      {"XC", 90},  {"L", 50},   {"XL", 40}, {"X", 10},   {"IX", 9},
      {"V", 5},    {"IV", 4},   {"I", 1}}};
  auto value_of = [](char c) {
    switch (c) {
      case 'I': return 1;
      case 'V': return 5;
      case 'X': return 10;
      case 'L': return 50;
      case 'C': return 100;
      case 'D': return 500;
      case 'M': return 1000;
      default: return 0;
    }
  };
  const auto malformed = [&] {
    return Error(ErrorCode::kInvalidArgument,
                 "malformed roman numeral '" + std::string(numeral) + "'");
  };
  if (numeral.empty() || numeral.size() > 15) throw malformed();
  int total = 0;
  for (size_t i = 0; i < numeral.size(); ++i) {
    const int v = value_of(numeral[i]);
    if (v == 0) throw malformed();
    const int next = i + 1 < numeral.size() ? value_of(numeral[i + 1]) : 0;
    total += v < next ? -v : v;
  }
  if (total < 1 || total > 3999) throw malformed();
  // Strict grammar: only the canonical spelling of a value is accepted.
  std::string canonical;
  int rest = total;
  for (const auto& [sym, val] : kTable) {
    while (rest >= val) {
      canonical += sym;
      rest -= val;
    }
  }
  if (canonical != numeral) throw malformed();
  return total;
}

// ---------------------------------------------------------------------------
// Rule tables

std::vector<NormalizationRule> parse_rule_lines(std::string_view text,
                                                const std::string& origin) {
  std::vector<NormalizationRule> rules;
  int line_no = 0;
  for (const auto& line : split_lines(text)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line[0] == '@') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3 || fields[0].empty()) {
      throw Error(ErrorCode::kConfig, origin + ":" + std::to_string(line_no) +
                                          ": expected <literal>\\t<replacement>\\t<category>");
    }
    const auto category = parse_category(trim(fields[2]));
    if (!category) {
      throw Error(ErrorCode::kConfig, origin + ":" + std::to_string(line_no) +
                                          ": unknown category '" + fields[2] + "'");
    }
    rules.push_back({fields[0], fields[1], *category});
  }
  return rules;
}

const RuleTables& RuleTables::builtin() {
  static const RuleTables tables = [] {
    RuleTables t;
    t.abbreviations = parse_rule_lines(embedded::kAbbreviations, "abbreviations.tsv");
    t.currencies = parse_rule_lines(embedded::kCurrency, "currency.tsv");
    t.symbols = parse_rule_lines(embedded::kSymbols, "symbols.tsv");
    return t;
  }();
  return tables;
}

RuleTables RuleTables::load(const std::filesystem::path& dir) {
  RuleTables t = builtin();
  auto load_one = [&](const char* name, std::vector<NormalizationRule>& into) {
    const auto path = dir / name;
    if (std::filesystem::exists(path)) into = parse_rule_lines(read_file(path), path.string());
  };
  load_one("abbreviations.tsv", t.abbreviations);
  load_one("currency.tsv", t.currencies);
  load_one("symbols.tsv", t.symbols);
  return t;
}

std::string currency_to_words(long amount_int, int amount_frac,
                              std::string_view unit, const RuleTables& tables) {
  if (amount_frac < 0 || amount_frac > 99) {
    throw Error(ErrorCode::kInvalidArgument, "currency fraction out of range 0..99");
  }
  const NormalizationRule* found = nullptr;
  for (const auto& r : tables.currencies) {
    if (r.pattern == unit || r.replacement == unit) {
      found = &r;
      break;
    }
  }
  if (found == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "unknown currency '" + std::string(unit) + "'");
  }
  std::string out = cardinal_to_words(amount_int) + " " + found->replacement;
  if (amount_frac > 0) out += " " + cardinal_to_words(amount_frac);
  return out;
}

BookOverrides BookOverrides::parse(std::string_view text, const std::string& origin) {
  BookOverrides o;
  o.rules = parse_rule_lines(text, origin);
  for (const auto& line : split_lines(text)) {
    if (line.empty() || line[0] != '@') continue;
    const auto fields = split(line, '\t');
    const std::string key(trim(fields[0]));
    const std::string value = fields.size() > 1 ? std::string(trim(fields[1])) : "";
    if (key == "@footnotes") {
      if (value == "omit") o.footnotes = FootnoteMode::kOmit;
      else if (value == "end_of_page") o.footnotes = FootnoteMode::kEndOfPage;
      else if (value == "inline") o.footnotes = FootnoteMode::kInline;
      else throw Error(ErrorCode::kConfig, origin + ": unknown footnote mode '" + value + "'");
      o.footnote_marker = fields.size() > 2 && trim(fields[2]) == "marker";
    } else if (key == "@comments") {
      if (value == "keep") o.comments = CommentMode::kKeep;
      else if (value == "omit") o.comments = CommentMode::kOmit;
      else if (value == "marked") o.comments = CommentMode::kMarked;
      else throw Error(ErrorCode::kConfig, origin + ": unknown comment mode '" + value + "'");
    } else {
      throw Error(ErrorCode::kConfig, origin + ": unknown directive '" + key + "'");
    }
  }
  return o;
}

BookOverrides BookOverrides::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Passes

namespace {

bool is_word_char(char32_t c) { return utf8::is_letter(c) || utf8::is_digit(c); }

U u32(std::string_view s) { return utf8::decode(s); }

size_t digit_run(const U& s, size_t i) {
  size_t j = i;
  while (j < s.size() && utf8::is_digit(s[j])) ++j;
  return j - i;
}

long digits_value(const U& s, size_t b, size_t e) {
  long v = 0;
  for (size_t k = b; k < e; ++k) {
    v = v * 10 + static_cast<long>(s[k] - U'0');
    if (v > 999999999L) return -1;
  }
  return v;
}

bool is_group_separator(char32_t c) {
  return c == U'.' || c == U' ' || c == 0xA0 || c == 0x202F || c == 0x2009;
}

// Integer starting at i, optionally with thousands groups ("50 000",
// "50.000"). Returns the end offset and value; value -1 when too large.
struct IntToken {
  size_t end = 0;
  long value = 0;
};

IntToken parse_grouped_int(const U& s, size_t i) {
  const size_t head = digit_run(s, i);
  size_t end = i + head;
  U digits = s.substr(i, head);
  if (head <= 3) {
    while (end + 4 <= s.size() && is_group_separator(s[end]) &&
           digit_run(s, end + 1) == 3) {
      digits += s.substr(end + 1, 3);
      end += 4;
    }
  }
  return {end, digits_value(digits, 0, digits.size())};
}

// Digit at i does not continue a preceding number.
bool number_starts_here(const U& s, size_t i) {
  if (i == 0) return true;
  const char32_t p = s[i - 1];
  if (utf8::is_digit(p)) return false;
  if ((p == U',' || p == U'.' || p == U'/') && i >= 2 && utf8::is_digit(s[i - 2])) return false;
  return true;
}

bool at_sentence_start(const U& out) {
  size_t k = out.size();
  while (k > 0 && utf8::is_space(out[k - 1])) --k;
  if (k == 0) return true;
  const char32_t c = out[k - 1];
  return c == U'.' || c == U'?' || c == U'!';
}

void emit_generated(U& out, std::string_view words) {
  U w = u32(words);
  if (!w.empty() && at_sentence_start(out)) w[0] = utf8::to_upper(w[0]);
  out += w;
}

std::string previous_word_lower(const U& out) {
  size_t k = out.size();
  while (k > 0 && utf8::is_space(out[k - 1])) --k;
  size_t e = k;
  while (k > 0 && utf8::is_letter(out[k - 1])) --k;
  U w = out.substr(k, e - k);
  for (auto& c : w) c = utf8::to_lower(c);
  return utf8::encode(w);
}

bool next_word_capitalized(const U& s, size_t i) {
  while (i < s.size() && utf8::is_space(s[i])) ++i;
  return i < s.size() && utf8::is_upper(s[i]);
}

// Ordinal ending chosen by a preceding article; nullopt when there is none.
std::optional<OrdinalForm> article_form(const std::string& article) {
  static const std::array<std::string_view, 3> kTe = {"der", "die", "das"};
  static const std::array<std::string_view, 9> kTen = {
      "den", "dem", "des", "am", "im", "vom", "zum", "zur", "beim"};
  for (auto a : kTe) if (a == article) return OrdinalForm::kGenericTe;
  for (auto a : kTen) if (a == article) return OrdinalForm::kGenericTen;
  return std::nullopt;
}

class LiteralMatcher {
 public:
  explicit LiteralMatcher(const std::vector<NormalizationRule>& rules) {
    for (const auto& r : rules) {
      Entry e{u32(r.pattern), u32(r.replacement), r.category};
      if (e.literal.empty()) continue;
      by_first_[e.literal[0]].push_back(std::move(e));
    }
    for (auto& [c, list] : by_first_) {
      std::stable_sort(list.begin(), list.end(), [](const Entry& a, const Entry& b) {
        return a.literal.size() > b.literal.size();
      });
    }
  }

  U apply(const U& s, Counts& counts, bool pad = false) const {
    if (by_first_.empty()) return s;
    U out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
      const Entry* hit = match_at(s, i);
      if (hit == nullptr) {
        out.push_back(s[i++]);
        continue;
      }
      ++counts[hit->category];
      if (pad) {
        out.push_back(U' ');
        const bool generated = hit->category == RuleCategory::kSymbol;
        if (generated) {
          emit_generated(out, utf8::encode(hit->replacement));
        } else {
          out += hit->replacement;
        }
        out.push_back(U' ');
      } else {
        out += hit->replacement;
        if (ends_line_sentence(s, i, i + hit->literal.size(), *hit)) out.push_back(U'.');
      }
      i += hit->literal.size();
    }
    return out;
  }

 private:
  struct Entry {
    U literal;
    U replacement;
    RuleCategory category;
  };

  // A dotted abbreviation that closes a line of running text also closes
  // its sentence.
  static bool ends_line_sentence(const U& s, size_t begin, size_t end, const Entry& e) {
    if (e.literal.back() != U'.' || (!e.replacement.empty() && e.replacement.back() == U'.')) return false;
    size_t j = end;
    while (j < s.size() && s[j] != U'\n' && utf8::is_space(s[j])) ++j;
    if (j < s.size() && s[j] != U'\n') return false;
    size_t k = begin;
    while (k > 0 && s[k - 1] != U'\n') {
      if (utf8::is_letter(s[k - 1])) return true;
      --k;
    }
    return false;
  }

  const Entry* match_at(const U& s, size_t i) const {
    const auto it = by_first_.find(s[i]);
    if (it == by_first_.end()) return nullptr;
    const bool starts_word = is_word_char(s[i]);
    if (starts_word && i > 0 && is_word_char(s[i - 1])) return nullptr;
    for (const auto& e : it->second) {
      if (s.compare(i, e.literal.size(), e.literal) != 0) continue;
      const size_t end = i + e.literal.size();
      if (is_word_char(e.literal.back()) && end < s.size() && is_word_char(s[end])) continue;
      return &e;
    }
    return nullptr;
  }

  std::unordered_map<char32_t, std::vector<Entry>> by_first_;
};

U footnotes_and_comments(const U& s, const BookOverrides& o, Counts& counts) {
  // Footnote bodies are lines starting with "[n]"; references are "[n]"
  // anywhere else.
  std::map<long, U> bodies;
  U text;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t nl = s.find(U'\n', pos);
    if (nl == U::npos) nl = s.size();
    U line = s.substr(pos, nl - pos);
    size_t k = 0;
    while (k < line.size() && utf8::is_space(line[k])) ++k;
    bool is_body = false;
    if (k < line.size() && line[k] == U'[') {
      const size_t d = digit_run(line, k + 1);
      if (d > 0 && k + 1 + d < line.size() && line[k + 1 + d] == U']') {
        const long n = digits_value(line, k + 1, k + 1 + d);
        U rest = line.substr(k + 2 + d);
        is_body = true;
        ++counts[RuleCategory::kFootnote];
        switch (o.footnotes) {
          case FootnoteMode::kOmit: break;
          case FootnoteMode::kInline: bodies[n] = rest; break;
          case FootnoteMode::kEndOfPage: {
            U spoken = o.footnote_marker ? u32("Fussnote ") : U();
            spoken += line.substr(k + 1, d) + U(1, U' ') + rest;
            text += spoken;
            if (nl < s.size()) text.push_back(U'\n');
            break;
          }
        }
      }
    }
    if (!is_body) {
      text += line;
      if (nl < s.size()) text.push_back(U'\n');
    }
    pos = nl + 1;
  }

  U out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    const char32_t c = text[i];
    if (c == U'[') {
      const size_t d = digit_run(text, i + 1);
      if (d > 0 && i + 1 + d < text.size() && text[i + 1 + d] == U']') {
        const long n = digits_value(text, i + 1, i + 1 + d);
        if (o.footnotes == FootnoteMode::kEndOfPage) {
          out.push_back(U' ');
          out += text.substr(i + 1, d);
          out.push_back(U' ');
        } else if (o.footnotes == FootnoteMode::kInline) {
          const auto it = bodies.find(n);
          if (it != bodies.end()) {
            out.push_back(U' ');
            if (o.footnote_marker) out += u32("Fussnote ");
            out += it->second;
            out.push_back(U' ');
          }
        }
        i += d + 1;
        continue;
      }
    }
    if (c == U'(') {
      int depth = 0;
      size_t j = i;
      for (; j < text.size(); ++j) {
        if (text[j] == U'(') ++depth;
        if (text[j] == U')' && --depth == 0) break;
      }
      if (j < text.size()) {
        ++counts[RuleCategory::kComment];
        const U inner = text.substr(i + 1, j - i - 1);
        switch (o.comments) {
          case CommentMode::kKeep:
            out.push_back(U' ');
            out += inner;
            out.push_back(U' ');
            break;
          case CommentMode::kOmit:
            out.push_back(U' ');
            break;
          case CommentMode::kMarked:
            out += u32(" Kommentar Anfang ");
            out += inner;
            out += u32(" Kommentar Ende ");
            break;
        }
        i = j;
        continue;
      }
    }
    out.push_back(c);
  }
  return out;
}

bool is_roman_letter(char32_t c) {
  return c == U'I' || c == U'V' || c == U'X' || c == U'L' || c == U'C' ||
         c == U'D' || c == U'M';
}

// Two-letter tokens that read as words or common abbreviations.
bool roman_stopword(const std::string& token) {
  static const std::array<std::string_view, 9> kStop = {
      "CD", "DC", "MC", "LI", "MD", "DI", "MI", "CI", "CV"};
  return std::find(kStop.begin(), kStop.end(), token) != kStop.end();
}

U pass_roman(const U& s, Counts& counts) {
  U out;
  size_t i = 0;
  while (i < s.size()) {
    if (!is_roman_letter(s[i]) || (i > 0 && is_word_char(s[i - 1]))) {
      out.push_back(s[i++]);
      continue;
    }
    size_t j = i;
    while (j < s.size() && is_roman_letter(s[j])) ++j;
    if (j < s.size() && is_word_char(s[j])) {
      // Part of an ordinary word; copy it whole.
      while (j < s.size() && is_word_char(s[j])) ++j;
      out += s.substr(i, j - i);
      i = j;
      continue;
    }
    const std::string token = utf8::encode(s.substr(i, j - i));
    const bool dotted = j < s.size() && s[j] == U'.';
    bool accept = token.size() >= 2 && !roman_stopword(token);
    if (token.size() == 1 && dotted) {
      // Regnal numbers such as "Friedrich I.".
      size_t k = out.size();
      while (k > 0 && utf8::is_space(out[k - 1])) --k;
      size_t b = k;
      while (b > 0 && utf8::is_letter(out[b - 1])) --b;
      accept = b < k && utf8::is_upper(out[b]) && k - b > 1;
    }
    int value = 0;
    if (accept) {
      try {
        value = roman_to_int(token);
      } catch (const Error&) {
        accept = false;
      }
    }
    if (!accept) {
      out += s.substr(i, j - i);
      i = j;
      continue;
    }
    ++counts[RuleCategory::kRoman];
    if (dotted && value <= 9999) {
      const auto form = article_form(previous_word_lower(out));
      emit_generated(out, ordinal_to_words(value, form.value_or(OrdinalForm::kNominativeM)));
      i = j + 1;
    } else {
      emit_generated(out, cardinal_to_words(value));
      i = j;
    }
  }
  return out;
}

struct CurrencyMatch {
  size_t end = 0;
  std::string unit;
};

std::optional<CurrencyMatch> match_currency(const U& s, size_t i,
                                            const std::vector<NormalizationRule>& table) {
  std::optional<CurrencyMatch> best;
  size_t best_len = 0;
  for (const auto& r : table) {
    const U lit = u32(r.pattern);
    if (lit.size() <= best_len || s.compare(i, lit.size(), lit) != 0) continue;
    const size_t end = i + lit.size();
    if (is_word_char(lit.back()) && end < s.size() && is_word_char(s[end])) continue;
    best = CurrencyMatch{end, r.replacement};
    best_len = lit.size();
  }
  return best;
}

// Amount at i: grouped integer with an optional ",dd" / ",-" fraction.
struct Amount {
  size_t end = 0;
  long int_part = 0;
  int frac = 0;
};

std::optional<Amount> parse_amount(const U& s, size_t i) {
  const IntToken whole = parse_grouped_int(s, i);
  if (whole.value < 0 || whole.value > 999999) return std::nullopt;
  Amount a{whole.end, whole.value, 0};
  if (a.end + 1 < s.size() && s[a.end] == U',') {
    const size_t d = digit_run(s, a.end + 1);
    if (d == 1 || d == 2) {
      a.frac = static_cast<int>(digits_value(s, a.end + 1, a.end + 1 + d));
      if (d == 1) a.frac *= 10;
      a.end += 1 + d;
    } else if (d == 0 && (s[a.end + 1] == U'-' || s[a.end + 1] == 0x2014 ||
                          s[a.end + 1] == 0x2013)) {
      a.end += 2;
    } else if (d > 2) {
      return std::nullopt;
    }
  }
  return a;
}

U pass_currency(const U& s, const RuleTables& tables, Counts& counts) {
  U out;
  size_t i = 0;
  while (i < s.size()) {
    if (utf8::is_digit(s[i]) && number_starts_here(s, i) &&
        !(i > 0 && utf8::is_letter(s[i - 1]))) {
      if (auto amount = parse_amount(s, i)) {
        size_t k = amount->end;
        if (k < s.size() && utf8::is_space(s[k])) ++k;
        if (k < s.size()) {
          if (auto cur = match_currency(s, k, tables.currencies)) {
            ++counts[RuleCategory::kCurrency];
            emit_generated(out, currency_to_words(amount->int_part, amount->frac,
                                                  cur->unit, tables));
            i = cur->end;
            continue;
          }
        }
      }
    }
    // Symbol-first forms such as "€ 5" or "$5".
    if (!is_word_char(s[i]) && !utf8::is_space(s[i])) {
      if (auto cur = match_currency(s, i, tables.currencies)) {
        size_t k = cur->end;
        if (k < s.size() && utf8::is_space(s[k])) ++k;
        if (k < s.size() && utf8::is_digit(s[k])) {
          if (auto amount = parse_amount(s, k)) {
            ++counts[RuleCategory::kCurrency];
            emit_generated(out, currency_to_words(amount->int_part, amount->frac,
                                                  cur->unit, tables));
            i = amount->end;
            continue;
          }
        }
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

bool is_range_dash(char32_t c) { return c == U'/' || c == U'-' || c == 0x2013; }

U pass_year_ranges(const U& s, Counts& counts) {
  U out;
  size_t i = 0;
  while (i < s.size()) {
    if (utf8::is_digit(s[i]) && number_starts_here(s, i) && digit_run(s, i) == 4) {
      const size_t dash = i + 4;
      if (dash + 2 < s.size() + 0 && dash < s.size() && is_range_dash(s[dash]) &&
          digit_run(s, dash + 1) == 2) {
        const int first = static_cast<int>(digits_value(s, i, i + 4));
        const int suffix = static_cast<int>(digits_value(s, dash + 1, dash + 3));
        try {
          const std::string words = year_range_to_words(first, suffix);
          ++counts[RuleCategory::kYearRange];
          emit_generated(out, words);
          i = dash + 3;
          continue;
        } catch (const Error& e) {
          const size_t b = i >= 20 ? i - 20 : 0;
          const size_t end = std::min(s.size(), dash + 23);
          throw Error(ErrorCode::kNormalization, std::string(e.what()) + " in \"" +
                                                     utf8::encode(s.substr(b, end - b)) +
                                                     "\"; add an override entry for it");
        }
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

U pass_years(const U& s, Counts& counts) {
  U out;
  size_t i = 0;
  while (i < s.size()) {
    if (utf8::is_digit(s[i]) && number_starts_here(s, i) && digit_run(s, i) == 4) {
      const size_t end = i + 4;
      const bool continues =
          end + 1 < s.size() && (s[end] == U',' || s[end] == U'.') && utf8::is_digit(s[end + 1]);
      const int y = static_cast<int>(digits_value(s, i, end));
      if (!continues && in_year_range(y)) {
        ++counts[RuleCategory::kYear];
        emit_generated(out, year_to_words(y));
        i = end;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

U pass_ordinals(const U& s, Counts& counts) {
  U out;
  size_t i = 0;
  while (i < s.size()) {
    if (utf8::is_digit(s[i]) && number_starts_here(s, i)) {
      const size_t d = digit_run(s, i);
      const size_t dot = i + d;
      const bool ordinal_shape = d <= 4 && dot < s.size() && s[dot] == U'.' &&
                                 !(dot + 1 < s.size() && utf8::is_digit(s[dot + 1]));
      const long n = digits_value(s, i, dot);
      if (ordinal_shape && n >= 1) {
        auto form = OrdinalForm::kDative;
        if (next_word_capitalized(s, dot + 1)) {
          if (auto f = article_form(previous_word_lower(out))) form = *f;
        }
        ++counts[RuleCategory::kOrdinal];
        emit_generated(out, ordinal_to_words(static_cast<int>(n), form));
        i = dot + 1;
        continue;
      }
      out += s.substr(i, d);
      i += d;
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

U pass_decimals(const U& s, Counts& counts) {
  U out;
  size_t i = 0;
  while (i < s.size()) {
    if (utf8::is_digit(s[i]) && number_starts_here(s, i)) {
      const IntToken whole = parse_grouped_int(s, i);
      if (whole.value >= 0 && whole.value <= 999999 && whole.end + 1 < s.size() &&
          s[whole.end] == U',' && utf8::is_digit(s[whole.end + 1])) {
        const size_t d = digit_run(s, whole.end + 1);
        const std::string frac = utf8::encode(s.substr(whole.end + 1, d));
        ++counts[RuleCategory::kDecimal];
        emit_generated(out, decimal_to_words(whole.value, frac));
        i = whole.end + 1 + d;
        continue;
      }
      const size_t d = digit_run(s, i);
      out += s.substr(i, d);
      i += d;
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

std::optional<std::string> vulgar_fraction(char32_t c) {
  switch (c) {
    case 0xBD: return "einhalb";
    case 0xBC: return "einviertel";
    case 0xBE: return "dreiviertel";
    case 0x2153: return "eindrittel";
    case 0x2154: return "zweidrittel";
    case 0x2155: return "einfünftel";
    case 0x2159: return "einsechstel";
    case 0x215B: return "einachtel";
    case 0x215C: return "dreiachtel";
    case 0x215D: return "fünfachtel";
    case 0x215E: return "siebenachtel";
    default: return std::nullopt;
  }
}

std::string denominator_word(long denominator, long numerator) {
  if (denominator == 2) return numerator == 1 ? "halb" : "halbe";
  if (denominator < 20) return small_ordinal_stem(static_cast<int>(denominator)) + "el";
  return cardinal_to_words(denominator) + "stel";
}

U pass_fractions(const U& s, Counts& counts) {
  U out;
  size_t i = 0;
  while (i < s.size()) {
    if (auto word = vulgar_fraction(s[i])) {
      ++counts[RuleCategory::kFraction];
      out.push_back(U' ');
      emit_generated(out, *word);
      ++i;
      continue;
    }
    if (utf8::is_digit(s[i]) && number_starts_here(s, i)) {
      const size_t d = digit_run(s, i);
      const size_t slash = i + d;
      if (d <= 2 && slash < s.size() && s[slash] == U'/') {
        const size_t dd = digit_run(s, slash + 1);
        const long num = digits_value(s, i, slash);
        const long den = digits_value(s, slash + 1, slash + 1 + dd);
        if (dd >= 1 && dd <= 3 && num >= 1 && den >= 2 && den <= 999) {
          ++counts[RuleCategory::kFraction];
          const std::string head = num == 1 ? "ein" : cardinal_to_words(num);
          emit_generated(out, head + " " + denominator_word(den, num));
          i = slash + 1 + dd;
          continue;
        }
      }
      out += s.substr(i, d);
      i += d;
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

U pass_cardinals(const U& s, Counts& counts) {
  U out;
  size_t i = 0;
  while (i < s.size()) {
    if (utf8::is_digit(s[i]) && number_starts_here(s, i)) {
      const IntToken whole = parse_grouped_int(s, i);
      if (whole.value >= 0 && whole.value <= 999999) {
        ++counts[RuleCategory::kCardinal];
        if (!out.empty() && utf8::is_letter(out.back())) out.push_back(U' ');
        emit_generated(out, cardinal_to_words(whole.value));
        if (whole.end < s.size() && utf8::is_letter(s[whole.end])) out.push_back(U' ');
        i = whole.end;
        continue;
      }
      const size_t d = digit_run(s, i);
      out += s.substr(i, d);
      i += d;
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

bool is_allowed_punct(char32_t c) {
  return c == U'.' || c == U'?' || c == U'!' || c == U',' || c == U':';
}

int punct_strength(char32_t c) {
  switch (c) {
    case U'?': return 5;
    case U'!': return 4;
    case U'.': return 3;
    case U':': return 2;
    case U',': return 1;
    default: return 0;
  }
}

bool is_soft_separator(char32_t c) {
  return c == U'-' || c == 0x2010 || c == 0x2011 || c == 0x2012 || c == 0x2013 ||
         c == 0x2014 || c == 0x2015 || c == U'/' || c == U'_' || c == U'|';
}

// Restricts punctuation to . ? ! , : and collapses whitespace; runs of
// whitespace containing a line break become one line break.
U restrict_punctuation(const U& s) {
  U out;
  out.reserve(s.size());
  char32_t pending_punct = 0;
  char32_t pending_space = 0;
  for (char32_t c : s) {
    if (c == U';') c = U',';
    if (c == 0x2026) c = U'.';
    if (is_soft_separator(c)) c = U' ';
    if (utf8::is_space(c)) {
      if (c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v') {
        pending_space = U'\n';
      } else if (pending_space == 0) {
        pending_space = U' ';
      }
      continue;
    }
    if (is_allowed_punct(c)) {
      if (punct_strength(c) > punct_strength(pending_punct)) pending_punct = c;
      continue;
    }
    if (!is_word_char(c)) continue;
    if (pending_punct != 0 && !out.empty()) out.push_back(pending_punct);
    pending_punct = 0;
    if (pending_space != 0 && !out.empty()) out.push_back(pending_space);
    pending_space = 0;
    out.push_back(c);
  }
  if (pending_punct != 0 && !out.empty()) out.push_back(pending_punct);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

TextNormalizer::TextNormalizer(BookOverrides overrides, RuleTables tables)
    : overrides_(std::move(overrides)), tables_(std::move(tables)) {}

NormalizedText TextNormalizer::normalize(std::string_view raw) const {
  // Expansions can create new context (a symbol turning into a capitalized
  // word before a dotted numeral), so passes repeat until nothing changes.
  NormalizedText result = normalize_once(raw);
  for (int round = 0; round < 4; ++round) {
    NormalizedText again = normalize_once(result.text);
    if (again.text == result.text) break;
    for (const auto& [category, n] : again.applied_rules) result.applied_rules[category] += n;
    result.text = std::move(again.text);
  }
  return result;
}

NormalizedText TextNormalizer::normalize_once(std::string_view raw) const {
  NormalizedText result;
  Counts& counts = result.applied_rules;
  U s = u32(raw);

  s = LiteralMatcher(overrides_.rules).apply(s, counts);
  s = footnotes_and_comments(s, overrides_, counts);
  s = LiteralMatcher(tables_.abbreviations).apply(s, counts);
  s = pass_roman(s, counts);
  s = pass_currency(s, tables_, counts);
  s = pass_year_ranges(s, counts);
  s = pass_years(s, counts);
  s = pass_ordinals(s, counts);
  s = pass_decimals(s, counts);
  s = pass_fractions(s, counts);
  s = pass_cardinals(s, counts);
  s = LiteralMatcher(tables_.symbols).apply(s, counts, /*pad=*/true);

  for (size_t i = 0; i < s.size(); ++i) {
    if (utf8::is_digit(s[i])) {
      const size_t b = i >= 20 ? i - 20 : 0;
      const size_t e = std::min(s.size(), i + 20);
      throw Error(ErrorCode::kNormalization,
                  "unnormalized digit in \"" + utf8::encode(s.substr(b, e - b)) +
                      "\"; add an override entry for it");
    }
  }
  s = restrict_punctuation(s);
  result.text = utf8::encode(s);
  return result;
}

NormalizedText normalize_text(std::string_view raw, const BookOverrides& overrides) {
  return TextNormalizer(overrides).normalize(raw);
}

bool satisfies_normalized_invariants(std::string_view text) {
  for (char32_t c : u32(text)) {
    if (utf8::is_digit(c)) return false;
    if (utf8::is_letter(c) || utf8::is_space(c) || is_allowed_punct(c)) continue;
    return false;
  }
  return true;
}

}  // namespace cforge
