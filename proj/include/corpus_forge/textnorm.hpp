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

#ifndef CORPUS_FORGE_TEXTNORM_HPP_
#define CORPUS_FORGE_TEXTNORM_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cforge {

enum class RuleCategory {
  kRoman,
  kOrdinal,
  kCardinal,
  kDecimal,
  kFraction,
  kYear,
  kYearRange,
  kCurrency,
  kAbbreviation,
  kName,
  kCensorship,
  kSymbol,
  kEmphasis,
  kFootnote,
  kComment,
};

const char* to_string(RuleCategory category);
std::optional<RuleCategory> parse_category(std::string_view name);

struct NormalizationRule {
  std::string pattern;  // literal original
  std::string replacement;
  RuleCategory category = RuleCategory::kAbbreviation;
};

struct NormalizedText {
  std::string text;
  std::map<RuleCategory, std::size_t> applied_rules;
};

enum class OrdinalForm { kNominativeM, kDative, kGenericTe, kGenericTen };

// German number words. All converters return lowercase words and throw
// Error(kInvalidArgument) outside their documented ranges.
std::string cardinal_to_words(long n);                   // 0..999999
std::string ordinal_to_words(int n, OrdinalForm form);   // 1..9999
std::string year_to_words(int year);                     // 1100..2099
std::string year_range_to_words(int first_year, int suffix);
std::string decimal_to_words(long int_part, std::string_view frac_digits);
int roman_to_int(std::string_view numeral);              // I..MMMCMXCIX

// Literal rule tables. Each line is `<literal>\t<replacement>\t<category>`;
// blank lines and lines starting with '#' are ignored.
struct RuleTables {
  std::vector<NormalizationRule> abbreviations;
  std::vector<NormalizationRule> currencies;  // token -> unit word
  std::vector<NormalizationRule> symbols;

  // Tables shipped with the library (data/rules).
  static const RuleTables& builtin();
  // Loads abbreviations.tsv, currency.tsv and symbols.tsv from `dir`;
  // missing files fall back to the built-in table.
  static RuleTables load(const std::filesystem::path& dir);
};

std::vector<NormalizationRule> parse_rule_lines(std::string_view text,
                                                const std::string& origin);

// "4,40 Mk." style amounts. `unit` is a currency token or unit word known to
// `tables`; the unit word keeps its noun capitalization.
std::string currency_to_words(long amount_int, int amount_frac,
                              std::string_view unit,
                              const RuleTables& tables = RuleTables::builtin());

enum class FootnoteMode { kOmit, kEndOfPage, kInline };
enum class CommentMode { kKeep, kOmit, kMarked };

// Book-specific configuration: literal overrides plus the footnote and
// comment conventions the reader followed. The override file uses the rule
// line format plus directives:
//   @footnotes <TAB> omit|end_of_page|inline [<TAB> marker]
//   @comments  <TAB> keep|omit|marked
struct BookOverrides {
  std::vector<NormalizationRule> rules;
  FootnoteMode footnotes = FootnoteMode::kOmit;
  bool footnote_marker = false;
  CommentMode comments = CommentMode::kKeep;

  static BookOverrides parse(std::string_view text, const std::string& origin = "overrides");
  static BookOverrides load(const std::filesystem::path& path);
};

class TextNormalizer {
 public:
  explicit TextNormalizer(BookOverrides overrides = {},
                          RuleTables tables = RuleTables::builtin());

  // Throws Error(kNormalization) naming the context when a digit survives
  // every pass.
  // The result is a fixed point: normalizing it again changes nothing.
  NormalizedText normalize(std::string_view raw) const;

 private:
  NormalizedText normalize_once(std::string_view raw) const;

  BookOverrides overrides_;
  RuleTables tables_;
};

NormalizedText normalize_text(std::string_view raw,
                              const BookOverrides& overrides = {});

// True when `text` holds no digits and no punctuation beyond . ? ! , :
bool satisfies_normalized_invariants(std::string_view text);

}  // namespace cforge

#endif  // CORPUS_FORGE_TEXTNORM_HPP_
