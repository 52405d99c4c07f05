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

#ifndef CORPUS_FORGE_TEXT_FOLD_HPP_
#define CORPUS_FORGE_TEXT_FOLD_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cforge {

// Lowercases a character if the result is in the match alphabet
// a-z, ä ö ü ß; anything else (other letters too) yields nullopt.
std::optional<char32_t> fold_char(char32_t c);

// Whitespace, hyphens and dashes, '/' and '_' separate words.
bool is_word_separator(char32_t c);

// Lowercase, punctuation-free projection of a text. Words are joined by
// single spaces; characters outside the match alphabet are dropped without
// splitting the word they sit in.
struct MatchForm {
  struct Word {
    std::size_t begin = 0;      // offsets into match_text
    std::size_t end = 0;
    std::size_t src_begin = 0;  // byte range of the source token, including
    std::size_t src_end = 0;    // attached punctuation
  };

  std::u32string match_text;
  // Source byte offset of every match_text character; separators map to the
  // start of the following word. One extra entry maps match_text.size().
  std::vector<std::size_t> char_map;
  std::vector<Word> words;

  static MatchForm project(std::string_view source);
};

// The same projection as a plain string ("der hund bellt").
std::string fold_words(std::string_view text);

}  // namespace cforge

#endif  // CORPUS_FORGE_TEXT_FOLD_HPP_
