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

#include "corpus_forge/text_fold.hpp"

#include "corpus_forge/utf8.hpp"

namespace cforge {

std::optional<char32_t> fold_char(char32_t c) {
  c = utf8::to_lower(c);
  if ((c >= U'a' && c <= U'z') || c == U'ä' || c == U'ö' || c == U'ü' || c == U'ß') return c;
  return std::nullopt;
}

bool is_word_separator(char32_t c) {
  if (utf8::is_space(c)) return true;
  switch (c) {
    case U'-': case 0x2010: case 0x2011: case 0x2012: case 0x2013: case 0x2014:
    case 0x2015: case U'/': case U'_':
      return true;
    default:
      return false;
  }
}

MatchForm MatchForm::project(std::string_view source) {
  MatchForm m;
  size_t pos = 0;
  bool in_token = false;
  bool has_word = false;  // current token produced a letter
  size_t token_begin = 0;

  auto close_token = [&](size_t end) {
    if (in_token && has_word) {
      m.words.back().end = m.match_text.size();
      m.words.back().src_end = end;
    }
    in_token = false;
    has_word = false;
  };

  while (pos < source.size()) {
    const size_t at = pos;
    // Decode one scalar value.
    const unsigned char lead = static_cast<unsigned char>(source[pos]);
    size_t len = lead < 0x80 ? 1 : lead < 0xE0 ? 2 : lead < 0xF0 ? 3 : 4;
    if (pos + len > source.size()) len = source.size() - pos;
    const std::u32string cps = utf8::decode(source.substr(pos, len));
    const char32_t c = cps.empty() ? U'�' : cps[0];
    pos += len;

    if (is_word_separator(c)) {
      close_token(at);
      continue;
    }
    if (!in_token) {
      in_token = true;
      token_begin = at;
    }
    const auto f = fold_char(c);
    if (!f) continue;
    if (!has_word) {
      if (!m.words.empty()) {
        m.match_text.push_back(U' ');
        m.char_map.push_back(token_begin);
      }
      m.words.push_back({m.match_text.size(), 0, token_begin, 0});
      has_word = true;
    }
    m.match_text.push_back(*f);
    m.char_map.push_back(at);
  }
  close_token(source.size());
  m.char_map.push_back(m.words.empty() ? source.size() : m.words.back().src_end);
  return m;
}

std::string fold_words(std::string_view text) {
  return utf8::encode(MatchForm::project(text).match_text);
}

}  // namespace cforge
