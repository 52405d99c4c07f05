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

#ifndef CORPUS_FORGE_UTF8_HPP_
#define CORPUS_FORGE_UTF8_HPP_

#include <string>
#include <string_view>

namespace cforge::utf8 {

// Invalid sequences decode to U+FFFD.
std::u32string decode(std::string_view in);
std::string encode(std::u32string_view in);
void append(std::string& out, char32_t cp);

bool is_valid(std::string_view in);

// ISO-8859-1 bytes to UTF-8.
std::string from_latin1(std::string_view in);

// Letter classification good enough for German prose: ASCII, Latin-1
// supplement and Latin Extended-A/B, plus anything above the general
// punctuation and symbol blocks.
bool is_letter(char32_t c);
bool is_digit(char32_t c);
bool is_space(char32_t c);
bool is_upper(char32_t c);

char32_t to_lower(char32_t c);
char32_t to_upper(char32_t c);

std::string to_lower(std::string_view in);

}  // namespace cforge::utf8

#endif  // CORPUS_FORGE_UTF8_HPP_
