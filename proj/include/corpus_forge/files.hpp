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

#ifndef CORPUS_FORGE_FILES_HPP_
#define CORPUS_FORGE_FILES_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cforge {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

std::vector<std::string> split_lines(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view s);

struct ProcessResult {
  int exit_code = -1;
  std::string out;
};

// Runs argv[0] with the given arguments (no shell) and captures stdout.
ProcessResult run_process(const std::vector<std::string>& argv);

// Searches PATH like execvp would; absolute and relative paths are checked
// directly.
bool executable_available(const std::string& program);

// Splits a command template on whitespace and substitutes {name} tokens.
std::vector<std::string> expand_command(
    std::string_view tmpl,
    const std::vector<std::pair<std::string, std::string>>& vars);

}  // namespace cforge

#endif  // CORPUS_FORGE_FILES_HPP_
