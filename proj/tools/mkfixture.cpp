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

// Writes the synthetic fixture books (audio, catalog, text, mock ASR
// transcripts) plus a ready-to-run configuration file.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "fixture.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mkfixture: synthetic corpus-forge fixture books"};
  std::string out_dir;
  bool wrong_text = false;
  double cer = 0.02;
  app.add_option("out", out_dir, "output directory")->required();
  app.add_flag("--wrong-text", wrong_text, "publish unrelated text for the first book");
  app.add_option("--cer", cer, "character error rate of the mock transcripts")->check(CLI::Range(0.0, 1.0));
  CLI11_PARSE(app, argc, argv);

  namespace fs = std::filesystem;
  auto books = cforge::testsupport::default_books();
  for (auto& b : books) b.asr_cer = cer;
  books.front().wrong_text = wrong_text;
  const fs::path root = fs::absolute(out_dir);
  const auto info = cforge::testsupport::write_fixture(root, books);

  std::ofstream cfg(root / "corpus-forge.conf");
  cfg << "# generated by mkfixture\n"
      << "workdir = work\n"
      << "fixtures = .\n"
      << "language = de\n";
  for (const auto& b : books) cfg << "book_id = " << b.id << "\n";
  std::cout << "wrote " << info.snippet_ids.size() << " transcripts, " << info.words_spoken
            << " spoken words to " << root.string() << "\n";
  return 0;
}
