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

#ifndef CORPUS_FORGE_HTTP_HPP_
#define CORPUS_FORGE_HTTP_HPP_

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace cforge {

struct HttpResponse {
  int status = 0;
  std::string body;
  std::string content_type;
};

// All network traffic goes through this interface so tests can substitute
// recorded responses.
class HttpClient {
 public:
  virtual ~HttpClient() = default;
  virtual HttpResponse get(const std::string& url) = 0;
  virtual HttpResponse post(const std::string& url, const std::string& body,
                            const std::string& content_type) = 0;
};

// Real network client (http and https).
class NetHttpClient : public HttpClient {
 public:
  HttpResponse get(const std::string& url) override;
  HttpResponse post(const std::string& url, const std::string& body,
                    const std::string& content_type) override;
};

// Serves responses from a fixture directory. `index.tsv` maps each URL to a
// file relative to the directory, one `<url>\t<file>` per line; a file field
// of the form `!<status>` answers with that status and an empty body. Unknown
// URLs answer 404.
class FixtureHttpClient : public HttpClient {
 public:
  explicit FixtureHttpClient(std::filesystem::path dir);

  HttpResponse get(const std::string& url) override;
  HttpResponse post(const std::string& url, const std::string& body,
                    const std::string& content_type) override;

  // Number of requests served so far, hits and misses alike.
  int request_count() const { return requests_.load(); }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> index_;
  std::atomic<int> requests_{0};
};

std::string resolve_url(const std::string& base, const std::string& ref);

}  // namespace cforge

#endif  // CORPUS_FORGE_HTTP_HPP_
