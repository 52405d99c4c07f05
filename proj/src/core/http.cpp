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

#include "corpus_forge/http.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "corpus_forge/error.hpp"
#include "corpus_forge/files.hpp"

namespace fs = std::filesystem;

namespace cforge {

namespace {

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/'
};

UrlParts split_url(const std::string& url) {
  const size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kNetwork, "not an absolute URL: " + url);
  }
  const size_t path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string::npos) return {url, "/"};
  return {url.substr(0, path_begin), url.substr(path_begin)};
}

HttpResponse to_response(const httplib::Result& res, const std::string& url) {
  if (!res) {
    throw Error(ErrorCode::kNetwork,
                "request failed (" + httplib::to_string(res.error()) +
                    "): " + url);
  }
  HttpResponse out;
  out.status = res->status;
  out.body = res->body;
  out.content_type = res->get_header_value("Content-Type");
  return out;
}

}  // namespace

HttpResponse NetHttpClient::get(const std::string& url) {
  const UrlParts parts = split_url(url);
  httplib::Client client(parts.origin);
  client.set_follow_location(true);
  client.set_connection_timeout(30);
  client.set_read_timeout(120);
  return to_response(client.Get(parts.path), url);
}

HttpResponse NetHttpClient::post(const std::string& url,
                                 const std::string& body,
                                 const std::string& content_type) {
  const UrlParts parts = split_url(url);
  httplib::Client client(parts.origin);
  client.set_connection_timeout(30);
  client.set_read_timeout(600);
  return to_response(client.Post(parts.path, body, content_type), url);
}

FixtureHttpClient::FixtureHttpClient(fs::path dir) : dir_(std::move(dir)) {
  const fs::path index = dir_ / "index.tsv";
  if (!fs::exists(index)) {
    throw Error(ErrorCode::kConfig, "fixture index missing: " + index.string());
  }
  for (const auto& line : split_lines(read_file(index))) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    index_[line.substr(0, tab)] = line.substr(tab + 1);
  }
}

HttpResponse FixtureHttpClient::get(const std::string& url) {
  ++requests_;
  const auto it = index_.find(url);
  if (it == index_.end()) return {404, "", ""};
  const std::string& target = it->second;
  if (!target.empty() && target[0] == '!') {
    return {std::stoi(target.substr(1)), "", ""};
  }
  const fs::path file = dir_ / target;
  if (!fs::exists(file)) return {404, "", ""};
  HttpResponse res{200, read_file(file), ""};
  const std::string ext = file.extension().string();
  if (ext == ".json") res.content_type = "application/json";
  if (ext == ".html" || ext == ".htm") res.content_type = "text/html";
  return res;
}

HttpResponse FixtureHttpClient::post(const std::string& url,
                                     const std::string& /*body*/,
                                     const std::string& /*content_type*/) {
  return get(url);
}

std::string resolve_url(const std::string& base, const std::string& ref) {
  if (ref.find("://") != std::string::npos) return ref;
  const UrlParts parts = split_url(base);
  if (ref.rfind("//", 0) == 0) {
    return parts.origin.substr(0, parts.origin.find("://") + 1) + ref;
  }
  if (!ref.empty() && ref[0] == '/') return parts.origin + ref;
  std::string dir = parts.path;
  const size_t q = dir.find_first_of("?#");
  if (q != std::string::npos) dir.resize(q);
  dir.resize(dir.rfind('/') + 1);
  std::string joined = dir + ref;
  // Collapse "./" and "../" segments.
  std::vector<std::string> out;
  for (const auto& seg : split(joined, '/')) {
    if (seg == ".") continue;
    if (seg == "..") {
      if (out.size() > 1) out.pop_back();
      continue;
    }
    out.push_back(seg);
  }
  std::string path;
  for (size_t i = 0; i < out.size(); ++i) {
    if (i) path += '/';
    path += out[i];
  }
  if (path.empty() || path[0] != '/') path.insert(path.begin(), '/');
  return parts.origin + path;
}

}  // namespace cforge
