/*
 * Copyright 2026 The Ladder Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "http.hpp"

#include <chrono>
#include <cstdlib>
#include <regex>
#include <thread>

#include "httplib.h"
#include "ladder/error.hpp"

namespace ladder::internal {

namespace {

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path;
};

ParsedUrl SplitUrl(const std::string& url) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, kUrl)) {
    throw Error(ErrorCode::kConfigError, "endpoint must be an http(s) URL: '" + url + "'");
  }
  return {m[1].str(), m[2].matched ? m[2].str() : "/"};
}

bool IsTransient(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

std::string PostJsonWithRetry(const HttpSettings& settings, const nlohmann::json& body) {
  const ParsedUrl url = SplitUrl(settings.endpoint);
  httplib::Headers headers;
  for (const auto& [k, v] : settings.extra_headers) headers.emplace(k, v);
  if (!settings.api_key_env.empty()) {
    if (const char* key = std::getenv(settings.api_key_env.c_str()); key && *key) {
      if (settings.auth_header == "Authorization") {
        headers.emplace("Authorization", std::string("Bearer ") + key);
      } else {
        headers.emplace(settings.auth_header, key);
      }
    }
  }

  httplib::Client client(url.scheme_host_port);
  const auto timeout = std::chrono::duration<double>(settings.timeout_seconds);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const std::string payload = body.dump();
  std::string last_error;
  for (int attempt = 0; attempt <= settings.max_retries; ++attempt) {
    if (attempt > 0) {
      const double delay = settings.backoff_initial_seconds * static_cast<double>(1 << (attempt - 1));
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    auto res = client.Post(url.path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw Error(ErrorCode::kAuthError, "endpoint rejected credentials (HTTP " +
                                             std::to_string(res->status) + ")");
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
    if (!IsTransient(res->status)) break;
  }
  throw Error(ErrorCode::kHttpError, settings.endpoint + ": " + last_error);
}

}  // namespace ladder::internal
