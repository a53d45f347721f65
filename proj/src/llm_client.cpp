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

#include "ladder/llm_client.hpp"

#include "http.hpp"
#include "io_util.hpp"
#include "ladder/error.hpp"

namespace ladder {

void ValidateLlmRequest(const LlmRequest& request) {
  if (!(request.temperature >= 0.0 && request.temperature <= 2.0)) {
    throw Error(ErrorCode::kConfigError, "temperature must lie in [0, 2]");
  }
  if (request.max_tokens <= 0) {
    throw Error(ErrorCode::kConfigError, "max_tokens must be positive");
  }
  if (request.provider == "http") {
    if (request.http.endpoint.empty()) {
      throw Error(ErrorCode::kConfigError, "http provider needs an endpoint");
    }
    if (request.http.max_retries < 0) {
      throw Error(ErrorCode::kConfigError, "max_retries must be >= 0");
    }
  } else if (request.provider == "mock") {
    if (request.mock_file.empty()) {
      throw Error(ErrorCode::kConfigError, "mock provider needs a fixture file");
    }
  } else {
    throw Error(ErrorCode::kConfigError, "unknown provider '" + request.provider + "'");
  }
}

HttpLlmClient::HttpLlmClient(LlmRequest request) : request_(std::move(request)) {
  ValidateLlmRequest(request_);
}

nlohmann::json HttpLlmClient::RequestBody(const LlmRequest& request, const std::string& prompt) {
  return {{"model", request.model},
          {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
          {"temperature", request.temperature},
          {"max_tokens", request.max_tokens}};
}

std::string HttpLlmClient::Complete(const std::string& prompt) {
  if (prompt.empty()) throw Error(ErrorCode::kInvalidArgument, "prompt is empty");
  const std::string body = internal::PostJsonWithRetry(request_.http, RequestBody(request_, prompt));
  try {
    const auto parsed = nlohmann::json::parse(body);
    return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseFailure(ErrorCode::kParseError,
                       std::string("chat-completion body lacks choices[0].message.content: ") +
                           e.what(),
                       body);
  }
}

MockLlmClient::MockLlmClient(const std::filesystem::path& fixture_file) {
  if (!std::filesystem::exists(fixture_file)) {
    throw Error(ErrorCode::kMissingFile, "missing mock fixture " + fixture_file.string());
  }
  for (const auto& row : internal::ReadJsonLines(fixture_file)) {
    try {
      responses_[row.at("prompt_sha256").get<std::string>()] = row.at("response").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError,
                  fixture_file.string() + ": bad mock fixture line: " + e.what());
    }
  }
}

MockLlmClient::MockLlmClient(std::map<std::string, std::string> responses_by_hash)
    : responses_(std::move(responses_by_hash)) {}

std::string MockLlmClient::Complete(const std::string& prompt) {
  const std::string hash = PromptHash(prompt);
  auto it = responses_.find(hash);
  if (it == responses_.end()) {
    throw Error(ErrorCode::kMockMiss, "mock fixture has no response for prompt sha256 " + hash);
  }
  return it->second;
}

std::unique_ptr<LlmClient> MakeLlmClient(const LlmRequest& request) {
  ValidateLlmRequest(request);
  if (request.provider == "mock") return std::make_unique<MockLlmClient>(request.mock_file);
  return std::make_unique<HttpLlmClient>(request);
}

std::string PromptHash(const std::string& prompt) { return internal::Sha256Hex(prompt); }

std::string MockFixtureLine(const std::string& prompt, const std::string& response) {
  return nlohmann::json{{"prompt_sha256", PromptHash(prompt)}, {"response", response}}.dump();
}

HypothesisSet GenerateHypotheses(LlmClient& client, const std::string& prompt, int class_label,
                                 const ParseOptions& options) {
  HypothesisSet set = ParseLlmResponse(client.Complete(prompt), options);
  set.class_label = class_label;
  return set;
}

}  // namespace ladder
