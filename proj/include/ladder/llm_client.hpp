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

#ifndef LADDER_LLM_CLIENT_HPP_
#define LADDER_LLM_CLIENT_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "ladder/hypothesis.hpp"

namespace ladder {

inline constexpr char kDefaultApiKeyEnv[] = "LADDER_LLM_API_KEY";

// Settings shared by the chat-completion and embedding HTTP clients.
struct HttpSettings {
  std::string endpoint;  // full URL, e.g. https://api.example.com/v1/chat/completions
  std::string api_key_env = kDefaultApiKeyEnv;
  // "Authorization" sends "Bearer <key>"; any other header name sends the raw key.
  std::string auth_header = "Authorization";
  std::map<std::string, std::string> extra_headers;
  double timeout_seconds = 120.0;
  int max_retries = 3;
  double backoff_initial_seconds = 1.0;
};

struct LlmRequest {
  std::string provider = "http";  // "http" or "mock"
  HttpSettings http;
  std::string model;
  double temperature = 0.0;
  int max_tokens = 2048;
  std::filesystem::path mock_file;  // JSONL {prompt_sha256, response}
};

void ValidateLlmRequest(const LlmRequest& request);

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  // Returns the assistant message text for a single-user-message chat.
  virtual std::string Complete(const std::string& prompt) = 0;
};

// Chat-completion over HTTP: {model, messages:[{role:user, content}],
// temperature, max_tokens} -> choices[0].message.content. 401/403 raise
// AuthError; 429, 5xx and transport failures are retried with exponential
// backoff before raising HttpError.
class HttpLlmClient : public LlmClient {
 public:
  explicit HttpLlmClient(LlmRequest request);
  std::string Complete(const std::string& prompt) override;

  static nlohmann::json RequestBody(const LlmRequest& request, const std::string& prompt);

 private:
  LlmRequest request_;
};

// Replays canned responses keyed by the SHA-256 of the prompt.
class MockLlmClient : public LlmClient {
 public:
  explicit MockLlmClient(const std::filesystem::path& fixture_file);
  explicit MockLlmClient(std::map<std::string, std::string> responses_by_hash);

  std::string Complete(const std::string& prompt) override;
  std::size_t size() const { return responses_.size(); }

 private:
  std::map<std::string, std::string> responses_;
};

std::unique_ptr<LlmClient> MakeLlmClient(const LlmRequest& request);

std::string PromptHash(const std::string& prompt);

// Mock fixture lines: {"prompt_sha256": ..., "response": ...}.
std::string MockFixtureLine(const std::string& prompt, const std::string& response);

// One completion, then ParseLlmResponse. Parse failures carry the raw text.
HypothesisSet GenerateHypotheses(LlmClient& client, const std::string& prompt, int class_label,
                                 const ParseOptions& options = {});

}  // namespace ladder

#endif  // LADDER_LLM_CLIENT_HPP_
