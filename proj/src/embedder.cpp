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

#include "ladder/embedder.hpp"

#include <cctype>

#include "http.hpp"
#include "ladder/error.hpp"

namespace ladder {

LookupEmbedder::LookupEmbedder(const TextCorpus& corpus) : corpus_(corpus) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    exact_.emplace(corpus.sentences[i].text, i);
    normalized_.emplace(NormalizeText(corpus.sentences[i].text), i);
  }
}

std::string LookupEmbedder::NormalizeText(const std::string& text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  while (!out.empty() && (out.back() == '.' || out.back() == '!' || out.back() == '?' ||
                          out.back() == ',' || out.back() == ';')) {
    out.pop_back();
  }
  return out;
}

EmbeddingMatrix LookupEmbedder::Embed(const std::vector<std::string>& texts) {
  std::vector<std::size_t> rows;
  rows.reserve(texts.size());
  for (const auto& t : texts) {
    if (auto it = exact_.find(t); it != exact_.end()) {
      rows.push_back(it->second);
    } else if (auto jt = normalized_.find(NormalizeText(t)); jt != normalized_.end()) {
      rows.push_back(jt->second);
    } else {
      throw Error(ErrorCode::kEmbedderUnavailable,
                  "no corpus embedding for sentence \"" + t + "\"");
    }
  }
  return corpus_.embeddings.SelectRows(rows);
}

RemoteEmbedder::RemoteEmbedder(HttpSettings http, std::string model)
    : http_(std::move(http)), model_(std::move(model)) {}

EmbeddingMatrix RemoteEmbedder::Embed(const std::vector<std::string>& texts) {
  if (texts.empty()) return EmbeddingMatrix();
  std::string body;
  try {
    body = internal::PostJsonWithRetry(http_, {{"model", model_}, {"input", texts}});
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kAuthError) throw;
    throw Error(ErrorCode::kEmbedderUnavailable,
                "embedding endpoint failed for \"" + texts.front() + "\": " + e.what());
  }
  std::vector<float> data;
  std::size_t dim = 0;
  try {
    const auto parsed = nlohmann::json::parse(body);
    const auto& items = parsed.at("data");
    if (items.size() != texts.size()) {
      throw Error(ErrorCode::kEmbedderUnavailable,
                  "embedding endpoint returned " + std::to_string(items.size()) +
                      " vectors for " + std::to_string(texts.size()) + " texts");
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto vec = items[i].at("embedding").get<std::vector<float>>();
      if (i == 0) dim = vec.size();
      if (vec.size() != dim || dim == 0) {
        throw Error(ErrorCode::kEmbedderUnavailable,
                    "inconsistent embedding for \"" + texts[i] + "\"");
      }
      data.insert(data.end(), vec.begin(), vec.end());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kEmbedderUnavailable,
                std::string("malformed embedding response: ") + e.what());
  }
  return EmbeddingMatrix(texts.size(), dim, std::move(data));
}

}  // namespace ladder
