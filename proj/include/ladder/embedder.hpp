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

#ifndef LADDER_EMBEDDER_HPP_
#define LADDER_EMBEDDER_HPP_

#include <string>
#include <unordered_map>
#include <vector>

#include "ladder/corpus.hpp"
#include "ladder/llm_client.hpp"

namespace ladder {

// Source of text embeddings for hypothesis test sentences.
class TextEmbedder {
 public:
  virtual ~TextEmbedder() = default;
  // One row per input text. Throws EmbedderUnavailable naming the first
  // text that cannot be embedded.
  virtual EmbeddingMatrix Embed(const std::vector<std::string>& texts) = 0;
};

// Reuses stored corpus embeddings. A text resolves to the corpus sentence
// with identical text, or failing that identical normalised text
// (case-folded, whitespace collapsed, trailing punctuation dropped).
class LookupEmbedder : public TextEmbedder {
 public:
  explicit LookupEmbedder(const TextCorpus& corpus);
  EmbeddingMatrix Embed(const std::vector<std::string>& texts) override;

  static std::string NormalizeText(const std::string& text);

 private:
  const TextCorpus& corpus_;
  std::unordered_map<std::string, std::size_t> exact_;
  std::unordered_map<std::string, std::size_t> normalized_;
};

// OpenAI-style embeddings endpoint: {model, input:[...]} ->
// {data:[{embedding:[...]}, ...]}.
class RemoteEmbedder : public TextEmbedder {
 public:
  RemoteEmbedder(HttpSettings http, std::string model);
  EmbeddingMatrix Embed(const std::vector<std::string>& texts) override;

 private:
  HttpSettings http_;
  std::string model_;
};

}  // namespace ladder

#endif  // LADDER_EMBEDDER_HPP_
