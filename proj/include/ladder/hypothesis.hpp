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

#ifndef LADDER_HYPOTHESIS_HPP_
#define LADDER_HYPOTHESIS_HPP_

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace ladder {

struct Hypothesis {
  std::string id;         // "H1"
  std::string attribute;  // suffix of the prompt_dict key, e.g. "water_background"
  std::string statement;
  std::vector<std::string> test_sentences;

  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

struct HypothesisSet {
  int class_label = 0;
  std::vector<Hypothesis> hypotheses;
  std::string raw_response;

  friend bool operator==(const HypothesisSet&, const HypothesisSet&) = default;
};

// Hypothesis-generation prompt. Only the task, modality, K and the sentence
// list vary between renderings; `medical` appends the anonymisation note.
std::string BuildPrompt(const std::string& task, const std::string& modality,
                        const std::vector<std::string>& sentences, std::size_t k, bool medical);

// One metadata record: ordered key/value pairs rendered verbatim.
using MetadataRecord = std::vector<std::pair<std::string, std::string>>;

// Prompt asking for hypothesis_dict only, listing one dictionary per record.
std::string BuildMetadataPrompt(const std::string& task,
                                const std::vector<MetadataRecord>& records);

struct ParseOptions {
  // Metadata prompts ask for hypothesis_dict only.
  bool require_prompts = true;
};

// Extracts hypothesis_dict / prompt_dict Python-literal blocks from free-form
// LLM output and pairs them by the "Hn" key prefix. Tolerates code fences,
// surrounding prose, either quote style, trailing commas, comments and
// unescaped apostrophes inside single-quoted strings.
HypothesisSet ParseLlmResponse(const std::string& text, const ParseOptions& options = {});

// Canonical response text; ParseLlmResponse(RenderLlmResponse(s)) recovers s.
std::string RenderLlmResponse(const std::vector<Hypothesis>& hypotheses);

nlohmann::json HypothesisSetToJson(const HypothesisSet& set);
HypothesisSet HypothesisSetFromJson(const nlohmann::json& value);

}  // namespace ladder

#endif  // LADDER_HYPOTHESIS_HPP_
