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

#include "ladder/hypothesis.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <variant>

#include "ladder/error.hpp"

namespace ladder {

namespace {

constexpr std::string_view kPromptHead =
    "Context: <task> classification from <modality> using a deep neural network.\n"
    "\n"
    "Analysis Post-Training: On a validation set:\n"
    "a. Get the difference between the image embeddings of correct and incorrectly classified "
    "samples to estimate the features present in the correctly classified samples but missing "
    "in the misclassified samples.\n"
    "b. Retrieve the top <K> sentences from the <captions/radiology report> that match closely "
    "to the embedding difference in step a.\n"
    "c. The sentence list is given below:\n"
    "\n"
    "TopK Sentence List:\n";

constexpr std::string_view kPromptTail =
    "\n"
    "These sentences represent the features present in the correctly classified samples but "
    "missing in the misclassified samples.\n"
    "\n"
    "Task: Consider the consistent attributes present in the descriptions of correctly "
    "classified and misclassified samples regarding <task>. Formulate hypotheses based on these "
    "attributes. Attributes include all concepts (e.g., explicit or implicit anatomies, "
    "observations, symptoms of change related to the disease, concepts leading to potential bias "
    "in medical images, or visual cues in natural images) in the sentences. Assess how these "
    "characteristics might influence the classifier's performance.\n"
    "\n"
    "Your response should only contain the list of top hypotheses, formatted as follows:\n"
    "\n"
    "hypothesis_dict = {\n"
    "    'H1': 'The classifier is making mistake as it is biased toward <attribute>',\n"
    "    'H2': 'The classifier is making mistake as it is biased toward <attribute>',\n"
    "    'H3': 'The classifier is making mistake as it is biased toward <attribute>',\n"
    "    ...\n"
    "}\n"
    "\n"
    "To effectively test Hypothesis 1 (H1) using the CLIP language encoder, create prompts "
    "explicitly validating H1. These prompts will help generate text embeddings that capture the "
    "essence of the hypothesis, which can be compared with the image embeddings from the "
    "dataset. The goal is to verify alignment with or violation of H1. Prompts must focus only "
    "on the <task>. Each hypothesis must have five prompts, formatted as:\n"
    "\n"
    "prompt_dict = {\n"
    "    'H1_<attribute>': [List of prompts],\n"
    "    'H2_<attribute>': [List of prompts],\n"
    "    ...\n"
    "}\n"
    "\n"
    "Final response format strictly:\n"
    "\n"
    "hypothesis_dict\n"
    "prompt_dict\n";

constexpr std::string_view kAnonymizationNote =
    "\nIgnore '___' as they are due to anonymization. We focus only on positive <task> "
    "patients.\n";

constexpr std::string_view kMetadataHead =
    "Context: <task> classification using a deep neural network\n"
    "\n"
    "Analysis post-training: On a validation set, you are provided with the metadata details "
    "for the correctly classified positive <task> patients in a Python dictionary, as follows\n"
    "\n";

constexpr std::string_view kMetadataTail =
    "\n"
    "Task: Consider the consistent attributes present in the dictionary regarding the positive "
    "<task> patients. Formulate hypotheses based on these attributes. Assess how these "
    "characteristics might be influencing the classifier's performance. Your response should "
    "contain only the list of top hypothesis, nothing else. For the response, you should be the "
    "following python dictionary template, no extra sentence:\n"
    "\n"
    "hypothesis_dict = {\n"
    "    'H1': 'The classifier is making mistake as it is biased toward <attribute>',\n"
    "    'H2': 'The classifier is making mistake as it is biased toward <attribute>',\n"
    "    'H3': 'The classifier is making mistake as it is biased toward <attribute>',\n"
    "    ...\n"
    "}\n";

std::string Substitute(std::string_view templ, const std::string& task,
                       const std::string& modality, const std::string& k) {
  std::string out;
  out.reserve(templ.size() + 64);
  std::size_t pos = 0;
  while (pos < templ.size()) {
    if (templ.compare(pos, 6, "<task>") == 0) {
      out += task;
      pos += 6;
    } else if (templ.compare(pos, 10, "<modality>") == 0) {
      out += modality;
      pos += 10;
    } else if (templ.compare(pos, 3, "<K>") == 0) {
      out += k;
      pos += 3;
    } else {
      out += templ[pos++];
    }
  }
  return out;
}

}  // namespace

std::string BuildPrompt(const std::string& task, const std::string& modality,
                        const std::vector<std::string>& sentences, std::size_t k, bool medical) {
  if (sentences.empty()) {
    throw Error(ErrorCode::kEmptySentences, "cannot build a prompt without sentences");
  }
  const std::string k_text = std::to_string(k);
  std::string prompt = Substitute(kPromptHead, task, modality, k_text);
  for (const auto& s : sentences) {
    prompt += s;
    prompt += '\n';
  }
  prompt += Substitute(kPromptTail, task, modality, k_text);
  if (medical) prompt += Substitute(kAnonymizationNote, task, modality, k_text);
  return prompt;
}

std::string BuildMetadataPrompt(const std::string& task,
                                const std::vector<MetadataRecord>& records) {
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyRecords, "cannot build a metadata prompt without records");
  }
  std::string prompt = Substitute(kMetadataHead, task, "", "");
  for (std::size_t i = 0; i < records.size(); ++i) {
    prompt += "Patient " + std::to_string(i + 1) + ": {";
    for (std::size_t j = 0; j < records[i].size(); ++j) {
      if (j > 0) prompt += ", ";
      prompt += records[i][j].first + ": " + records[i][j].second;
    }
    prompt += "}\n";
  }
  prompt += Substitute(kMetadataTail, task, "", "");
  return prompt;
}

// ---------------------------------------------------------------------------
// Python-literal scanner.

namespace {

constexpr int kMaxDepth = 8;

struct PyValue;
using PyList = std::vector<PyValue>;
using PyDict = std::vector<std::pair<std::string, PyValue>>;

struct PyValue {
  // string, raw token (numbers, True/None/...), list, dict
  std::variant<std::string, PyList, PyDict> v;
  bool is_raw_token = false;
};

class Scanner {
 public:
  explicit Scanner(std::string_view text, std::size_t pos = 0) : text_(text), pos_(pos) {}

  PyValue ParseValue(int depth) {
    if (depth > kMaxDepth) Fail("nesting too deep");
    SkipSpace();
    if (AtEnd()) Fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '{') return ParseDict(depth + 1);
    if (c == '[' || c == '(') return ParseList(depth + 1);
    if (c == '\'' || c == '"') return {ParseStringConcat(), false};
    return ParseRawToken();
  }

  std::size_t pos() const { return pos_; }

 private:
  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorCode::kParseError,
                "malformed literal at offset " + std::to_string(pos_) + ": " + what);
  }

  bool AtEnd() const { return pos_ >= text_.size(); }

  void SkipSpace() {
    while (!AtEnd()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (!AtEnd() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  PyValue ParseDict(int depth) {
    ++pos_;  // '{'
    PyDict dict;
    while (true) {
      SkipSpace();
      if (AtEnd()) Fail("unterminated dict");
      if (text_[pos_] == '}') {
        ++pos_;
        return {std::move(dict), false};
      }
      PyValue key = ParseValue(depth);
      if (!std::holds_alternative<std::string>(key.v)) Fail("dict key must be a string");
      SkipSpace();
      if (AtEnd() || text_[pos_] != ':') Fail("expected ':' after dict key");
      ++pos_;
      PyValue value = ParseValue(depth);
      dict.emplace_back(std::get<std::string>(key.v), std::move(value));
      SkipSpace();
      if (AtEnd()) Fail("unterminated dict");
      if (text_[pos_] == ',') {
        ++pos_;
      } else if (text_[pos_] != '}') {
        Fail("expected ',' or '}' in dict");
      }
    }
  }

  PyValue ParseList(int depth) {
    const char close = text_[pos_] == '[' ? ']' : ')';
    ++pos_;
    PyList list;
    bool saw_comma = false;
    while (true) {
      SkipSpace();
      if (AtEnd()) Fail("unterminated list");
      if (text_[pos_] == close) {
        ++pos_;
        // "(x)" without a comma is a parenthesised value, not a tuple.
        if (close == ')' && list.size() == 1 && !saw_comma) return std::move(list.front());
        return {std::move(list), false};
      }
      list.push_back(ParseValue(depth));
      SkipSpace();
      if (AtEnd()) Fail("unterminated list");
      if (text_[pos_] == ',') {
        saw_comma = true;
        ++pos_;
      } else if (text_[pos_] != close) {
        Fail("expected ',' or closing bracket in list");
      }
    }
  }

  PyValue ParseRawToken() {
    const std::size_t start = pos_;
    while (!AtEnd()) {
      const char c = text_[pos_];
      if (c == ',' || c == ':' || c == '}' || c == ']' || c == ')' ||
          std::isspace(static_cast<unsigned char>(c))) {
        break;
      }
      ++pos_;
    }
    if (pos_ == start) Fail("unexpected character");
    PyValue v{std::string(text_.substr(start, pos_ - start)), true};
    return v;
  }

  // Adjacent literals concatenate, as in Python.
  std::string ParseStringConcat() {
    std::string out = ParseString();
    while (true) {
      const std::size_t save = pos_;
      SkipSpace();
      if (!AtEnd() && (text_[pos_] == '\'' || text_[pos_] == '"')) {
        out += ParseString();
      } else {
        pos_ = save;
        return out;
      }
    }
  }

  // A quote only closes the string when the next non-blank character could
  // follow a literal; otherwise it is an apostrophe inside the text.
  bool ClosesHere(std::size_t after) const {
    while (after < text_.size() && (text_[after] == ' ' || text_[after] == '\t')) ++after;
    if (after >= text_.size()) return true;
    const char c = text_[after];
    return c == ',' || c == ':' || c == '}' || c == ']' || c == ')' || c == '\n' ||
           c == '\r' || c == '#' || c == '\'' || c == '"';
  }

  std::string ParseString() {
    const char quote = text_[pos_];
    const bool triple = text_.compare(pos_, 3, std::string(3, quote)) == 0;
    pos_ += triple ? 3 : 1;
    std::string out;
    while (true) {
      if (AtEnd()) Fail("unterminated string");
      const char c = text_[pos_];
      if (c == '\\' && pos_ + 1 < text_.size()) {
        const char e = text_[pos_ + 1];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '\\': out += '\\'; break;
          case '\'': out += '\''; break;
          case '"': out += '"'; break;
          case '\n': break;
          default:
            out += '\\';
            out += e;
        }
        pos_ += 2;
        continue;
      }
      if (triple) {
        if (text_.compare(pos_, 3, std::string(3, quote)) == 0) {
          pos_ += 3;
          return out;
        }
      } else if (c == quote) {
        if (ClosesHere(pos_ + 1)) {
          ++pos_;
          return out;
        }
      } else if (c == '\n') {
        Fail("newline inside string");
      }
      out += c;
      ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_;
};

bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Locates `name` used as an assignment target or JSON key followed by '{'
// and parses that dict. Bare mentions of the name are skipped.
std::optional<PyDict> FindDict(const std::string& text, std::string_view name) {
  std::size_t from = 0;
  while (true) {
    const std::size_t at = text.find(name, from);
    if (at == std::string::npos) return std::nullopt;
    from = at + name.size();
    if (at > 0 && IsIdentChar(text[at - 1])) continue;
    std::size_t p = at + name.size();
    if (p < text.size() && IsIdentChar(text[p])) continue;
    if (p < text.size() && (text[p] == '"' || text[p] == '\'')) ++p;
    while (p < text.size() && (text[p] == ' ' || text[p] == '\t')) ++p;
    if (p >= text.size() || (text[p] != '=' && text[p] != ':')) continue;
    ++p;
    while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
    if (p >= text.size() || text[p] != '{') continue;
    Scanner scanner(text, p);
    PyValue value = scanner.ParseValue(0);
    return std::get<PyDict>(std::move(value.v));
  }
}

std::string AsString(const PyValue& v, const std::string& context) {
  if (const auto* s = std::get_if<std::string>(&v.v)) return *s;
  throw Error(ErrorCode::kParseError, context + " must be a string");
}

std::vector<std::string> AsStringList(const PyValue& v, const std::string& context) {
  if (const auto* s = std::get_if<std::string>(&v.v)) {
    if (v.is_raw_token) throw Error(ErrorCode::kParseError, context + " must be a list of strings");
    return {*s};
  }
  if (const auto* list = std::get_if<PyList>(&v.v)) {
    std::vector<std::string> out;
    for (const auto& item : *list) {
      if (item.is_raw_token) {
        throw Error(ErrorCode::kParseError, context + " must be a list of strings");
      }
      out.push_back(AsString(item, context));
    }
    return out;
  }
  throw Error(ErrorCode::kParseError, context + " must be a list of strings");
}

std::string EscapeSingleQuoted(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

HypothesisSet ParseLlmResponse(const std::string& text, const ParseOptions& options) {
  HypothesisSet set;
  set.raw_response = text;
  try {
    auto hyp_dict = FindDict(text, "hypothesis_dict");
    if (!hyp_dict) {
      throw Error(ErrorCode::kParseError, "no hypothesis_dict block found in LLM response");
    }
    if (hyp_dict->empty()) {
      throw Error(ErrorCode::kParseError, "hypothesis_dict is empty");
    }
    std::set<std::string> seen;
    for (const auto& [key, value] : *hyp_dict) {
      if (!seen.insert(key).second) {
        throw Error(ErrorCode::kParseError, "duplicate hypothesis id '" + key + "'");
      }
      Hypothesis h;
      h.id = key;
      h.statement = AsString(value, "hypothesis '" + key + "'");
      set.hypotheses.push_back(std::move(h));
    }

    auto prompt_dict = FindDict(text, "prompt_dict");
    if (!prompt_dict) {
      if (options.require_prompts) {
        throw Error(ErrorCode::kPairingError, "response has hypothesis_dict but no prompt_dict");
      }
      return set;
    }
    std::map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < set.hypotheses.size(); ++i) index_of[set.hypotheses[i].id] = i;
    std::vector<bool> paired(set.hypotheses.size(), false);
    for (const auto& [key, value] : *prompt_dict) {
      const std::size_t underscore = key.find('_');
      const std::string prefix = key.substr(0, underscore);
      const std::string attribute =
          underscore == std::string::npos ? std::string() : key.substr(underscore + 1);
      auto it = index_of.find(prefix);
      if (it == index_of.end()) {
        throw Error(ErrorCode::kPairingError,
                    "prompt_dict key '" + key + "' has no matching hypothesis");
      }
      if (paired[it->second]) {
        throw Error(ErrorCode::kPairingError,
                    "hypothesis '" + prefix + "' has more than one prompt list");
      }
      auto sentences = AsStringList(value, "prompts for '" + key + "'");
      if (sentences.empty()) {
        throw Error(ErrorCode::kPairingError, "hypothesis '" + prefix + "' has no prompts");
      }
      paired[it->second] = true;
      set.hypotheses[it->second].attribute = attribute;
      set.hypotheses[it->second].test_sentences = std::move(sentences);
    }
    for (std::size_t i = 0; i < paired.size(); ++i) {
      if (!paired[i] && options.require_prompts) {
        throw Error(ErrorCode::kPairingError,
                    "hypothesis '" + set.hypotheses[i].id + "' has no prompt_dict entry");
      }
    }
  } catch (const ParseFailure&) {
    throw;
  } catch (const Error& e) {
    throw ParseFailure(e.code(), e.what(), text);
  }
  return set;
}

std::string RenderLlmResponse(const std::vector<Hypothesis>& hypotheses) {
  std::string out = "hypothesis_dict = {\n";
  for (const auto& h : hypotheses) {
    out += "    '" + EscapeSingleQuoted(h.id) + "': '" + EscapeSingleQuoted(h.statement) + "',\n";
  }
  out += "}\n\nprompt_dict = {\n";
  for (const auto& h : hypotheses) {
    std::string key = h.id;
    if (!h.attribute.empty()) key += "_" + h.attribute;
    out += "    '" + EscapeSingleQuoted(key) + "': [\n";
    for (const auto& s : h.test_sentences) out += "        '" + EscapeSingleQuoted(s) + "',\n";
    out += "    ],\n";
  }
  out += "}\n";
  return out;
}

nlohmann::json HypothesisSetToJson(const HypothesisSet& set) {
  nlohmann::json hyps = nlohmann::json::array();
  for (const auto& h : set.hypotheses) {
    hyps.push_back({{"id", h.id},
                    {"attribute", h.attribute},
                    {"statement", h.statement},
                    {"test_sentences", h.test_sentences}});
  }
  return {{"class", set.class_label}, {"raw_response", set.raw_response}, {"hypotheses", hyps}};
}

HypothesisSet HypothesisSetFromJson(const nlohmann::json& value) {
  HypothesisSet set;
  try {
    set.class_label = value.at("class").get<int>();
    set.raw_response = value.value("raw_response", std::string());
    for (const auto& item : value.at("hypotheses")) {
      Hypothesis h;
      h.id = item.at("id").get<std::string>();
      h.attribute = item.value("attribute", std::string());
      h.statement = item.value("statement", std::string());
      h.test_sentences = item.at("test_sentences").get<std::vector<std::string>>();
      if (h.test_sentences.empty()) {
        throw Error(ErrorCode::kParseError, "hypothesis '" + h.id + "' has no test sentences");
      }
      set.hypotheses.push_back(std::move(h));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("bad hypotheses.json: ") + e.what());
  }
  if (set.hypotheses.empty()) {
    throw Error(ErrorCode::kParseError, "hypotheses.json lists no hypotheses");
  }
  return set;
}

}  // namespace ladder
