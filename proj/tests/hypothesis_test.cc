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

#include <gtest/gtest.h>

#include "ladder/error.hpp"
#include "parser_fixtures.hpp"
#include "test_util.hpp"

namespace ladder {
namespace {

bool Contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

TEST(BuildPrompt, ListsSentencesAndTemplateKeys) {
  const std::string p =
      BuildPrompt("bird species", "natural images", {"a bird on water", "a bird in a forest"}, 2,
                  false);
  EXPECT_TRUE(Contains(p, "a bird on water\n"));
  EXPECT_TRUE(Contains(p, "a bird in a forest\n"));
  EXPECT_TRUE(Contains(p, "hypothesis_dict"));
  EXPECT_TRUE(Contains(p, "prompt_dict"));
  EXPECT_TRUE(Contains(p, "Context: bird species classification from natural images"));
  EXPECT_TRUE(Contains(p, "Retrieve the top 2 sentences"));
  EXPECT_FALSE(Contains(p, "<task>"));
  EXPECT_FALSE(Contains(p, "<K>"));
  EXPECT_FALSE(Contains(p, "anonymization"));
}

TEST(BuildPrompt, MedicalAppendsAnonymizationNote) {
  const std::string p = BuildPrompt("pneumothorax", "chest x-rays", {"chest tube"}, 1, true);
  EXPECT_TRUE(Contains(p, "Ignore '___' as they are due to anonymization."));
  EXPECT_TRUE(Contains(p, "positive pneumothorax patients"));
}

TEST(BuildPrompt, Deterministic) {
  const std::vector<std::string> s = {"x", "y"};
  EXPECT_EQ(BuildPrompt("t", "m", s, 2, false), BuildPrompt("t", "m", s, 2, false));
  EXPECT_NE(BuildPrompt("t", "m", s, 2, false), BuildPrompt("t", "m", {"y", "x"}, 2, false));
}

TEST(BuildPrompt, EmptySentences) {
  EXPECT_LADDER_ERROR(BuildPrompt("t", "m", {}, 0, false), ErrorCode::kEmptySentences);
}

TEST(BuildMetadataPrompt, RendersRecordsVerbatim) {
  const std::string p = BuildMetadataPrompt(
      "cancer", {{{"age", "71"}, {"view", "CC"}}, {{"age", "64.50"}, {"view", "MLO"}}});
  EXPECT_TRUE(Contains(p, "Patient 1: {age: 71, view: CC}"));
  EXPECT_TRUE(Contains(p, "Patient 2: {age: 64.50, view: MLO}"));
  EXPECT_TRUE(Contains(p, "hypothesis_dict"));
  EXPECT_FALSE(Contains(p, "prompt_dict"));
  EXPECT_LADDER_ERROR(BuildMetadataPrompt("cancer", {}), ErrorCode::kEmptyRecords);
}

TEST(ParseLlmResponse, AnnotatedFixtures) {
  const auto annotations = fixtures::LoadAnnotations();
  ASSERT_EQ(annotations.size(), 12u);
  for (const auto& [file, expected] : annotations.items()) {
    EXPECT_EQ(fixtures::CheckFixture(file, expected), "") << file;
  }
}

std::vector<Hypothesis> ThreeHypotheses() {
  std::vector<Hypothesis> hyps;
  for (int i = 1; i <= 3; ++i) {
    Hypothesis h;
    h.id = "H" + std::to_string(i);
    h.attribute = "attr_" + std::to_string(i);
    h.statement = "The classifier is making mistake as it is biased toward attr " + std::to_string(i);
    for (int j = 0; j < 5; ++j) h.test_sentences.push_back("prompt " + std::to_string(j));
    hyps.push_back(h);
  }
  return hyps;
}

TEST(ParseLlmResponse, TemplateFormatThreeByFive) {
  HypothesisSet set = ParseLlmResponse(RenderLlmResponse(ThreeHypotheses()));
  ASSERT_EQ(set.hypotheses.size(), 3u);
  for (const auto& h : set.hypotheses) EXPECT_EQ(h.test_sentences.size(), 5u);
}

TEST(ParseLlmResponse, FencedEqualsUnfenced) {
  const std::string plain = RenderLlmResponse(ThreeHypotheses());
  const auto a = ParseLlmResponse(plain).hypotheses;
  const auto b = ParseLlmResponse("```python\n" + plain + "```\n").hypotheses;
  EXPECT_EQ(a, b);
}

TEST(ParseLlmResponse, RenderRoundTripWithAwkwardText) {
  auto hyps = ThreeHypotheses();
  hyps[0].statement = "It's biased toward \"quoted\" things, {braces} and [brackets]";
  hyps[1].test_sentences[0] = "a bird's wing\\tail";
  hyps[2].test_sentences[4] = "line one\nline two";
  EXPECT_EQ(ParseLlmResponse(RenderLlmResponse(hyps)).hypotheses, hyps);
}

TEST(ParseLlmResponse, UnpairedHypothesis) {
  const std::string text =
      "hypothesis_dict = {'H1': 'a', 'H2': 'b'}\nprompt_dict = {'H1_x': ['p']}\n";
  EXPECT_LADDER_ERROR(ParseLlmResponse(text), ErrorCode::kPairingError);
  ParseOptions lenient;
  lenient.require_prompts = false;
  EXPECT_EQ(ParseLlmResponse("hypothesis_dict = {'H1': 'a'}", lenient).hypotheses.size(), 1u);
  EXPECT_LADDER_ERROR(ParseLlmResponse("hypothesis_dict = {'H1': 'a'}"), ErrorCode::kPairingError);
}

TEST(ParseLlmResponse, FailureCarriesRawText) {
  const std::string text = "I cannot help with that.";
  try {
    ParseLlmResponse(text);
    FAIL() << "expected ParseError";
  } catch (const ParseFailure& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_EQ(e.raw(), text);
  }
}

TEST(ParseLlmResponse, RejectsStructuralProblems) {
  EXPECT_LADDER_ERROR(ParseLlmResponse("hypothesis_dict = {}"), ErrorCode::kParseError);
  EXPECT_LADDER_ERROR(ParseLlmResponse("hypothesis_dict = {'H1': 'a', 'H1': 'b'}"),
                      ErrorCode::kParseError);
  EXPECT_LADDER_ERROR(ParseLlmResponse("hypothesis_dict = {'H1': ['a']}\nprompt_dict = {}"),
                      ErrorCode::kParseError);
  EXPECT_LADDER_ERROR(
      ParseLlmResponse("hypothesis_dict = {'H1': 'a'}\nprompt_dict = {'H9_x': ['p']}"),
      ErrorCode::kPairingError);
  EXPECT_LADDER_ERROR(
      ParseLlmResponse("hypothesis_dict = {'H1': 'a'}\nprompt_dict = {'H1_x': []}"),
      ErrorCode::kPairingError);
}

TEST(ParseLlmResponse, ParenthesisedValueIsNotATuple) {
  HypothesisSet set = ParseLlmResponse(
      "hypothesis_dict = {'H1': ('a' 'b')}\nprompt_dict = {'H1_x': ('p', 'q')}");
  ASSERT_EQ(set.hypotheses.size(), 1u);
  EXPECT_EQ(set.hypotheses[0].statement, "ab");
  EXPECT_EQ(set.hypotheses[0].test_sentences, (std::vector<std::string>{"p", "q"}));
}

TEST(HypothesisSetJson, RoundTrip) {
  HypothesisSet set;
  set.class_label = 3;
  set.hypotheses = ThreeHypotheses();
  set.raw_response = "raw";
  EXPECT_EQ(HypothesisSetFromJson(HypothesisSetToJson(set)), set);
  EXPECT_LADDER_ERROR(HypothesisSetFromJson(nlohmann::json{{"class", 0}, {"hypotheses", nlohmann::json::array()}}),
                      ErrorCode::kParseError);
}

}  // namespace
}  // namespace ladder
