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


#include "ladder/retrieval.hpp"

#include <gtest/gtest.h>

#include <random>

#include "ladder/error.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace ladder {
namespace {

// One class; `wrong[i]` marks a misclassified row.
SliceDataset OneClass(const std::vector<bool>& wrong, std::size_t dim = 2) {
  SliceDataset d;
  d.classes = {"a", "b"};
  for (std::size_t i = 0; i < wrong.size(); ++i) {
    d.samples.push_back({"r" + std::to_string(i), 0, wrong[i] ? 1 : 0, std::nullopt, {}});
  }
  d.features = EmbeddingMatrix(wrong.size(), dim);
  return d;
}

TextCorpus Corpus(std::vector<float> data, std::size_t dim) {
  TextCorpus c;
  const std::size_t n = data.size() / dim;
  for (std::size_t i = 0; i < n; ++i) c.sentences.push_back({"s" + std::to_string(i + 1), "t"});
  c.embeddings = EmbeddingMatrix(n, dim, std::move(data));
  return c;
}

TEST(ClassErrorRate, Counting) {
  EXPECT_DOUBLE_EQ(ClassErrorRate(OneClass(std::vector<bool>(4, false)), 0), 0.0);
  EXPECT_DOUBLE_EQ(ClassErrorRate(OneClass(std::vector<bool>(4, true)), 0), 1.0);
  std::vector<bool> wrong(10, false);
  wrong[1] = wrong[4] = wrong[7] = true;
  SliceDataset d = OneClass(wrong);
  EXPECT_DOUBLE_EQ(ClassErrorRate(d, 0), 0.3);
  std::vector<std::size_t> members = {1, 2};
  EXPECT_DOUBLE_EQ(ClassErrorRate(d, 0, members), 0.5);
  EXPECT_LADDER_ERROR(ClassErrorRate(d, 1), ErrorCode::kEmptySet);
  std::vector<std::size_t> none;
  EXPECT_LADDER_ERROR(ClassErrorRate(d, 0, none), ErrorCode::kEmptySet);
}

TEST(MeanDifference, Arithmetic) {
  SliceDataset d = OneClass({false, true});
  DeltaVector same = MeanDifference(EmbeddingMatrix(2, 2, {1, 0, 1, 0}), d, 0);
  EXPECT_EQ(same.values, (std::vector<double>{0.0, 0.0}));

  d = OneClass({false, false, true});
  DeltaVector delta = MeanDifference(EmbeddingMatrix(3, 2, {2, 0, 0, 2, 0, 0}), d, 0);
  EXPECT_EQ(delta.values, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(delta.n_correct, 2u);
  EXPECT_EQ(delta.n_wrong, 1u);
}

TEST(MeanDifference, Errors) {
  SliceDataset d = OneClass({false, false});
  EXPECT_LADDER_ERROR(MeanDifference(EmbeddingMatrix(2, 2), d, 0), ErrorCode::kDegenerateClass);
  d = OneClass({true, true});
  EXPECT_LADDER_ERROR(MeanDifference(EmbeddingMatrix(2, 2), d, 0), ErrorCode::kDegenerateClass);
  EXPECT_LADDER_ERROR(MeanDifference(EmbeddingMatrix(3, 2), d, 0), ErrorCode::kRowCountMismatch);
}

TEST(RetrieveTopK, OrthogonalDistractor) {
  DeltaVector delta{0, {1.0, 0.0}, 1, 1};
  auto out = RetrieveTopK(delta, Corpus({1, 0, 0, 1}, 2), 1);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].sentence_id, "s1");
  EXPECT_EQ(out[0].rank, 1u);
  EXPECT_DOUBLE_EQ(out[0].similarity, 1.0);
}

TEST(RetrieveTopK, SaturatesAtCorpusSize) {
  DeltaVector delta{0, {1.0, 0.0}, 1, 1};
  EXPECT_EQ(RetrieveTopK(delta, Corpus({1, 0, 0, 1}, 2), 5).size(), 2u);
}

TEST(RetrieveTopK, TiesKeepCorpusOrder) {
  DeltaVector delta{0, {1.0, 0.0}, 1, 1};
  auto out = RetrieveTopK(delta, Corpus({0, 1, 1, 0, 1, 0}, 2), 3);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].sentence_id, "s2");
  EXPECT_EQ(out[1].sentence_id, "s3");
  EXPECT_EQ(out[2].sentence_id, "s1");
}

TEST(RetrieveTopK, DotVersusCosine) {
  DeltaVector delta{0, {1.0, 0.0}, 1, 1};
  TextCorpus c = Corpus({3, 3, 1, 0}, 2);
  EXPECT_EQ(RetrieveTopK(delta, c, 1, SimilarityMode::kDot)[0].sentence_id, "s1");
  EXPECT_EQ(RetrieveTopK(delta, c, 1, SimilarityMode::kCosine)[0].sentence_id, "s2");
}

TEST(RetrieveTopK, Errors) {
  DeltaVector delta{0, {1.0, 0.0}, 1, 1};
  EXPECT_LADDER_ERROR(RetrieveTopK(delta, Corpus({1, 0}, 2), 0), ErrorCode::kInvalidArgument);
  EXPECT_LADDER_ERROR(RetrieveTopK(delta, TextCorpus{{}, EmbeddingMatrix(0, 2)}, 1),
                      ErrorCode::kEmptySet);
  EXPECT_LADDER_ERROR(RetrieveTopK(delta, Corpus({1, 0, 0}, 3), 1),
                      ErrorCode::kDimensionMismatch);
}

TEST(RetrieveTopK, MatchesFullSortOracle) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    oracle::RetrievalInstance inst = oracle::MakeRetrievalInstance(rng, 2000, 32);
    DeltaVector delta{0, inst.query, 1, 1};
    auto got = RetrieveTopK(delta, inst.corpus, inst.k,
                            inst.cosine ? SimilarityMode::kCosine : SimilarityMode::kDot);
    auto want = oracle::BruteTopK(inst.query, inst.corpus.embeddings, inst.k, inst.cosine);
    ASSERT_EQ(got.size(), want.size()) << trial;
    for (std::size_t r = 0; r < got.size(); ++r) {
      ASSERT_EQ(got[r].corpus_index, want[r]) << "trial " << trial << " rank " << r;
      EXPECT_EQ(got[r].rank, r + 1);
    }
  }
}

TEST(TopKJson, RoundTrip) {
  DeltaVector delta{0, {1.0, 0.5}, 1, 1};
  auto out = RetrieveTopK(delta, Corpus({1, 0, 0, 1, 1, 1}, 2), 3);
  auto back = TopKFromJson(TopKToJson(out));
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].sentence_id, out[i].sentence_id);
    EXPECT_EQ(back[i].similarity, out[i].similarity);
    EXPECT_EQ(back[i].rank, out[i].rank);
  }
  EXPECT_LADDER_ERROR(TopKFromJson(nlohmann::json::array({{{"id", 1}}})), ErrorCode::kParseError);
}

}  // namespace
}  // namespace ladder
