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

#ifndef LADDER_RETRIEVAL_HPP_
#define LADDER_RETRIEVAL_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ladder/corpus.hpp"
#include "ladder/similarity.hpp"

namespace ladder {

inline constexpr std::size_t kDefaultTopKNatural = 200;
inline constexpr std::size_t kDefaultTopKMedical = 100;

// Mean projected embedding of correctly classified class members minus the
// mean over misclassified ones.
struct DeltaVector {
  int class_label = 0;
  std::vector<double> values;
  std::size_t n_correct = 0;
  std::size_t n_wrong = 0;
};

struct RetrievedSentence {
  std::string sentence_id;
  std::string text;
  double similarity = 0.0;
  std::size_t rank = 0;  // 1-based
  std::size_t corpus_index = 0;
};

// Fraction of misclassified samples among `members` (all class rows when
// absent). Throws EmptySet when nothing is evaluated.
double ClassErrorRate(const SliceDataset& dataset, int class_label,
                      std::optional<std::span<const std::size_t>> members = std::nullopt);

// Throws DegenerateClass when the class has no correct or no wrong sample.
DeltaVector MeanDifference(const EmbeddingMatrix& projected, const SliceDataset& dataset,
                           int class_label);

// Top-k corpus sentences by similarity to delta, descending; exact ties keep
// ascending corpus order. Returns the whole corpus ranked when k exceeds it.
std::vector<RetrievedSentence> RetrieveTopK(const DeltaVector& delta, const TextCorpus& corpus,
                                            std::size_t k,
                                            SimilarityMode mode = SimilarityMode::kCosine);

nlohmann::json TopKToJson(const std::vector<RetrievedSentence>& retrieved);
std::vector<RetrievedSentence> TopKFromJson(const nlohmann::json& value);

}  // namespace ladder

#endif  // LADDER_RETRIEVAL_HPP_
