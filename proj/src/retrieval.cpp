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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ladder/error.hpp"

namespace ladder {

double ClassErrorRate(const SliceDataset& dataset, int class_label,
                      std::optional<std::span<const std::size_t>> members) {
  std::size_t evaluated = 0, wrong = 0;
  auto visit = [&](std::size_t i) {
    const auto& s = dataset.samples.at(i);
    if (s.label != class_label) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sample '" + s.id + "' is not a member of class " + std::to_string(class_label));
    }
    ++evaluated;
    if (!s.correct()) ++wrong;
  };
  if (members) {
    for (std::size_t i : *members) visit(i);
  } else {
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (dataset.samples[i].label == class_label) visit(i);
    }
  }
  if (evaluated == 0) {
    throw Error(ErrorCode::kEmptySet,
                "no samples to evaluate for class " + std::to_string(class_label));
  }
  return static_cast<double>(wrong) / static_cast<double>(evaluated);
}

DeltaVector MeanDifference(const EmbeddingMatrix& projected, const SliceDataset& dataset,
                           int class_label) {
  if (projected.rows() != dataset.size()) {
    throw Error(ErrorCode::kRowCountMismatch, "projected rows do not match dataset size");
  }
  const std::size_t dim = projected.dim();
  std::vector<double> sum_correct(dim, 0.0), sum_wrong(dim, 0.0);
  DeltaVector delta;
  delta.class_label = class_label;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& s = dataset.samples[i];
    if (s.label != class_label) continue;
    auto& acc = s.correct() ? sum_correct : sum_wrong;
    (s.correct() ? delta.n_correct : delta.n_wrong)++;
    auto row = projected.row(i);
    for (std::size_t j = 0; j < dim; ++j) acc[j] += row[j];
  }
  if (delta.n_correct == 0 || delta.n_wrong == 0) {
    throw Error(ErrorCode::kDegenerateClass,
                "class " + std::to_string(class_label) + " has " +
                    std::to_string(delta.n_correct) + " correct and " +
                    std::to_string(delta.n_wrong) + " misclassified samples");
  }
  delta.values.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    delta.values[j] = sum_correct[j] / static_cast<double>(delta.n_correct) -
                      sum_wrong[j] / static_cast<double>(delta.n_wrong);
  }
  return delta;
}

std::vector<RetrievedSentence> RetrieveTopK(const DeltaVector& delta, const TextCorpus& corpus,
                                            std::size_t k, SimilarityMode mode) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (corpus.size() == 0) throw Error(ErrorCode::kEmptySet, "corpus is empty");
  if (corpus.embeddings.dim() != delta.values.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "corpus embeddings have dim " + std::to_string(corpus.embeddings.dim()) +
                    ", delta has " + std::to_string(delta.values.size()));
  }
  const std::span<const double> query(delta.values);
  std::vector<double> sims(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    sims[i] = Similarity(query, corpus.embeddings.row(i), mode);
  }
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (sims[a] != sims[b]) return sims[a] > sims[b];
                      return a < b;
                    });
  std::vector<RetrievedSentence> out;
  out.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    const std::size_t i = order[r];
    out.push_back({corpus.sentences[i].id, corpus.sentences[i].text, sims[i], r + 1, i});
  }
  return out;
}

nlohmann::json TopKToJson(const std::vector<RetrievedSentence>& retrieved) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : retrieved) {
    out.push_back({{"id", r.sentence_id},
                   {"text", r.text},
                   {"similarity", r.similarity},
                   {"rank", r.rank}});
  }
  return out;
}

std::vector<RetrievedSentence> TopKFromJson(const nlohmann::json& value) {
  std::vector<RetrievedSentence> out;
  try {
    for (const auto& item : value) {
      RetrievedSentence r;
      r.sentence_id = item.at("id").get<std::string>();
      r.text = item.at("text").get<std::string>();
      r.similarity = item.at("similarity").get<double>();
      r.rank = item.at("rank").get<std::size_t>();
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("bad topk.json: ") + e.what());
  }
  return out;
}

}  // namespace ladder
