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

#ifndef LADDER_SLICER_HPP_
#define LADDER_SLICER_HPP_

#include <string>
#include <vector>

#include "json.hpp"
#include "ladder/corpus.hpp"
#include "ladder/embedder.hpp"
#include "ladder/hypothesis.hpp"
#include "ladder/similarity.hpp"

namespace ladder {

inline constexpr double kDefaultGapThreshold = 0.10;
inline constexpr std::size_t kDefaultMaxHypotheses = 20;

struct HypothesisEmbedding {
  std::string hypothesis_id;
  std::vector<double> vector;
  std::size_t n_sentences = 0;
};

// "c<class>.<id>", unique across the per-class hypothesis sets.
std::string QualifiedHypothesisId(int class_label, const std::string& id);

// Mean of the test-sentence embeddings; under kCosine each sentence is
// l2-normalised before averaging.
HypothesisEmbedding MakeHypothesisEmbedding(const Hypothesis& hypothesis, TextEmbedder& embedder,
                                            SimilarityMode mode,
                                            const std::string& qualified_id = {});

// Per-row similarity between projected embeddings and the hypothesis.
std::vector<double> ScoreHypothesis(const EmbeddingMatrix& projected,
                                    const HypothesisEmbedding& hypothesis, SimilarityMode mode);

struct TauPolicy {
  enum class Kind { kMedian, kPercentile, kFixed };
  Kind kind = Kind::kMedian;
  double value = 50.0;  // percentile in [0,100] or the fixed threshold

  static TauPolicy Parse(const std::string& spec);  // "median", "percentile:p", "fixed:v"
  std::string ToString() const;
};

// Linear-interpolated percentile (p in [0,100]) of non-empty `values`.
double Percentile(std::vector<double> values, double p);

double ResolveTau(const TauPolicy& policy, const std::vector<double>& class_scores);

// Class members whose score is strictly below tau, ascending by row index.
std::vector<std::size_t> ExtractSlice(const std::vector<double>& scores,
                                      const SliceDataset& dataset, int class_label, double tau);

struct SliceReport {
  int class_label = 0;
  std::string hypothesis_id;  // qualified
  std::string attribute;
  std::string statement;
  double threshold = 0.0;
  std::vector<std::size_t> members;  // rows below tau (ranked order when loaded from JSON)
  std::size_t class_size = 0;
  double slice_error = 0.0;
  double class_error = 0.0;
  double gap = 0.0;
  bool is_error_slice = false;
  std::vector<double> scores;  // s_H for every dataset row

  // Members ordered by ascending score (most confidently lacking the
  // attribute first). Without scores the stored order is returned.
  std::vector<std::size_t> RankedMembers() const;
};

struct SliceConfig {
  SimilarityMode similarity = SimilarityMode::kCosine;
  TauPolicy tau;
  double gap_threshold = kDefaultGapThreshold;
  std::size_t max_hypotheses = kDefaultMaxHypotheses;
};

// One report per hypothesis (up to max_hypotheses) of hyps.class_label,
// sorted by gap descending with ties broken by hypothesis id.
std::vector<SliceReport> DetectErrorSlices(const SliceDataset& dataset,
                                           const EmbeddingMatrix& projected,
                                           const HypothesisSet& hyps, TextEmbedder& embedder,
                                           const SliceConfig& config);

nlohmann::json SliceReportToJson(const SliceReport& report, const SliceDataset& dataset,
                                 bool include_scores);
// Member rows are resolved through sample ids of `dataset`.
SliceReport SliceReportFromJson(const nlohmann::json& value, const SliceDataset& dataset);

}  // namespace ladder

#endif  // LADDER_SLICER_HPP_
