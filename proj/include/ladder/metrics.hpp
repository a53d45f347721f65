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

#ifndef LADDER_METRICS_HPP_
#define LADDER_METRICS_HPP_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "ladder/corpus.hpp"

namespace ladder {

struct GroundTruthSlices {
  struct Slice {
    std::string name;
    std::vector<std::size_t> members;
  };
  std::vector<Slice> slices;
};

struct PredictedSlices {
  struct Slice {
    std::string name;
    std::vector<std::size_t> ranked_members;  // most likely member first
  };
  std::vector<Slice> slices;
};

// Mean over ground-truth slices of the best predicted slice's top-k hit
// fraction. A predicted slice shorter than k uses its own length as the
// denominator; an empty predicted slice scores 0.
double PrecisionAtK(const GroundTruthSlices& gt, const PredictedSlices& pred, std::size_t k);

// Mean cosine similarity of `attribute` to the correct set minus the mean
// over the misclassified set.
double ClipScore(std::span<const double> attribute, const EmbeddingMatrix& correct,
                 const EmbeddingMatrix& wrong);

struct GroupAccuracy {
  std::string cell;  // e.g. "label=landbird,bias_aligned=0"
  int label = 0;
  std::vector<int> tags;
  std::size_t count = 0;
  double accuracy = 0.0;
};

struct WorstGroup {
  double accuracy = 0.0;
  std::string cell;
  std::vector<GroupAccuracy> groups;
};

// `group_key` names one tag or a comma-separated list of tags; cells are
// every (label, tag values) combination and each must be non-empty.
WorstGroup WorstGroupAccuracy(const SliceDataset& dataset, const std::vector<int>& predictions,
                              const std::string& group_key);

// Mann-Whitney estimate of P(score+ > score-) + 0.5 P(tie), via mid-ranks.
double Auroc(std::span<const double> scores, std::span<const int> labels);

double MeanAccuracy(const SliceDataset& dataset, const std::vector<int>& predictions);

}  // namespace ladder

#endif  // LADDER_METRICS_HPP_
