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

#include "ladder/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "ladder/error.hpp"
#include "ladder/similarity.hpp"

namespace ladder {

double PrecisionAtK(const GroundTruthSlices& gt, const PredictedSlices& pred, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (gt.slices.empty()) throw Error(ErrorCode::kEmptyGroundTruth, "no ground-truth slices");
  double total = 0.0;
  for (const auto& truth : gt.slices) {
    if (truth.members.empty()) {
      throw Error(ErrorCode::kEmptyGroundTruth, "ground-truth slice '" + truth.name + "' is empty");
    }
    const std::unordered_set<std::size_t> members(truth.members.begin(), truth.members.end());
    double best = 0.0;
    for (const auto& p : pred.slices) {
      const std::size_t top = std::min(k, p.ranked_members.size());
      if (top == 0) continue;
      std::size_t hits = 0;
      for (std::size_t r = 0; r < top; ++r) hits += members.count(p.ranked_members[r]);
      best = std::max(best, static_cast<double>(hits) / static_cast<double>(top));
    }
    total += best;
  }
  return total / static_cast<double>(gt.slices.size());
}

double ClipScore(std::span<const double> attribute, const EmbeddingMatrix& correct,
                 const EmbeddingMatrix& wrong) {
  if (correct.rows() == 0 || wrong.rows() == 0) {
    throw Error(ErrorCode::kEmptySet, "clip score needs non-empty correct and wrong sets");
  }
  if (correct.dim() != attribute.size() || wrong.dim() != attribute.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "attribute and image embeddings differ in dim");
  }
  auto mean_sim = [&](const EmbeddingMatrix& m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      sum += Similarity(attribute, m.row(i), SimilarityMode::kCosine);
    }
    return sum / static_cast<double>(m.rows());
  };
  return mean_sim(correct) - mean_sim(wrong);
}

namespace {

std::vector<std::string> SplitKeys(const std::string& key) {
  std::vector<std::string> out;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (!part.empty()) out.push_back(part);
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "empty group key");
  return out;
}

}  // namespace

WorstGroup WorstGroupAccuracy(const SliceDataset& dataset, const std::vector<int>& predictions,
                              const std::string& group_key) {
  if (predictions.size() != dataset.size()) {
    throw Error(ErrorCode::kInvalidArgument, "predictions length does not match dataset size");
  }
  if (dataset.size() == 0) throw Error(ErrorCode::kEmptyDataset, "dataset is empty");
  const auto keys = SplitKeys(group_key);
  const std::size_t n_tags = keys.size();
  const std::size_t combos = std::size_t{1} << n_tags;
  const std::size_t n_cells = dataset.num_classes() * combos;
  std::vector<std::size_t> count(n_cells, 0), correct(n_cells, 0);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& s = dataset.samples[i];
    std::size_t combo = 0;
    for (std::size_t t = 0; t < n_tags; ++t) {
      auto it = s.groups.find(keys[t]);
      if (it == s.groups.end()) {
        throw Error(ErrorCode::kMissingGroupTag,
                    "sample '" + s.id + "' lacks group tag '" + keys[t] + "'");
      }
      combo |= static_cast<std::size_t>(it->second) << t;
    }
    const std::size_t cell = static_cast<std::size_t>(s.label) * combos + combo;
    ++count[cell];
    if (predictions[i] == s.label) ++correct[cell];
  }
  WorstGroup out;
  out.accuracy = 2.0;
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    GroupAccuracy g;
    g.label = static_cast<int>(cell / combos);
    std::ostringstream name;
    name << "label=" << dataset.classes[static_cast<std::size_t>(g.label)];
    for (std::size_t t = 0; t < n_tags; ++t) {
      const int v = static_cast<int>((cell % combos) >> t & 1U);
      g.tags.push_back(v);
      name << "," << keys[t] << "=" << v;
    }
    g.cell = name.str();
    g.count = count[cell];
    if (g.count == 0) {
      throw Error(ErrorCode::kEmptyCell, "group cell " + g.cell + " is empty");
    }
    g.accuracy = static_cast<double>(correct[cell]) / static_cast<double>(g.count);
    if (g.accuracy < out.accuracy) {
      out.accuracy = g.accuracy;
      out.cell = g.cell;
    }
    out.groups.push_back(std::move(g));
  }
  return out;
}

double Auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidArgument, "scores and labels differ in length");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mid-ranks, 1-based; a tie block spanning positions [i, j) gets (i + j + 1) / 2.
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j + 1);
    for (std::size_t t = i; t < j; ++t) rank[order[t]] = mid;
    i = j;
  }
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw Error(ErrorCode::kInvalidArgument, "labels must be 0 or 1");
    }
    if (labels[i] == 1) {
      rank_sum += rank[i];
      ++n_pos;
    }
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw Error(ErrorCode::kSingleClass, "AUROC needs both positive and negative labels");
  }
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

double MeanAccuracy(const SliceDataset& dataset, const std::vector<int>& predictions) {
  if (predictions.size() != dataset.size()) {
    throw Error(ErrorCode::kInvalidArgument, "predictions length does not match dataset size");
  }
  if (dataset.size() == 0) throw Error(ErrorCode::kEmptyDataset, "dataset is empty");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (predictions[i] == dataset.samples[i].label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

}  // namespace ladder
