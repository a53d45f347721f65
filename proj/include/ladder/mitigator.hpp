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

#ifndef LADDER_MITIGATOR_HPP_
#define LADDER_MITIGATOR_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ladder/corpus.hpp"
#include "ladder/embedder.hpp"
#include "ladder/hypothesis.hpp"
#include "ladder/similarity.hpp"
#include "ladder/slicer.hpp"

namespace ladder {

inline constexpr double kDefaultHeadL2 = 1e-2;

struct Calibration {
  enum class Mode { kZScore, kRaw };
  double mean = 0.0;
  double std = 1.0;
  Mode mode = Mode::kZScore;

  static Mode ParseMode(const std::string& name);
  static std::string ModeName(Mode mode);
};

// zscore: population mean/std of `scores`; raw: identity. Throws
// DegenerateScores when zscore sees zero variance.
Calibration FitCalibration(std::span<const double> scores, Calibration::Mode mode);

// 1 iff sigmoid(calibrated score) > 0.5; exactly 0.5 maps to 0.
std::vector<int> PseudoLabel(std::span<const double> scores, const Calibration& calibration);

// Subsamples every (label, pseudo) cell down to the smallest cell size,
// without replacement, and returns the union sorted by row index. Throws
// EmptyCell naming the first empty cell.
std::vector<std::size_t> BalanceGroups(std::span<const int> labels, std::span<const int> pseudo,
                                       std::size_t num_classes, std::uint64_t seed);
std::vector<std::size_t> BalanceGroups(const SliceDataset& dataset, std::span<const int> pseudo,
                                       std::uint64_t seed);

struct LinearHead {
  std::string hypothesis_id;
  Eigen::MatrixXd weights;  // d_phi x C
  Eigen::VectorXd bias;     // C
  double l2 = 0.0;
  double train_loss = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;

  Eigen::VectorXd Logits(std::span<const float> features_row) const;
  int Predict(std::span<const float> features_row) const;
  // Softmax probability of `class_label`.
  double Probability(std::span<const float> features_row, int class_label) const;
};

struct HeadTrainOptions {
  double grad_tolerance = 1e-6;
  int max_iterations = 10000;
};

// Multinomial logistic regression on the selected rows:
//   mean softmax cross-entropy + (l2/2) ||W||_F^2, bias unpenalised,
// minimised from an all-zero start by accelerated full-batch gradient
// descent with backtracking. `num_classes` fixes the output width.
LinearHead TrainHead(const EmbeddingMatrix& features, std::span<const int> labels,
                     std::span<const std::size_t> indices, double l2, std::size_t num_classes,
                     const HeadTrainOptions& options = {});

// Objective value of an arbitrary head on the selected rows.
double HeadObjective(const EmbeddingMatrix& features, std::span<const int> labels,
                     std::span<const std::size_t> indices, const Eigen::MatrixXd& weights,
                     const Eigen::VectorXd& bias, double l2);

struct MitigationConfig {
  SimilarityMode similarity = SimilarityMode::kCosine;
  Calibration::Mode calibration = Calibration::Mode::kZScore;
  double l2 = kDefaultHeadL2;
  std::uint64_t seed = 0;
  HeadTrainOptions train;
};

struct MitigationBundle {
  SimilarityMode similarity = SimilarityMode::kCosine;
  std::vector<LinearHead> heads;
  std::vector<HypothesisEmbedding> hyp_embeddings;
  std::vector<Calibration> calibrations;
  std::vector<int> hyp_classes;
  std::vector<std::string> attributes;
  std::vector<std::size_t> balanced_sizes;
  LinearHead erm_head;
  std::vector<std::string> warnings;
};

// Retrains one head per flagged slice report on a pseudo-label-balanced
// subset of the validation set, plus an ERM head on the full set.
// Hypotheses that hit EmptyCell or DegenerateScores are skipped with a
// warning. Throws NoErrorSlices when nothing is flagged or everything is skipped.
MitigationBundle Mitigate(const SliceDataset& val_dataset, const EmbeddingMatrix& projected,
                          const std::vector<SliceReport>& slice_reports,
                          const std::vector<HypothesisSet>& hypothesis_sets,
                          TextEmbedder& embedder, const MitigationConfig& config);

struct EnsembleChoice {
  int prediction = 0;
  std::size_t head_index = 0;
};

// Routes through the head whose hypothesis is most similar to the projected
// row; exact ties go to the lexicographically smallest hypothesis id.
EnsembleChoice EnsembleRoute(std::span<const float> features_row,
                             std::span<const float> projected_row,
                             const MitigationBundle& bundle);
int EnsemblePredict(std::span<const float> features_row, std::span<const float> projected_row,
                    const MitigationBundle& bundle);
std::vector<int> EnsemblePredictAll(const EmbeddingMatrix& features,
                                    const EmbeddingMatrix& projected,
                                    const MitigationBundle& bundle);
std::vector<int> HeadPredictAll(const LinearHead& head, const EmbeddingMatrix& features);

// bundle.json + heads/<id>.{weights,bias}.ladremb + hypotheses/<id>.ladremb.
void SaveBundle(const MitigationBundle& bundle, const std::filesystem::path& directory);
MitigationBundle LoadBundle(const std::filesystem::path& directory);

}  // namespace ladder

#endif  // LADDER_MITIGATOR_HPP_
