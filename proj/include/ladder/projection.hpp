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

#ifndef LADDER_PROJECTION_HPP_
#define LADDER_PROJECTION_HPP_

#include <Eigen/Dense>
#include <filesystem>

#include "ladder/corpus.hpp"

namespace ladder {

inline constexpr double kDefaultProjectionRidge = 1e-4;

// Affine map z -> W^T z + b from classifier features into the
// vision-language image space.
struct AffineProjector {
  Eigen::MatrixXd weights;  // d_phi x d_psi
  Eigen::VectorXd bias;     // d_psi
  double ridge = 0.0;
  double fit_rmse = 0.0;

  std::size_t input_dim() const { return static_cast<std::size_t>(weights.rows()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(weights.cols()); }
};

// Closed-form minimiser of
//   (1/n) sum_i ||W^T x_i + b - y_i||^2 + ridge * ||W||_F^2
// with b unpenalised. One Cholesky factorisation of the augmented Gram
// matrix is shared by every target column. fit_rmse is the root of the
// per-entry mean squared residual on the fitted rows.
AffineProjector FitProjection(const EmbeddingMatrix& features, const EmbeddingMatrix& targets,
                              double ridge = kDefaultProjectionRidge);

// Regularised objective value for arbitrary (W, b); used by optimality probes.
double ProjectionObjective(const EmbeddingMatrix& features, const EmbeddingMatrix& targets,
                           const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                           double ridge);

EmbeddingMatrix Project(const AffineProjector& projector, const EmbeddingMatrix& features);
Eigen::VectorXd ProjectRow(const AffineProjector& projector, std::span<const float> features_row);

// projector.json + weights.ladremb + bias.ladremb inside `directory`.
void SaveProjector(const AffineProjector& projector, const std::filesystem::path& directory);
AffineProjector LoadProjector(const std::filesystem::path& directory);

}  // namespace ladder

#endif  // LADDER_PROJECTION_HPP_
