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

#include "ladder/projection.hpp"

#include <cmath>
#include <string>

#include "io_util.hpp"
#include "ladder/error.hpp"

namespace ladder {

namespace fs = std::filesystem;

namespace {

Eigen::MatrixXd ToDouble(const EmbeddingMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.dim());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) out(i, j) = m.at(i, j);
  }
  return out;
}

}  // namespace

AffineProjector FitProjection(const EmbeddingMatrix& features, const EmbeddingMatrix& targets,
                              double ridge) {
  if (features.rows() != targets.rows()) {
    throw Error(ErrorCode::kShapeMismatch,
                "features have " + std::to_string(features.rows()) + " rows, targets " +
                    std::to_string(targets.rows()));
  }
  if (features.rows() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "cannot fit a projection on zero rows");
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw Error(ErrorCode::kInvalidArgument, "ridge must be a finite non-negative number");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(features.rows());
  const Eigen::Index d_phi = static_cast<Eigen::Index>(features.dim());
  const Eigen::Index d_psi = static_cast<Eigen::Index>(targets.dim());

  Eigen::MatrixXd x(n, d_phi + 1);
  x.leftCols(d_phi) = ToDouble(features);
  x.col(d_phi).setOnes();
  const Eigen::MatrixXd y = ToDouble(targets);

  Eigen::MatrixXd gram = (x.transpose() * x) / static_cast<double>(n);
  for (Eigen::Index k = 0; k < d_phi; ++k) gram(k, k) += ridge;
  const Eigen::MatrixXd rhs = (x.transpose() * y) / static_cast<double>(n);

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-13) {
    throw Error(ErrorCode::kSingularSystem,
                "normal equations are singular (rank-deficient features); use ridge > 0");
  }
  const Eigen::MatrixXd solution = llt.solve(rhs);

  AffineProjector p;
  p.weights = solution.topRows(d_phi);
  p.bias = solution.row(d_phi).transpose();
  p.ridge = ridge;
  const Eigen::MatrixXd residual = x * solution - y;
  p.fit_rmse = std::sqrt(residual.squaredNorm() / static_cast<double>(n * d_psi));
  return p;
}

double ProjectionObjective(const EmbeddingMatrix& features, const EmbeddingMatrix& targets,
                           const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                           double ridge) {
  const Eigen::MatrixXd x = ToDouble(features);
  const Eigen::MatrixXd y = ToDouble(targets);
  const Eigen::MatrixXd residual = (x * weights).rowwise() + bias.transpose() - y;
  return residual.squaredNorm() / static_cast<double>(x.rows()) +
         ridge * weights.squaredNorm();
}

Eigen::VectorXd ProjectRow(const AffineProjector& projector, std::span<const float> row) {
  if (row.size() != projector.input_dim()) {
    throw Error(ErrorCode::kShapeMismatch,
                "feature row has dim " + std::to_string(row.size()) + ", projector expects " +
                    std::to_string(projector.input_dim()));
  }
  Eigen::VectorXd z(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) z(static_cast<Eigen::Index>(j)) = row[j];
  return projector.weights.transpose() * z + projector.bias;
}

EmbeddingMatrix Project(const AffineProjector& projector, const EmbeddingMatrix& features) {
  if (features.dim() != projector.input_dim()) {
    throw Error(ErrorCode::kShapeMismatch,
                "features have dim " + std::to_string(features.dim()) +
                    ", projector expects " + std::to_string(projector.input_dim()));
  }
  EmbeddingMatrix out(features.rows(), projector.output_dim());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const Eigen::VectorXd v = ProjectRow(projector, features.row(i));
    auto dst = out.row(i);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = static_cast<float>(v(j));
  }
  return out;
}

void SaveProjector(const AffineProjector& projector, const fs::path& directory) {
  fs::create_directories(directory);
  EmbeddingMatrix w(projector.input_dim(), projector.output_dim());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.dim(); ++j) {
      w.at(i, j) = static_cast<float>(projector.weights(i, j));
    }
  }
  EmbeddingMatrix b(1, projector.output_dim());
  for (std::size_t j = 0; j < b.dim(); ++j) b.at(0, j) = static_cast<float>(projector.bias(j));
  SaveEmbeddings(w, directory / "weights.ladremb");
  SaveEmbeddings(b, directory / "bias.ladremb");
  internal::WriteJsonAtomic(directory / "projector.json",
                            {{"d_phi", projector.input_dim()},
                             {"d_psi", projector.output_dim()},
                             {"ridge", projector.ridge},
                             {"fit_rmse", projector.fit_rmse},
                             {"weights", "weights.ladremb"},
                             {"bias", "bias.ladremb"}});
}

AffineProjector LoadProjector(const fs::path& directory) {
  const fs::path header_path = directory / "projector.json";
  if (!fs::exists(header_path)) {
    throw Error(ErrorCode::kMissingInput, "missing projector " + header_path.string());
  }
  const auto header = internal::ReadJsonFile(header_path);
  AffineProjector p;
  std::size_t d_phi = 0, d_psi = 0;
  try {
    d_phi = header.at("d_phi").get<std::size_t>();
    d_psi = header.at("d_psi").get<std::size_t>();
    p.ridge = header.at("ridge").get<double>();
    p.fit_rmse = header.at("fit_rmse").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, header_path.string() + ": " + e.what());
  }
  const auto w = LoadEmbeddings(
      internal::ResolvePath(directory, header.value("weights", std::string("weights.ladremb"))));
  const auto b = LoadEmbeddings(
      internal::ResolvePath(directory, header.value("bias", std::string("bias.ladremb"))));
  if (w.rows() != d_phi || w.dim() != d_psi || b.rows() != 1 || b.dim() != d_psi) {
    throw Error(ErrorCode::kShapeMismatch, "projector blobs disagree with projector.json");
  }
  p.weights.resize(static_cast<Eigen::Index>(d_phi), static_cast<Eigen::Index>(d_psi));
  for (std::size_t i = 0; i < d_phi; ++i) {
    for (std::size_t j = 0; j < d_psi; ++j) p.weights(i, j) = w.at(i, j);
  }
  p.bias.resize(static_cast<Eigen::Index>(d_psi));
  for (std::size_t j = 0; j < d_psi; ++j) p.bias(j) = b.at(0, j);
  return p;
}

}  // namespace ladder
