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

#include "ladder/mitigator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>

#include "io_util.hpp"
#include "rng.hpp"
#include "ladder/error.hpp"

namespace ladder {

namespace fs = std::filesystem;
using nlohmann::json;

Calibration::Mode Calibration::ParseMode(const std::string& name) {
  if (name == "zscore") return Mode::kZScore;
  if (name == "raw") return Mode::kRaw;
  throw Error(ErrorCode::kConfigError, "unknown calibration mode '" + name + "'");
}

std::string Calibration::ModeName(Mode mode) {
  return mode == Mode::kZScore ? "zscore" : "raw";
}

Calibration FitCalibration(std::span<const double> scores, Calibration::Mode mode) {
  if (scores.empty()) throw Error(ErrorCode::kInvalidArgument, "no scores to calibrate");
  Calibration c;
  c.mode = mode;
  if (mode == Calibration::Mode::kRaw) return c;
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(scores.size());
  double var = 0.0;
  for (double s : scores) var += (s - mean) * (s - mean);
  var /= static_cast<double>(scores.size());
  const double sd = std::sqrt(var);
  if (!(sd > 0.0) || !std::isfinite(sd)) {
    throw Error(ErrorCode::kDegenerateScores, "hypothesis scores have zero variance");
  }
  c.mean = mean;
  c.std = sd;
  return c;
}

std::vector<int> PseudoLabel(std::span<const double> scores, const Calibration& calibration) {
  if (scores.empty()) throw Error(ErrorCode::kInvalidArgument, "no scores to pseudo-label");
  if (calibration.mode == Calibration::Mode::kZScore && !(calibration.std > 0.0)) {
    throw Error(ErrorCode::kDegenerateScores, "calibration std must be positive");
  }
  std::vector<int> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double z = calibration.mode == Calibration::Mode::kZScore
                         ? (scores[i] - calibration.mean) / calibration.std
                         : scores[i];
    const double p = 1.0 / (1.0 + std::exp(-z));
    out[i] = p > 0.5 ? 1 : 0;
  }
  return out;
}

std::vector<std::size_t> BalanceGroups(std::span<const int> labels, std::span<const int> pseudo,
                                       std::size_t num_classes, std::uint64_t seed) {
  if (labels.size() != pseudo.size()) {
    throw Error(ErrorCode::kShapeMismatch, "pseudo-labels have " + std::to_string(pseudo.size()) +
                                               " entries, dataset " +
                                               std::to_string(labels.size()));
  }
  std::vector<std::vector<std::size_t>> cells(num_classes * 2);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes) {
      throw Error(ErrorCode::kBadLabel, "label " + std::to_string(labels[i]) + " out of range");
    }
    if (pseudo[i] != 0 && pseudo[i] != 1) {
      throw Error(ErrorCode::kInvalidArgument, "pseudo-labels must be 0 or 1");
    }
    cells[static_cast<std::size_t>(labels[i]) * 2 + static_cast<std::size_t>(pseudo[i])]
        .push_back(i);
  }
  std::size_t smallest = std::numeric_limits<std::size_t>::max();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].empty()) {
      throw Error(ErrorCode::kEmptyCell, "EmptyCell(" + std::to_string(c / 2) + "," +
                                             std::to_string(c % 2) + ")");
    }
    smallest = std::min(smallest, cells[c].size());
  }
  internal::Rng rng(seed);
  std::vector<std::size_t> out;
  out.reserve(smallest * cells.size());
  for (auto& cell : cells) {
    // Partial Fisher-Yates: the first `smallest` slots become the sample.
    for (std::size_t i = 0; i < smallest; ++i) {
      const std::size_t j = i + rng.Below(cell.size() - i);
      std::swap(cell[i], cell[j]);
    }
    out.insert(out.end(), cell.begin(), cell.begin() + static_cast<std::ptrdiff_t>(smallest));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> BalanceGroups(const SliceDataset& dataset, std::span<const int> pseudo,
                                       std::uint64_t seed) {
  const auto labels = dataset.Labels();
  return BalanceGroups(labels, pseudo, dataset.num_classes(), seed);
}

Eigen::VectorXd LinearHead::Logits(std::span<const float> features_row) const {
  if (features_row.size() != static_cast<std::size_t>(weights.rows())) {
    throw Error(ErrorCode::kDimensionMismatch,
                "feature dim " + std::to_string(features_row.size()) + " != head input dim " +
                    std::to_string(weights.rows()));
  }
  Eigen::VectorXd x(features_row.size());
  for (std::size_t j = 0; j < features_row.size(); ++j) x(j) = features_row[j];
  return weights.transpose() * x + bias;
}

int LinearHead::Predict(std::span<const float> features_row) const {
  const Eigen::VectorXd z = Logits(features_row);
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < z.size(); ++c) {
    if (z(c) > z(best)) best = c;
  }
  return static_cast<int>(best);
}

double LinearHead::Probability(std::span<const float> features_row, int class_label) const {
  const Eigen::VectorXd z = Logits(features_row);
  const double m = z.maxCoeff();
  const Eigen::ArrayXd e = (z.array() - m).exp();
  return e(class_label) / e.sum();
}

namespace {

// Softmax cross-entropy over centred features. Centring is an exact
// reparametrisation (the bias absorbs the mean) that leaves the penalty
// untouched and removes the bias/weight coupling.
class HeadLoss {
 public:
  HeadLoss(const EmbeddingMatrix& features, std::span<const int> labels,
           std::span<const std::size_t> indices, double l2, std::size_t num_classes)
      : l2_(l2) {
    const Eigen::Index m = static_cast<Eigen::Index>(indices.size());
    const Eigen::Index d = static_cast<Eigen::Index>(features.dim());
    x_.resize(m, d);
    y_ = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(num_classes));
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::size_t r = indices[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < d; ++j) x_(i, j) = features.at(r, static_cast<std::size_t>(j));
      y_(i, labels[r]) = 1.0;
    }
    mean_ = x_.colwise().mean().transpose();
    x_.rowwise() -= mean_.transpose();
  }

  const Eigen::VectorXd& mean() const { return mean_; }

  // theta: (d+1) x C, last row is the (centred) bias.
  double Value(const Eigen::MatrixXd& theta, Eigen::MatrixXd* grad) const {
    const Eigen::Index d = x_.cols();
    const auto w = theta.topRows(d);
    Eigen::MatrixXd z = x_ * w;
    z.rowwise() += theta.row(d);
    const Eigen::VectorXd zmax = z.rowwise().maxCoeff();
    z.colwise() -= zmax;
    Eigen::MatrixXd p = z.array().exp().matrix();
    const Eigen::VectorXd sum = p.rowwise().sum();
    const Eigen::VectorXd lse = sum.array().log().matrix();
    const double m = static_cast<double>(x_.rows());
    const double ce = (lse.sum() - (z.array() * y_.array()).sum()) / m;
    const double loss = ce + 0.5 * l2_ * w.squaredNorm();
    if (grad != nullptr) {
      p.array().colwise() /= sum.array();
      p -= y_;
      grad->resize(theta.rows(), theta.cols());
      grad->topRows(d) = x_.transpose() * p / m + l2_ * w;
      grad->row(d) = p.colwise().sum() / m;
    }
    return loss;
  }

 private:
  Eigen::MatrixXd x_;
  Eigen::MatrixXd y_;
  Eigen::VectorXd mean_;
  double l2_;
};

void CheckHeadInputs(const EmbeddingMatrix& features, std::span<const int> labels,
                     std::span<const std::size_t> indices, double l2, std::size_t num_classes) {
  if (indices.empty()) throw Error(ErrorCode::kEmptySet, "no rows selected for head training");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) {
    throw Error(ErrorCode::kInvalidArgument, "l2 must be a finite non-negative number");
  }
  if (labels.size() != features.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "labels and features disagree on row count");
  }
  for (std::size_t r : indices) {
    if (r >= features.rows()) throw Error(ErrorCode::kInvalidArgument, "row index out of range");
    if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= num_classes) {
      throw Error(ErrorCode::kBadLabel, "label " + std::to_string(labels[r]) + " out of range");
    }
  }
}

}  // namespace

double HeadObjective(const EmbeddingMatrix& features, std::span<const int> labels,
                     std::span<const std::size_t> indices, const Eigen::MatrixXd& weights,
                     const Eigen::VectorXd& bias, double l2) {
  const std::size_t num_classes = static_cast<std::size_t>(weights.cols());
  CheckHeadInputs(features, labels, indices, l2, num_classes);
  HeadLoss loss(features, labels, indices, l2, num_classes);
  const Eigen::Index d = weights.rows();
  Eigen::MatrixXd theta(d + 1, weights.cols());
  theta.topRows(d) = weights;
  theta.row(d) = (bias + weights.transpose() * loss.mean()).transpose();
  return loss.Value(theta, nullptr);
}

LinearHead TrainHead(const EmbeddingMatrix& features, std::span<const int> labels,
                     std::span<const std::size_t> indices, double l2, std::size_t num_classes,
                     const HeadTrainOptions& options) {
  CheckHeadInputs(features, labels, indices, l2, num_classes);
  const int first = labels[indices[0]];
  if (std::all_of(indices.begin(), indices.end(),
                  [&](std::size_t r) { return labels[r] == first; })) {
    throw Error(ErrorCode::kSingleClassSet,
                "every selected row has label " + std::to_string(first));
  }
  const HeadLoss loss(features, labels, indices, l2, num_classes);
  const Eigen::Index d = static_cast<Eigen::Index>(features.dim());
  const Eigen::Index c = static_cast<Eigen::Index>(num_classes);

  // Nesterov-accelerated gradient descent with backtracking on the step and
  // function-value restart of the momentum.
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(d + 1, c);
  Eigen::MatrixXd x_prev = x;
  Eigen::MatrixXd grad;
  Eigen::MatrixXd gy;
  double fx = loss.Value(x, &grad);
  double step = 1.0;
  double t = 1.0;
  int it = 0;
  for (; it < options.max_iterations && grad.norm() > options.grad_tolerance; ++it) {
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const Eigen::MatrixXd y = x + ((t - 1.0) / t_next) * (x - x_prev);
    const double fy = loss.Value(y, &gy);
    const double gy2 = gy.squaredNorm();
    step *= 2.0;
    Eigen::MatrixXd candidate;
    double fc;
    for (;;) {
      candidate = y - step * gy;
      fc = loss.Value(candidate, nullptr);
      if (fc <= fy - 0.5 * step * gy2 || step < 1e-20) break;
      step *= 0.5;
    }
    if (fc > fx) {
      // Momentum overshot: restart from x with a plain gradient step.
      t = 1.0;
      x_prev = x;
      const double g2 = grad.squaredNorm();
      for (;;) {
        candidate = x - step * grad;
        fc = loss.Value(candidate, nullptr);
        if (fc <= fx - 0.5 * step * g2 || step < 1e-20) break;
        step *= 0.5;
      }
    } else {
      t = t_next;
      x_prev = x;
    }
    x = candidate;
    fx = loss.Value(x, &grad);
  }

  LinearHead head;
  head.weights = x.topRows(d);
  head.bias = (x.row(d).transpose() - head.weights.transpose() * loss.mean());
  head.l2 = l2;
  head.train_loss = fx;
  head.grad_norm = grad.norm();
  head.iterations = it;
  return head;
}

MitigationBundle Mitigate(const SliceDataset& val_dataset, const EmbeddingMatrix& projected,
                          const std::vector<SliceReport>& slice_reports,
                          const std::vector<HypothesisSet>& hypothesis_sets,
                          TextEmbedder& embedder, const MitigationConfig& config) {
  if (projected.rows() != val_dataset.size()) {
    throw Error(ErrorCode::kShapeMismatch, "projected rows " + std::to_string(projected.rows()) +
                                               " != dataset size " +
                                               std::to_string(val_dataset.size()));
  }
  std::map<std::string, std::pair<int, const Hypothesis*>> by_id;
  for (const auto& set : hypothesis_sets) {
    for (const auto& h : set.hypotheses) {
      by_id[QualifiedHypothesisId(set.class_label, h.id)] = {set.class_label, &h};
    }
  }

  std::vector<const SliceReport*> flagged;
  for (const auto& r : slice_reports) {
    if (r.is_error_slice) flagged.push_back(&r);
  }
  if (flagged.empty()) throw Error(ErrorCode::kNoErrorSlices, "no flagged error slices");
  std::sort(flagged.begin(), flagged.end(), [](const SliceReport* a, const SliceReport* b) {
    return a->hypothesis_id < b->hypothesis_id;
  });

  const std::vector<int> labels = val_dataset.Labels();
  const std::size_t num_classes = val_dataset.num_classes();
  MitigationBundle bundle;
  bundle.similarity = config.similarity;
  for (const SliceReport* report : flagged) {
    const auto found = by_id.find(report->hypothesis_id);
    if (found == by_id.end()) {
      throw Error(ErrorCode::kMissingInput,
                  "no hypothesis text for slice report " + report->hypothesis_id);
    }
    const auto [class_label, hyp] = found->second;
    const HypothesisEmbedding embedding =
        MakeHypothesisEmbedding(*hyp, embedder, config.similarity, report->hypothesis_id);
    const std::vector<double> scores = ScoreHypothesis(projected, embedding, config.similarity);
    std::vector<double> class_scores;
    for (std::size_t i : val_dataset.ClassMembers(class_label)) class_scores.push_back(scores[i]);
    try {
      const Calibration calibration = FitCalibration(class_scores, config.calibration);
      const std::vector<int> pseudo = PseudoLabel(scores, calibration);
      const std::vector<std::size_t> balanced =
          BalanceGroups(labels, pseudo, num_classes, config.seed);
      LinearHead head =
          TrainHead(val_dataset.features, labels, balanced, config.l2, num_classes, config.train);
      head.hypothesis_id = report->hypothesis_id;
      bundle.heads.push_back(std::move(head));
      bundle.hyp_embeddings.push_back(embedding);
      bundle.calibrations.push_back(calibration);
      bundle.hyp_classes.push_back(class_label);
      bundle.attributes.push_back(hyp->attribute);
      bundle.balanced_sizes.push_back(balanced.size());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyCell && e.code() != ErrorCode::kDegenerateScores) throw;
      bundle.warnings.push_back(report->hypothesis_id + ": skipped (" + e.what() + ")");
    }
  }
  if (bundle.heads.empty()) {
    throw Error(ErrorCode::kNoErrorSlices, "every flagged hypothesis was skipped");
  }
  std::vector<std::size_t> all(val_dataset.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  bundle.erm_head =
      TrainHead(val_dataset.features, labels, all, config.l2, num_classes, config.train);
  bundle.erm_head.hypothesis_id = "erm";
  return bundle;
}

EnsembleChoice EnsembleRoute(std::span<const float> features_row,
                             std::span<const float> projected_row,
                             const MitigationBundle& bundle) {
  if (bundle.heads.empty()) throw Error(ErrorCode::kEmptyBundle, "bundle has no heads");
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t h = 0; h < bundle.hyp_embeddings.size(); ++h) {
    const auto& e = bundle.hyp_embeddings[h];
    if (e.vector.size() != projected_row.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "projected row does not match hypothesis dim");
    }
    const double s =
        Similarity(projected_row, std::span<const double>(e.vector), bundle.similarity);
    if (s > best_score ||
        (s == best_score && e.hypothesis_id < bundle.hyp_embeddings[best].hypothesis_id)) {
      best = h;
      best_score = s;
    }
  }
  return {bundle.heads[best].Predict(features_row), best};
}

int EnsemblePredict(std::span<const float> features_row, std::span<const float> projected_row,
                    const MitigationBundle& bundle) {
  return EnsembleRoute(features_row, projected_row, bundle).prediction;
}

std::vector<int> EnsemblePredictAll(const EmbeddingMatrix& features,
                                    const EmbeddingMatrix& projected,
                                    const MitigationBundle& bundle) {
  if (features.rows() != projected.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "features and projected disagree on row count");
  }
  std::vector<int> out(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    out[i] = EnsemblePredict(features.row(i), projected.row(i), bundle);
  }
  return out;
}

std::vector<int> HeadPredictAll(const LinearHead& head, const EmbeddingMatrix& features) {
  std::vector<int> out(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) out[i] = head.Predict(features.row(i));
  return out;
}

namespace {

EmbeddingMatrix FromEigen(const Eigen::MatrixXd& m) {
  EmbeddingMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          static_cast<float>(m(i, j));
    }
  }
  return out;
}

Eigen::MatrixXd ToEigen(const EmbeddingMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.dim());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) out(i, j) = m.at(i, j);
  }
  return out;
}

// Ids such as "c0.H1" are filename-safe already; anything else is escaped.
std::string FileStem(const std::string& id) {
  std::string out;
  for (char ch : id) {
    const bool safe = std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' ||
                      ch == '_';
    if (safe) {
      out += ch;
    } else {
      char buf[4];
      std::snprintf(buf, sizeof(buf), "%%%02X", static_cast<unsigned char>(ch));
      out += buf;
    }
  }
  return out;
}

json HeadJson(const LinearHead& head, const std::string& stem) {
  return {{"hypothesis_id", head.hypothesis_id},
          {"l2", head.l2},
          {"train_loss", head.train_loss},
          {"grad_norm", head.grad_norm},
          {"iterations", head.iterations},
          {"d_phi", head.weights.rows()},
          {"classes", head.weights.cols()},
          {"weights", "heads/" + stem + ".weights.ladremb"},
          {"bias", "heads/" + stem + ".bias.ladremb"}};
}

void SaveHead(const LinearHead& head, const fs::path& directory, const std::string& stem) {
  SaveEmbeddings(FromEigen(head.weights), directory / "heads" / (stem + ".weights.ladremb"));
  SaveEmbeddings(FromEigen(head.bias.transpose()), directory / "heads" / (stem + ".bias.ladremb"));
}

LinearHead LoadHead(const json& j, const fs::path& directory) {
  LinearHead head;
  head.hypothesis_id = j.at("hypothesis_id").get<std::string>();
  head.l2 = j.at("l2").get<double>();
  head.train_loss = j.at("train_loss").get<double>();
  head.grad_norm = j.value("grad_norm", 0.0);
  head.iterations = j.value("iterations", 0);
  head.weights = ToEigen(
      LoadEmbeddings(internal::ResolvePath(directory, j.at("weights").get<std::string>())));
  const EmbeddingMatrix bias =
      LoadEmbeddings(internal::ResolvePath(directory, j.at("bias").get<std::string>()));
  if (bias.rows() != 1 || bias.dim() != static_cast<std::size_t>(head.weights.cols())) {
    throw Error(ErrorCode::kShapeMismatch, "head bias shape does not match weights");
  }
  head.bias = ToEigen(bias).row(0).transpose();
  return head;
}

}  // namespace

void SaveBundle(const MitigationBundle& bundle, const fs::path& directory) {
  if (bundle.heads.empty()) throw Error(ErrorCode::kEmptyBundle, "bundle has no heads");
  fs::create_directories(directory / "heads");
  fs::create_directories(directory / "hypotheses");
  json hyps = json::array();
  for (std::size_t h = 0; h < bundle.heads.size(); ++h) {
    const std::string stem = FileStem(bundle.heads[h].hypothesis_id);
    SaveHead(bundle.heads[h], directory, stem);
    const auto& e = bundle.hyp_embeddings[h];
    EmbeddingMatrix ev(1, e.vector.size());
    for (std::size_t j = 0; j < e.vector.size(); ++j) ev.at(0, j) = static_cast<float>(e.vector[j]);
    SaveEmbeddings(ev, directory / "hypotheses" / (stem + ".ladremb"));
    const auto& cal = bundle.calibrations[h];
    hyps.push_back({{"hypothesis_id", bundle.heads[h].hypothesis_id},
                    {"class", bundle.hyp_classes[h]},
                    {"attribute", bundle.attributes[h]},
                    {"balanced_size", bundle.balanced_sizes[h]},
                    {"n_sentences", e.n_sentences},
                    {"embedding", "hypotheses/" + stem + ".ladremb"},
                    {"calibration",
                     {{"mode", Calibration::ModeName(cal.mode)},
                      {"mean", cal.mean},
                      {"std", cal.std}}},
                    {"head", HeadJson(bundle.heads[h], stem)}});
  }
  SaveHead(bundle.erm_head, directory, "erm");
  const json doc = {{"similarity", SimilarityModeName(bundle.similarity)},
                    {"hypotheses", hyps},
                    {"erm_head", HeadJson(bundle.erm_head, "erm")},
                    {"warnings", bundle.warnings}};
  internal::WriteJsonAtomic(directory / "bundle.json", doc);
}

MitigationBundle LoadBundle(const fs::path& directory) {
  const fs::path path = directory / "bundle.json";
  if (!fs::exists(path)) throw Error(ErrorCode::kMissingInput, "missing " + path.string());
  const json doc = internal::ReadJsonFile(path);
  MitigationBundle bundle;
  try {
    bundle.similarity = ParseSimilarityMode(doc.at("similarity").get<std::string>());
    for (const auto& h : doc.at("hypotheses")) {
      LinearHead head = LoadHead(h.at("head"), directory);
      const EmbeddingMatrix ev =
          LoadEmbeddings(internal::ResolvePath(directory, h.at("embedding").get<std::string>()));
      HypothesisEmbedding e;
      e.hypothesis_id = h.at("hypothesis_id").get<std::string>();
      e.n_sentences = h.value("n_sentences", std::size_t{0});
      e.vector.assign(ev.data().begin(), ev.data().end());
      if (e.hypothesis_id != head.hypothesis_id) {
        throw Error(ErrorCode::kShapeMismatch, "bundle entry ids disagree for " + e.hypothesis_id);
      }
      Calibration cal;
      const auto& cj = h.at("calibration");
      cal.mode = Calibration::ParseMode(cj.at("mode").get<std::string>());
      cal.mean = cj.at("mean").get<double>();
      cal.std = cj.at("std").get<double>();
      bundle.heads.push_back(std::move(head));
      bundle.hyp_embeddings.push_back(std::move(e));
      bundle.calibrations.push_back(cal);
      bundle.hyp_classes.push_back(h.at("class").get<int>());
      bundle.attributes.push_back(h.value("attribute", std::string{}));
      bundle.balanced_sizes.push_back(h.value("balanced_size", std::size_t{0}));
    }
    bundle.erm_head = LoadHead(doc.at("erm_head"), directory);
    bundle.warnings = doc.value("warnings", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, "malformed bundle.json: " + std::string(e.what()));
  }
  if (bundle.heads.empty()) throw Error(ErrorCode::kEmptyBundle, "bundle has no heads");
  return bundle;
}

}  // namespace ladder
