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

#include "ladder/slicer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "ladder/error.hpp"
#include "ladder/retrieval.hpp"

namespace ladder {

std::string QualifiedHypothesisId(int class_label, const std::string& id) {
  return "c" + std::to_string(class_label) + "." + id;
}

HypothesisEmbedding MakeHypothesisEmbedding(const Hypothesis& hypothesis, TextEmbedder& embedder,
                                            SimilarityMode mode,
                                            const std::string& qualified_id) {
  if (hypothesis.test_sentences.empty()) {
    throw Error(ErrorCode::kEmptySentenceSet,
                "hypothesis '" + hypothesis.id + "' has no test sentences");
  }
  const EmbeddingMatrix rows = embedder.Embed(hypothesis.test_sentences);
  if (rows.rows() != hypothesis.test_sentences.size()) {
    throw Error(ErrorCode::kEmbedderUnavailable, "embedder returned the wrong number of rows");
  }
  HypothesisEmbedding out;
  out.hypothesis_id = qualified_id.empty() ? hypothesis.id : qualified_id;
  out.n_sentences = rows.rows();
  out.vector.assign(rows.dim(), 0.0);
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    if (mode == SimilarityMode::kCosine) {
      const auto unit = Normalized(rows.row(i));
      for (std::size_t j = 0; j < unit.size(); ++j) out.vector[j] += unit[j];
    } else {
      auto r = rows.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) out.vector[j] += r[j];
    }
  }
  for (double& v : out.vector) v /= static_cast<double>(rows.rows());
  return out;
}

std::vector<double> ScoreHypothesis(const EmbeddingMatrix& projected,
                                    const HypothesisEmbedding& hypothesis, SimilarityMode mode) {
  if (projected.dim() != hypothesis.vector.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "projected dim " + std::to_string(projected.dim()) + " != hypothesis dim " +
                    std::to_string(hypothesis.vector.size()));
  }
  const std::span<const double> h(hypothesis.vector);
  std::vector<double> scores(projected.rows());
  for (std::size_t i = 0; i < projected.rows(); ++i) {
    scores[i] = Similarity(projected.row(i), h, mode);
  }
  return scores;
}

TauPolicy TauPolicy::Parse(const std::string& spec) {
  TauPolicy p;
  auto number = [&](const std::string& text) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigError, "bad tau policy '" + spec + "'");
    }
  };
  if (spec == "median") {
    p.kind = Kind::kMedian;
    p.value = 50.0;
  } else if (spec.rfind("percentile:", 0) == 0) {
    p.kind = Kind::kPercentile;
    p.value = number(spec.substr(11));
    if (p.value < 0.0 || p.value > 100.0) {
      throw Error(ErrorCode::kConfigError, "percentile must lie in [0, 100]");
    }
  } else if (spec.rfind("fixed:", 0) == 0) {
    p.kind = Kind::kFixed;
    p.value = number(spec.substr(6));
  } else {
    throw Error(ErrorCode::kConfigError,
                "tau policy must be median, percentile:<p> or fixed:<v>, got '" + spec + "'");
  }
  return p;
}

std::string TauPolicy::ToString() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kMedian: return "median";
    case Kind::kPercentile: os << "percentile:" << value; return os.str();
    case Kind::kFixed: os << "fixed:" << value; return os.str();
  }
  return "median";
}

double Percentile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::kEmptySet, "percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

double ResolveTau(const TauPolicy& policy, const std::vector<double>& class_scores) {
  switch (policy.kind) {
    case TauPolicy::Kind::kFixed: return policy.value;
    case TauPolicy::Kind::kMedian: return Percentile(class_scores, 50.0);
    case TauPolicy::Kind::kPercentile: return Percentile(class_scores, policy.value);
  }
  return 0.0;
}

std::vector<std::size_t> ExtractSlice(const std::vector<double>& scores,
                                      const SliceDataset& dataset, int class_label, double tau) {
  if (scores.size() != dataset.size()) {
    throw Error(ErrorCode::kInvalidArgument, "scores length does not match dataset size");
  }
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset.samples[i].label == class_label && scores[i] < tau) members.push_back(i);
  }
  return members;
}

std::vector<std::size_t> SliceReport::RankedMembers() const {
  std::vector<std::size_t> ranked = members;
  if (scores.empty()) return ranked;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  return ranked;
}

std::vector<SliceReport> DetectErrorSlices(const SliceDataset& dataset,
                                           const EmbeddingMatrix& projected,
                                           const HypothesisSet& hyps, TextEmbedder& embedder,
                                           const SliceConfig& config) {
  const int class_label = hyps.class_label;
  const auto class_rows = dataset.ClassMembers(class_label);
  if (class_rows.empty()) {
    throw Error(ErrorCode::kEmptySet, "class " + std::to_string(class_label) + " has no samples");
  }
  if (hyps.hypotheses.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no hypotheses to test");
  }
  const double class_error = ClassErrorRate(dataset, class_label);
  const std::size_t n_hyp = std::min(hyps.hypotheses.size(), config.max_hypotheses);

  std::vector<SliceReport> reports;
  reports.reserve(n_hyp);
  for (std::size_t h = 0; h < n_hyp; ++h) {
    const Hypothesis& hyp = hyps.hypotheses[h];
    const auto embedding = MakeHypothesisEmbedding(
        hyp, embedder, config.similarity, QualifiedHypothesisId(class_label, hyp.id));
    SliceReport r;
    r.class_label = class_label;
    r.hypothesis_id = embedding.hypothesis_id;
    r.attribute = hyp.attribute;
    r.statement = hyp.statement;
    r.scores = ScoreHypothesis(projected, embedding, config.similarity);
    std::vector<double> class_scores;
    class_scores.reserve(class_rows.size());
    for (std::size_t i : class_rows) class_scores.push_back(r.scores[i]);
    r.threshold = ResolveTau(config.tau, class_scores);
    r.members = ExtractSlice(r.scores, dataset, class_label, r.threshold);
    r.class_size = class_rows.size();
    r.class_error = class_error;
    if (!r.members.empty()) {
      r.slice_error = ClassErrorRate(dataset, class_label, std::span<const std::size_t>(r.members));
    }
    r.gap = r.slice_error - r.class_error;
    r.is_error_slice = !r.members.empty() && r.gap >= config.gap_threshold;
    reports.push_back(std::move(r));
  }
  std::stable_sort(reports.begin(), reports.end(), [](const SliceReport& a, const SliceReport& b) {
    if (a.gap != b.gap) return a.gap > b.gap;
    return a.hypothesis_id < b.hypothesis_id;
  });
  return reports;
}

nlohmann::json SliceReportToJson(const SliceReport& report, const SliceDataset& dataset,
                                 bool include_scores) {
  nlohmann::json members = nlohmann::json::array();
  for (std::size_t i : report.RankedMembers()) members.push_back(dataset.samples.at(i).id);
  std::size_t present = 0, present_correct = 0;
  {
    std::vector<bool> in_slice(dataset.size(), false);
    for (std::size_t i : report.members) in_slice[i] = true;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const auto& s = dataset.samples[i];
      if (s.label != report.class_label || in_slice[i]) continue;
      ++present;
      if (s.correct()) ++present_correct;
    }
  }
  nlohmann::json out = {
      {"class", report.class_label},
      {"class_name", dataset.classes.at(static_cast<std::size_t>(report.class_label))},
      {"hypothesis_id", report.hypothesis_id},
      {"attribute", report.attribute},
      {"statement", report.statement},
      {"threshold", report.threshold},
      {"members", members},
      {"slice_size", report.members.size()},
      {"class_size", report.class_size},
      {"slice_error", report.slice_error},
      {"class_error", report.class_error},
      {"gap", report.gap},
      {"is_error_slice", report.is_error_slice},
      {"accuracy_absent", report.members.empty() ? nullptr : nlohmann::json(1.0 - report.slice_error)},
      {"accuracy_present",
       present == 0 ? nullptr
                    : nlohmann::json(static_cast<double>(present_correct) /
                                                   static_cast<double>(present))},
  };
  if (include_scores) out["scores"] = report.scores;
  return out;
}

SliceReport SliceReportFromJson(const nlohmann::json& value, const SliceDataset& dataset) {
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < dataset.size(); ++i) row_of.emplace(dataset.samples[i].id, i);
  SliceReport r;
  try {
    r.class_label = value.at("class").get<int>();
    r.hypothesis_id = value.at("hypothesis_id").get<std::string>();
    r.attribute = value.value("attribute", std::string());
    r.statement = value.value("statement", std::string());
    r.threshold = value.at("threshold").get<double>();
    r.class_size = value.at("class_size").get<std::size_t>();
    r.slice_error = value.at("slice_error").get<double>();
    r.class_error = value.at("class_error").get<double>();
    r.gap = value.at("gap").get<double>();
    r.is_error_slice = value.at("is_error_slice").get<bool>();
    for (const auto& id : value.at("members")) {
      auto it = row_of.find(id.get<std::string>());
      if (it == row_of.end()) {
        throw Error(ErrorCode::kParseError,
                    "slice member '" + id.get<std::string>() + "' not in dataset");
      }
      r.members.push_back(it->second);
    }
    if (value.contains("scores")) r.scores = value["scores"].get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("bad slice report: ") + e.what());
  }
  return r;
}

}  // namespace ladder
