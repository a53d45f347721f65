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

#ifndef LADDER_PIPELINE_HPP_
#define LADDER_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "ladder/llm_client.hpp"
#include "ladder/similarity.hpp"
#include "ladder/slicer.hpp"

namespace ladder {

enum class Stage { kSynth, kFitProjection, kDiscover, kSlices, kMitigate, kEval, kReport, kValidate };

std::string StageName(Stage stage);
Stage ParseStage(const std::string& name);  // throws ConfigError

struct RunPaths {
  // A synthbench output directory; fills any unset input below from its
  // standard layout.
  std::filesystem::path data;
  std::filesystem::path train;  // manifest.json
  std::filesystem::path val;
  std::filesystem::path test;
  std::filesystem::path corpus;             // corpus.jsonl
  std::filesystem::path corpus_embeddings;  // .ladremb
  std::filesystem::path gt_slices;
  std::filesystem::path synth_config;
  std::filesystem::path work_dir = "ladder_out";
  std::filesystem::path out;  // synth output dir or report file
  std::vector<std::filesystem::path> manifests;  // extra inputs for validate
};

struct EmbedderSettings {
  std::string kind = "lookup";  // "lookup" or "remote"
  HttpSettings http;
  std::string model;
};

struct RunConfig {
  SimilarityMode similarity = SimilarityMode::kCosine;
  std::size_t topk = 0;  // 0: natural/medical default
  TauPolicy tau;
  double gap_threshold = kDefaultGapThreshold;
  std::size_t max_hypotheses = kDefaultMaxHypotheses;
  std::string calibration = "zscore";
  double l2 = 1e-2;
  double ridge = 1e-4;
  std::uint64_t seed = 0;
  std::string task = "shape";
  std::string modality = "images";
  bool medical = false;
  bool dump_scores = false;
  std::string group_key;  // empty: synthbench key when known, else "bias_aligned"
  std::size_t precision_k = 10;
  LlmRequest llm;
  EmbedderSettings embedder;
  RunPaths paths;

  std::size_t EffectiveTopK() const;
  // Fills unset paths from paths.data.
  void ResolveDataDir();

  nlohmann::json ToJson() const;
  // Path-free view recorded inside artifacts so reruns in another
  // directory stay byte-identical.
  nlohmann::json Echo() const;
  static RunConfig FromJson(const nlohmann::json& value);  // throws ConfigError
};

// Runs one stage and returns its summary. Appends a line to
// <work_dir>/run_log.jsonl (the synth output dir for `synth`) whether the
// stage succeeds or fails. Domain failures surface as ladder::Error.
nlohmann::json RunStage(Stage stage, const RunConfig& config);

// Markdown report from parsed slices.json and metrics.json contents.
std::string RenderReport(const nlohmann::json& slices, const nlohmann::json& metrics);
void RenderReportFile(const std::filesystem::path& slices_json,
                      const std::filesystem::path& metrics_json,
                      const std::filesystem::path& out);

}  // namespace ladder

#endif  // LADDER_PIPELINE_HPP_
