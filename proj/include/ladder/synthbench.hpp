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

#ifndef LADDER_SYNTHBENCH_HPP_
#define LADDER_SYNTHBENCH_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "ladder/corpus.hpp"
#include "ladder/metrics.hpp"
#include "ladder/retrieval.hpp"
#include "ladder/similarity.hpp"

namespace ladder {

// One planted spurious direction. `fraction` is the probability that a
// training sample carries the class-aligned side; validation uses
// `val_fraction` and test is always balanced.
struct BiasSpec {
  double fraction = 0.95;
  double strength = 2.0;
  double val_fraction = 0.5;
  // Per-sample expression multiplier drawn from U(1 - spread, 1 + spread).
  double spread = 0.0;
};

struct SynthConfig {
  std::size_t n_train = 4000;
  std::size_t n_val = 2000;
  std::size_t n_test = 6000;
  std::size_t d_phi = 48;
  std::size_t d_psi = 32;
  std::size_t n_classes = 2;
  std::vector<BiasSpec> biases = {BiasSpec{}};
  double signal_strength = 1.0;
  double noise_sigma = 0.25;
  double phi_noise = 0.05;
  double p_aligned = 0.98;
  double p_conflicting = 0.55;
  std::size_t n_distractor_sentences = 300;
  std::size_t sentences_per_attribute = 20;
  std::size_t sentences_per_class = 10;
  double sentence_jitter = 0.3;
  std::uint64_t seed = 0;

  // Discovery settings the mock responses are keyed against.
  std::string task = "shape";
  std::string modality = "images";
  std::size_t topk = kDefaultTopKNatural;
  SimilarityMode similarity = SimilarityMode::kCosine;
  double ridge = 1e-4;

  // Throws ConfigError.
  void Validate() const;
  nlohmann::json ToJson() const;
  // Unknown keys are rejected. "bias_fraction", "bias_strength",
  // "val_bias_fraction" and "bias_spread" are shorthands for a single bias.
  static SynthConfig FromJson(const nlohmann::json& value);
};

struct SynthBundle {
  SynthConfig config;
  SliceDataset train;
  SliceDataset val;
  SliceDataset test;
  TextCorpus corpus;
  GroundTruthSlices gt_slices;            // on the validation split
  std::vector<int> gt_slice_classes;
  std::map<std::string, std::string> mock_responses;  // prompt sha256 -> response
  nlohmann::json analytic;
};

// Tag carrying "aligned on every planted bias"; per-bias tags are
// "bias<k>_aligned" (1-based) when more than one bias is planted.
inline constexpr char kBiasAlignedTag[] = "bias_aligned";
std::string BiasTag(std::size_t bias_index);
// Group key covering every planted bias: "bias_aligned" for one bias,
// "bias1_aligned,bias2_aligned" for two.
std::string SynthGroupKey(const SynthConfig& config);

SynthBundle GenerateSynth(const SynthConfig& config);

// train/ val/ test/ dataset directories, corpus.jsonl, corpus.ladremb,
// mock_responses.jsonl, gt_slices.json, analytic.json, synth_config.json.
void SaveSynthBundle(const SynthBundle& bundle, const std::filesystem::path& directory);

nlohmann::json GroundTruthToJson(const GroundTruthSlices& gt, const std::vector<int>& classes,
                                 const SliceDataset& dataset);
GroundTruthSlices GroundTruthFromJson(const nlohmann::json& value, const SliceDataset& dataset);

struct OracleReport {
  GroundTruthSlices true_slices;
  double analytic_erm_wga = 0.0;
  double analytic_erm_mean = 0.0;
  double erm_wga = 0.0;   // simulated predictions on test
  double erm_mean = 0.0;
  double balanced_head_wga = 0.0;  // head trained on ground-truth-balanced val
  double balanced_head_mean = 0.0;
  std::string group_key;

  nlohmann::json ToJson() const;
};

OracleReport MakeOracleReport(const SynthBundle& bundle, double l2 = 1e-2);

}  // namespace ladder

#endif  // LADDER_SYNTHBENCH_HPP_
