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

#include "ladder/synthbench.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>

#include "io_util.hpp"
#include "ladder/error.hpp"
#include "ladder/hypothesis.hpp"
#include "ladder/llm_client.hpp"
#include "ladder/mitigator.hpp"
#include "ladder/projection.hpp"
#include "rng.hpp"

namespace ladder {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kMaxBiases = 2;
constexpr std::size_t kTestSentencesPerHypothesis = 5;

const char* const kClassNames[] = {"square", "circle", "triangle", "star", "hexagon"};

struct AttributeSide {
  std::string slug;
  std::string phrase;
  std::vector<std::string> subjects;
  std::vector<std::string> predicates;
};

// [bias][side] with side 0 = negative direction, 1 = positive direction.
const AttributeSide kAttributes[kMaxBiases][2] = {
    {{"yellow_box_right_of_red_box",
      "the yellow box to the right of the red box",
      {"the yellow box", "a yellow square marker", "the small yellow block", "a yellow patch",
       "the yellow tile"},
      {"sits to the right of the red box", "is placed right of the red box",
       "appears on the right side of the red box", "is positioned to the right of the red block"}},
     {"yellow_box_left_of_red_box",
      "the yellow box to the left of the red box",
      {"the yellow box", "a yellow square marker", "the small yellow block", "a yellow patch",
       "the yellow tile"},
      {"sits to the left of the red box", "is placed left of the red box",
       "appears on the left side of the red box", "is positioned to the left of the red block"}}},
    {{"green_background",
      "a green background",
      {"the background", "the scene backdrop", "the image background", "the canvas",
       "the surrounding area"},
      {"is painted green", "has a green tint", "is a flat green color", "looks mostly green"}},
     {"blue_background",
      "a blue background",
      {"the background", "the scene backdrop", "the image background", "the canvas",
       "the surrounding area"},
      {"is painted blue", "has a blue tint", "is a flat blue color", "looks mostly blue"}}}};

const char* const kClassTemplates[] = {
    "a photo of a {}",       "an image showing a {}",   "a drawing of a single {}",
    "a {} shape in the center", "the main object is a {}", "a clear {} outline",
    "a large {}",            "a small {}",              "a bold {} figure",
    "one {} on the canvas"};

const char* const kDistractorHeads[] = {"a blurry photo of", "a close-up of", "a sketch of",
                                        "a picture of",      "a cropped view of",
                                        "a dim shot of"};
const char* const kDistractorNouns[] = {"a tree", "a car",  "a dog", "a lamp",    "a chair",
                                        "a river", "a cup", "a bicycle", "a bird", "a cloud"};
const char* const kDistractorTails[] = {"at night",  "in the rain",  "on a table",
                                        "near a wall", "in a park", "under bright light"};

std::string Fill(const std::string& pattern, const std::string& value) {
  std::string out = pattern;
  const auto pos = out.find("{}");
  if (pos != std::string::npos) out.replace(pos, 2, value);
  return out;
}

std::string ClassName(std::size_t c) {
  if (c < std::size(kClassNames)) return kClassNames[c];
  return "class_" + std::to_string(c);
}

// +1 for odd classes, -1 for even ones.
int AlignedSign(int label) { return (label % 2 == 1) ? 1 : -1; }

std::string PaddedId(const std::string& prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*zu", width, i);
  return prefix + buf;
}

std::vector<std::string> SideSentences(const AttributeSide& side, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; out.size() < count; ++i) {
    const std::size_t combos = side.subjects.size() * side.predicates.size();
    const std::size_t j = i % combos;
    std::string text = side.subjects[j % side.subjects.size()] + " " +
                       side.predicates[j / side.subjects.size()];
    if (i >= combos) text += " (" + std::to_string(i / combos + 1) + ")";
    out.push_back(std::move(text));
  }
  return out;
}

std::vector<std::string> ClassSentences(std::size_t c, std::size_t count) {
  std::vector<std::string> out;
  const std::size_t n = std::size(kClassTemplates);
  for (std::size_t i = 0; i < count; ++i) {
    std::string text = Fill(kClassTemplates[i % n], ClassName(c));
    if (i >= n) text += " (" + std::to_string(i / n + 1) + ")";
    out.push_back(std::move(text));
  }
  return out;
}

std::vector<std::string> DistractorSentences(std::size_t count, internal::Rng& rng) {
  std::vector<std::string> pool;
  for (const char* h : kDistractorHeads) {
    for (const char* n : kDistractorNouns) {
      for (const char* t : kDistractorTails) {
        pool.push_back(std::string(h) + " " + n + " " + t);
      }
    }
  }
  for (std::size_t i = pool.size(); i > 1; --i) {
    std::swap(pool[i - 1], pool[rng.Below(i)]);
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::string text = pool[i % pool.size()];
    if (i >= pool.size()) text += " (" + std::to_string(i / pool.size() + 1) + ")";
    out.push_back(std::move(text));
  }
  return out;
}

std::vector<double> NoisyUnit(const Eigen::VectorXd& center, double jitter, internal::Rng& rng) {
  const Eigen::Index d = center.size();
  Eigen::VectorXd v = center;
  const double scale = jitter / std::sqrt(static_cast<double>(d));
  for (Eigen::Index j = 0; j < d; ++j) v(j) += scale * rng.Normal();
  const double n = v.norm();
  std::vector<double> out(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) out[static_cast<std::size_t>(j)] = n > 0 ? v(j) / n : 0.0;
  return out;
}

double Retention(const SynthConfig& config, const BiasSpec& bias) {
  const double rho = std::erf(bias.strength / (config.noise_sigma * std::sqrt(2.0)));
  return 1.0 - rho * (1.0 - config.p_conflicting / config.p_aligned);
}

struct Geometry {
  Eigen::MatrixXd class_dirs;  // d_psi x C
  Eigen::MatrixXd bias_dirs;   // d_psi x K
  Eigen::MatrixXd mixing;      // d_phi x d_psi
};

Geometry MakeGeometry(const SynthConfig& config, internal::Rng& rng) {
  const Eigen::Index d = static_cast<Eigen::Index>(config.d_psi);
  const Eigen::Index c = static_cast<Eigen::Index>(config.n_classes);
  const Eigen::Index k = static_cast<Eigen::Index>(config.biases.size());
  Eigen::MatrixXd g(d, c + k);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.Normal();
  }
  // Modified Gram-Schmidt keeps the construction explicit and sign-stable.
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index p = 0; p < j; ++p) g.col(j) -= g.col(p).dot(g.col(j)) * g.col(p);
    g.col(j).normalize();
  }
  Geometry geo;
  geo.class_dirs = g.leftCols(c);
  geo.bias_dirs = g.rightCols(k);
  geo.mixing.resize(static_cast<Eigen::Index>(config.d_phi), d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(config.d_psi));
  for (Eigen::Index i = 0; i < geo.mixing.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) geo.mixing(i, j) = scale * rng.Normal();
  }
  return geo;
}

SliceDataset MakeSplit(const SynthConfig& config, const Geometry& geo, Split split,
                       std::size_t n, internal::Rng& rng) {
  const std::size_t k_biases = config.biases.size();
  SliceDataset ds;
  ds.name = "synthbench";
  for (std::size_t c = 0; c < config.n_classes; ++c) ds.classes.push_back(ClassName(c));
  ds.split = split;
  ds.features = EmbeddingMatrix(n, config.d_phi);
  EmbeddingMatrix vlr(n, config.d_psi);
  std::vector<double> retention;
  for (const auto& b : config.biases) retention.push_back(Retention(config, b));

  const std::string prefix = SplitName(split) + "-";
  const Eigen::Index d = static_cast<Eigen::Index>(config.d_psi);
  for (std::size_t i = 0; i < n; ++i) {
    SampleRecord s;
    s.id = PaddedId(prefix, i, 6);
    s.label = static_cast<int>(rng.Below(config.n_classes));
    Eigen::VectorXd psi = config.signal_strength * geo.class_dirs.col(s.label);
    bool all_aligned = true;
    double p_correct = config.p_aligned;
    for (std::size_t k = 0; k < k_biases; ++k) {
      const BiasSpec& b = config.biases[k];
      const double fraction = split == Split::kTrain        ? b.fraction
                              : split == Split::kValidation ? b.val_fraction
                                                            : 0.5;
      const bool aligned = rng.Bernoulli(fraction);
      const double m = b.spread > 0.0 ? rng.Uniform(1.0 - b.spread, 1.0 + b.spread) : 1.0;
      const int sign = aligned ? AlignedSign(s.label) : -AlignedSign(s.label);
      psi += sign * b.strength * m * geo.bias_dirs.col(static_cast<Eigen::Index>(k));
      all_aligned = all_aligned && aligned;
      if (!aligned) p_correct *= retention[k];
      if (k_biases > 1) s.groups[BiasTag(k)] = aligned ? 1 : 0;
    }
    s.groups[kBiasAlignedTag] = all_aligned ? 1 : 0;
    for (Eigen::Index j = 0; j < d; ++j) psi(j) += config.noise_sigma * rng.Normal();
    Eigen::VectorXd phi = geo.mixing * psi;
    for (Eigen::Index j = 0; j < phi.size(); ++j) phi(j) += config.phi_noise * rng.Normal();

    if (rng.Bernoulli(p_correct)) {
      s.prediction = s.label;
    } else if (config.n_classes == 2) {
      s.prediction = 1 - s.label;
    } else {
      const int shift = 1 + static_cast<int>(rng.Below(config.n_classes - 1));
      s.prediction = (s.label + shift) % static_cast<int>(config.n_classes);
    }
    for (std::size_t j = 0; j < config.d_psi; ++j) vlr.at(i, j) = static_cast<float>(psi(j));
    for (std::size_t j = 0; j < config.d_phi; ++j) {
      ds.features.at(i, j) = static_cast<float>(phi(j));
    }
    ds.samples.push_back(std::move(s));
  }
  ds.vlr_image = std::move(vlr);
  return ds;
}

struct CorpusPlan {
  TextCorpus corpus;
  // [bias][side] sentence texts in generation order; [class] likewise.
  std::vector<std::vector<std::string>> attribute_texts[2];
  std::vector<std::vector<std::string>> class_texts;
};

CorpusPlan MakeCorpus(const SynthConfig& config, const Geometry& geo, internal::Rng& rng) {
  struct Entry {
    std::string text;
    std::vector<double> embedding;
  };
  std::vector<Entry> entries;
  CorpusPlan plan;
  for (int side = 0; side < 2; ++side) plan.attribute_texts[side].resize(config.biases.size());
  for (std::size_t k = 0; k < config.biases.size(); ++k) {
    for (int side = 0; side < 2; ++side) {
      const Eigen::VectorXd center =
          (side == 1 ? 1.0 : -1.0) * geo.bias_dirs.col(static_cast<Eigen::Index>(k));
      auto texts = SideSentences(kAttributes[k][side], config.sentences_per_attribute);
      for (const auto& t : texts) entries.push_back({t, NoisyUnit(center, config.sentence_jitter, rng)});
      plan.attribute_texts[side][k] = std::move(texts);
    }
  }
  for (std::size_t c = 0; c < config.n_classes; ++c) {
    auto texts = ClassSentences(c, config.sentences_per_class);
    const Eigen::VectorXd center = geo.class_dirs.col(static_cast<Eigen::Index>(c));
    for (const auto& t : texts) entries.push_back({t, NoisyUnit(center, config.sentence_jitter, rng)});
    plan.class_texts.push_back(std::move(texts));
  }
  for (auto& t : DistractorSentences(config.n_distractor_sentences, rng)) {
    entries.push_back({std::move(t), NoisyUnit(Eigen::VectorXd::Zero(
                                                   static_cast<Eigen::Index>(config.d_psi)),
                                               1.0, rng)});
  }
  for (std::size_t i = entries.size(); i > 1; --i) {
    std::swap(entries[i - 1], entries[rng.Below(i)]);
  }
  plan.corpus.embeddings = EmbeddingMatrix(entries.size(), config.d_psi);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    plan.corpus.sentences.push_back({PaddedId("s", i, 5), entries[i].text});
    for (std::size_t j = 0; j < config.d_psi; ++j) {
      plan.corpus.embeddings.at(i, j) = static_cast<float>(entries[i].embedding[j]);
    }
  }
  return plan;
}

std::vector<Hypothesis> MockHypotheses(const SynthConfig& config, const CorpusPlan& plan,
                                       int class_label) {
  std::vector<Hypothesis> hyps;
  const std::string cls = ClassName(static_cast<std::size_t>(class_label));
  const int side = AlignedSign(class_label) > 0 ? 1 : 0;
  auto first_n = [](const std::vector<std::string>& texts) {
    return std::vector<std::string>(
        texts.begin(),
        texts.begin() + static_cast<std::ptrdiff_t>(std::min(texts.size(),
                                                             kTestSentencesPerHypothesis)));
  };
  for (std::size_t k = 0; k < config.biases.size(); ++k) {
    const AttributeSide& attr = kAttributes[k][side];
    hyps.push_back({"H" + std::to_string(k + 1), attr.slug,
                    "The classifier may be relying on " + attr.phrase + " to recognise a " + cls +
                        "; " + cls + " images without " + attr.phrase + " are misclassified.",
                    first_n(plan.attribute_texts[side][k])});
  }
  hyps.push_back({"H" + std::to_string(config.biases.size() + 1), cls + "_outline",
                  "The classifier may miss a " + cls + " whose outline is faint.",
                  first_n(plan.class_texts[static_cast<std::size_t>(class_label)])});
  return hyps;
}

std::string WrapResponse(const std::vector<Hypothesis>& hyps) {
  return "Based on the sentence list, here are the hypotheses:\n\n```python\n" +
         RenderLlmResponse(hyps) + "```\n";
}

}  // namespace

std::string BiasTag(std::size_t bias_index) {
  return "bias" + std::to_string(bias_index + 1) + "_aligned";
}

std::string SynthGroupKey(const SynthConfig& config) {
  if (config.biases.size() <= 1) return kBiasAlignedTag;
  std::string key;
  for (std::size_t k = 0; k < config.biases.size(); ++k) {
    if (k) key += ",";
    key += BiasTag(k);
  }
  return key;
}

void SynthConfig::Validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kConfigError, msg); };
  if (n_train == 0 || n_val == 0 || n_test == 0) fail("split sizes must be positive");
  if (n_classes < 2) fail("n_classes must be at least 2");
  if (biases.empty() || biases.size() > kMaxBiases) fail("between 1 and 2 biases are supported");
  if (d_psi < n_classes + biases.size()) fail("d_psi too small for the planted directions");
  if (d_phi == 0) fail("d_phi must be positive");
  for (const auto& b : biases) {
    if (!(b.fraction > 0.5 && b.fraction <= 1.0)) fail("bias fraction must lie in (0.5, 1]");
    if (!(b.val_fraction >= 0.0 && b.val_fraction <= 1.0)) fail("val fraction must lie in [0, 1]");
    if (!(b.strength >= 0.0) || !std::isfinite(b.strength)) fail("bias strength must be >= 0");
    if (!(b.spread >= 0.0 && b.spread < 1.0)) fail("bias spread must lie in [0, 1)");
  }
  if (!(signal_strength > 0.0) || !std::isfinite(signal_strength)) fail("signal_strength must be > 0");
  if (!(noise_sigma > 0.0) || !std::isfinite(noise_sigma)) fail("noise_sigma must be > 0");
  if (!(phi_noise >= 0.0) || !std::isfinite(phi_noise)) fail("phi_noise must be >= 0");
  if (!(p_aligned > 0.0 && p_aligned <= 1.0)) fail("p_aligned must lie in (0, 1]");
  if (!(p_conflicting > 0.0 && p_conflicting <= p_aligned)) {
    fail("p_conflicting must lie in (0, p_aligned]");
  }
  if (sentences_per_attribute < kTestSentencesPerHypothesis ||
      sentences_per_class < kTestSentencesPerHypothesis) {
    fail("at least 5 sentences per attribute and class are required");
  }
  if (!(sentence_jitter >= 0.0)) fail("sentence_jitter must be >= 0");
  if (topk == 0) fail("topk must be positive");
  if (!(ridge >= 0.0)) fail("ridge must be >= 0");
}

json SynthConfig::ToJson() const {
  json biases_json = json::array();
  for (const auto& b : biases) {
    biases_json.push_back({{"fraction", b.fraction},
                           {"strength", b.strength},
                           {"val_fraction", b.val_fraction},
                           {"spread", b.spread}});
  }
  return {{"n_train", n_train},
          {"n_val", n_val},
          {"n_test", n_test},
          {"d_phi", d_phi},
          {"d_psi", d_psi},
          {"n_classes", n_classes},
          {"biases", biases_json},
          {"signal_strength", signal_strength},
          {"noise_sigma", noise_sigma},
          {"phi_noise", phi_noise},
          {"p_aligned", p_aligned},
          {"p_conflicting", p_conflicting},
          {"n_distractor_sentences", n_distractor_sentences},
          {"sentences_per_attribute", sentences_per_attribute},
          {"sentences_per_class", sentences_per_class},
          {"sentence_jitter", sentence_jitter},
          {"seed", seed},
          {"task", task},
          {"modality", modality},
          {"topk", topk},
          {"similarity", SimilarityModeName(similarity)},
          {"ridge", ridge}};
}

SynthConfig SynthConfig::FromJson(const json& value) {
  if (!value.is_object()) throw Error(ErrorCode::kConfigError, "synth config must be an object");
  SynthConfig c;
  static const std::set<std::string> kShorthands = {"bias_fraction", "bias_strength",
                                                    "val_bias_fraction", "bias_spread"};
  const json defaults = c.ToJson();
  try {
    for (const auto& [key, v] : value.items()) {
      if (!defaults.contains(key) && !kShorthands.count(key)) {
        throw Error(ErrorCode::kConfigError, "unknown synth config key '" + key + "'");
      }
    }
    auto get = [&](const char* key, auto& field) {
      if (value.contains(key)) field = value.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("n_train", c.n_train);
    get("n_val", c.n_val);
    get("n_test", c.n_test);
    get("d_phi", c.d_phi);
    get("d_psi", c.d_psi);
    get("n_classes", c.n_classes);
    get("signal_strength", c.signal_strength);
    get("noise_sigma", c.noise_sigma);
    get("phi_noise", c.phi_noise);
    get("p_aligned", c.p_aligned);
    get("p_conflicting", c.p_conflicting);
    get("n_distractor_sentences", c.n_distractor_sentences);
    get("sentences_per_attribute", c.sentences_per_attribute);
    get("sentences_per_class", c.sentences_per_class);
    get("sentence_jitter", c.sentence_jitter);
    get("seed", c.seed);
    get("task", c.task);
    get("modality", c.modality);
    get("topk", c.topk);
    get("ridge", c.ridge);
    if (value.contains("similarity")) {
      c.similarity = ParseSimilarityMode(value.at("similarity").get<std::string>());
    }
    if (value.contains("biases")) {
      c.biases.clear();
      for (const auto& b : value.at("biases")) {
        BiasSpec spec;
        for (const auto& [key, v] : b.items()) {
          if (key != "fraction" && key != "strength" && key != "val_fraction" && key != "spread") {
            throw Error(ErrorCode::kConfigError, "unknown bias key '" + key + "'");
          }
        }
        spec.fraction = b.value("fraction", spec.fraction);
        spec.strength = b.value("strength", spec.strength);
        spec.val_fraction = b.value("val_fraction", spec.val_fraction);
        spec.spread = b.value("spread", spec.spread);
        c.biases.push_back(spec);
      }
    }
    for (const auto& key : kShorthands) {
      if (!value.contains(key)) continue;
      if (c.biases.size() != 1) {
        throw Error(ErrorCode::kConfigError, "'" + key + "' applies to a single bias only");
      }
      const double v = value.at(key).get<double>();
      if (key == "bias_fraction") c.biases[0].fraction = v;
      if (key == "bias_strength") c.biases[0].strength = v;
      if (key == "val_bias_fraction") c.biases[0].val_fraction = v;
      if (key == "bias_spread") c.biases[0].spread = v;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("bad synth config: ") + e.what());
  }
  c.Validate();
  return c;
}

SynthBundle GenerateSynth(const SynthConfig& config) {
  config.Validate();
  internal::Rng rng(config.seed);
  SynthBundle bundle;
  bundle.config = config;
  const Geometry geo = MakeGeometry(config, rng);
  const CorpusPlan plan = MakeCorpus(config, geo, rng);
  bundle.corpus = plan.corpus;
  bundle.train = MakeSplit(config, geo, Split::kTrain, config.n_train, rng);
  bundle.val = MakeSplit(config, geo, Split::kValidation, config.n_val, rng);
  bundle.test = MakeSplit(config, geo, Split::kTest, config.n_test, rng);

  // Ground truth: conflicting members per class and bias on the validation split.
  for (std::size_t c = 0; c < config.n_classes; ++c) {
    for (std::size_t k = 0; k < config.biases.size(); ++k) {
      const std::string tag = config.biases.size() > 1 ? BiasTag(k) : kBiasAlignedTag;
      GroundTruthSlices::Slice slice;
      slice.name = "class=" + ClassName(c) + "," + tag + "=0";
      for (std::size_t i = 0; i < bundle.val.size(); ++i) {
        const auto& s = bundle.val.samples[i];
        if (s.label == static_cast<int>(c) && s.groups.at(tag) == 0) slice.members.push_back(i);
      }
      if (slice.members.empty()) continue;
      bundle.gt_slices.slices.push_back(std::move(slice));
      bundle.gt_slice_classes.push_back(static_cast<int>(c));
    }
  }

  // Mock responses keyed by the prompts the discovery stage will build.
  const AffineProjector projector =
      FitProjection(bundle.train.features, *bundle.train.vlr_image, config.ridge);
  const EmbeddingMatrix projected = Project(projector, bundle.val.features);
  std::size_t collisions = 0;
  json degenerate = json::array();
  for (std::size_t c = 0; c < config.n_classes; ++c) {
    DeltaVector delta;
    try {
      delta = MeanDifference(projected, bundle.val, static_cast<int>(c));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateClass) throw;
      degenerate.push_back(static_cast<int>(c));
      continue;
    }
    const auto top = RetrieveTopK(delta, bundle.corpus, config.topk, config.similarity);
    std::vector<std::string> texts;
    for (const auto& r : top) texts.push_back(r.text);
    const std::string prompt = BuildPrompt(config.task, config.modality, texts, texts.size(), false);
    const std::string response = WrapResponse(MockHypotheses(config, plan, static_cast<int>(c)));
    if (!bundle.mock_responses.emplace(PromptHash(prompt), response).second) ++collisions;
  }

  json retention = json::array();
  double all_conflicting = config.p_aligned;
  double test_mean = config.p_aligned;
  for (const auto& b : config.biases) {
    const double r = Retention(config, b);
    retention.push_back(r);
    all_conflicting *= r;
    test_mean *= 0.5 + 0.5 * r;
  }
  bundle.analytic = {{"p_aligned_eff", config.p_aligned},
                     {"p_conflicting_eff", config.p_aligned * Retention(config, config.biases[0])},
                     {"retention", retention},
                     {"expected_erm_wga", all_conflicting},
                     {"expected_erm_mean_accuracy_test", test_mean},
                     {"group_key", SynthGroupKey(config)},
                     {"mock_hash_collisions", collisions},
                     {"degenerate_classes", degenerate}};
  return bundle;
}

json GroundTruthToJson(const GroundTruthSlices& gt, const std::vector<int>& classes,
                       const SliceDataset& dataset) {
  json slices = json::array();
  for (std::size_t i = 0; i < gt.slices.size(); ++i) {
    json ids = json::array();
    for (std::size_t r : gt.slices[i].members) ids.push_back(dataset.samples.at(r).id);
    json entry = {{"name", gt.slices[i].name}, {"member_ids", ids}};
    if (i < classes.size()) entry["class"] = classes[i];
    slices.push_back(std::move(entry));
  }
  return {{"split", SplitName(dataset.split)}, {"slices", slices}};
}

GroundTruthSlices GroundTruthFromJson(const json& value, const SliceDataset& dataset) {
  std::map<std::string, std::size_t> rows;
  for (std::size_t i = 0; i < dataset.size(); ++i) rows[dataset.samples[i].id] = i;
  GroundTruthSlices gt;
  try {
    for (const auto& s : value.at("slices")) {
      GroundTruthSlices::Slice slice;
      slice.name = s.at("name").get<std::string>();
      for (const auto& id : s.at("member_ids")) {
        const auto it = rows.find(id.get<std::string>());
        if (it == rows.end()) {
          throw Error(ErrorCode::kParseError, "ground-truth id '" + id.get<std::string>() +
                                                  "' is not in the dataset");
        }
        slice.members.push_back(it->second);
      }
      if (slice.members.empty()) {
        throw Error(ErrorCode::kEmptyGroundTruth, "ground-truth slice '" + slice.name + "' is empty");
      }
      gt.slices.push_back(std::move(slice));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("malformed ground truth: ") + e.what());
  }
  if (gt.slices.empty()) throw Error(ErrorCode::kEmptyGroundTruth, "no ground-truth slices");
  return gt;
}

void SaveSynthBundle(const SynthBundle& bundle, const fs::path& directory) {
  fs::create_directories(directory);
  SaveDataset(bundle.train, directory / "train");
  SaveDataset(bundle.val, directory / "val");
  SaveDataset(bundle.test, directory / "test");
  SaveTextCorpus(bundle.corpus, directory / "corpus.jsonl", directory / "corpus.ladremb");
  std::vector<json> lines;
  for (const auto& [hash, response] : bundle.mock_responses) {
    lines.push_back({{"prompt_sha256", hash}, {"response", response}});
  }
  internal::WriteFileAtomic(directory / "mock_responses.jsonl", internal::DumpJsonLines(lines));
  internal::WriteJsonAtomic(directory / "gt_slices.json",
                            GroundTruthToJson(bundle.gt_slices, bundle.gt_slice_classes, bundle.val));
  internal::WriteJsonAtomic(directory / "analytic.json", bundle.analytic);
  internal::WriteJsonAtomic(directory / "synth_config.json", bundle.config.ToJson());
}

json OracleReport::ToJson() const {
  json slices = json::array();
  for (const auto& s : true_slices.slices) {
    slices.push_back({{"name", s.name}, {"size", s.members.size()}});
  }
  return {{"true_slices", slices},
          {"analytic_erm_wga", analytic_erm_wga},
          {"analytic_erm_mean_accuracy", analytic_erm_mean},
          {"erm_wga", erm_wga},
          {"erm_mean_accuracy", erm_mean},
          {"balanced_head_wga", balanced_head_wga},
          {"balanced_head_mean_accuracy", balanced_head_mean},
          {"group_key", group_key}};
}

OracleReport MakeOracleReport(const SynthBundle& bundle, double l2) {
  const SynthConfig& config = bundle.config;
  OracleReport report;
  report.true_slices = bundle.gt_slices;
  report.group_key = SynthGroupKey(config);
  report.analytic_erm_wga = bundle.analytic.at("expected_erm_wga").get<double>();
  report.analytic_erm_mean = bundle.analytic.at("expected_erm_mean_accuracy_test").get<double>();

  const std::vector<int> erm = bundle.test.Predictions();
  report.erm_wga = WorstGroupAccuracy(bundle.test, erm, report.group_key).accuracy;
  report.erm_mean = MeanAccuracy(bundle.test, erm);

  // Balance validation over (label, every bias tag) cells.
  const std::size_t k_biases = config.biases.size();
  const std::size_t per_label = std::size_t{1} << k_biases;
  std::vector<std::vector<std::size_t>> cells(config.n_classes * per_label);
  for (std::size_t i = 0; i < bundle.val.size(); ++i) {
    const auto& s = bundle.val.samples[i];
    std::size_t bits = 0;
    for (std::size_t k = 0; k < k_biases; ++k) {
      const std::string tag = k_biases > 1 ? BiasTag(k) : kBiasAlignedTag;
      if (s.groups.at(tag)) bits |= std::size_t{1} << k;
    }
    cells[static_cast<std::size_t>(s.label) * per_label + bits].push_back(i);
  }
  std::size_t smallest = bundle.val.size();
  for (const auto& cell : cells) smallest = std::min(smallest, cell.size());
  if (smallest == 0) {
    throw Error(ErrorCode::kEmptyCell, "validation split has an empty ground-truth group");
  }
  internal::Rng rng(config.seed);
  std::vector<std::size_t> balanced;
  for (auto& cell : cells) {
    for (std::size_t i = 0; i < smallest; ++i) {
      std::swap(cell[i], cell[i + rng.Below(cell.size() - i)]);
    }
    balanced.insert(balanced.end(), cell.begin(),
                    cell.begin() + static_cast<std::ptrdiff_t>(smallest));
  }
  std::sort(balanced.begin(), balanced.end());
  const std::vector<int> labels = bundle.val.Labels();
  const LinearHead head =
      TrainHead(bundle.val.features, labels, balanced, l2, config.n_classes);
  const std::vector<int> preds = HeadPredictAll(head, bundle.test.features);
  report.balanced_head_wga = WorstGroupAccuracy(bundle.test, preds, report.group_key).accuracy;
  report.balanced_head_mean = MeanAccuracy(bundle.test, preds);
  return report;
}

}  // namespace ladder
