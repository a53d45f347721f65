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


#include "ladder/ladder.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "test_util.hpp"

namespace {

using ::ladder::testing::TempDir;
using nlohmann::json;

std::string TakeString(char* s) {
  std::string out = s == nullptr ? "" : s;
  ladder_free_string(s);
  return out;
}

json RunStage(const char* stage, const json& config) {
  char* result = nullptr;
  const int status = ladder_run_stage(stage, config.dump().c_str(), &result);
  EXPECT_EQ(status, LADDER_OK) << stage << ": " << ladder_last_error();
  return status == LADDER_OK ? json::parse(TakeString(result)) : json();
}

TEST(CApi, StatusNamesAndLastError) {
  EXPECT_STREQ(ladder_status_name(LADDER_OK), "Ok");
  EXPECT_STREQ(ladder_status_name(LADDER_SHAPE_MISMATCH), "ShapeMismatch");
  EXPECT_STREQ(ladder_status_name(LADDER_MISSING_INPUT), "MissingInput");
  EXPECT_STREQ(ladder_status_name(12345), "Unknown");
  EXPECT_STRNE(ladder_version(), "");

  ladder_embeddings* m = nullptr;
  EXPECT_EQ(ladder_embeddings_load("/nonexistent/x.ladremb", &m), LADDER_MISSING_FILE);
  EXPECT_EQ(m, nullptr);
  EXPECT_STRNE(ladder_last_error(), "");
  const float v[2] = {1.0f, 2.0f};
  ASSERT_EQ(ladder_embeddings_create(1, 2, v, &m), LADDER_OK);
  EXPECT_STREQ(ladder_last_error(), "");
  ladder_embeddings_free(m);
  EXPECT_EQ(ladder_embeddings_create(1, 2, nullptr, &m), LADDER_INVALID_ARGUMENT);
}

TEST(CApi, NonFiniteEmbeddingsRejected) {
  const float v[2] = {1.0f, NAN};
  ladder_embeddings* m = nullptr;
  EXPECT_EQ(ladder_embeddings_create(1, 2, v, &m), LADDER_NON_FINITE);
}

TEST(CApi, EmbeddingsRoundTrip) {
  TempDir dir;
  std::vector<float> v(3 * 4);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.25f * static_cast<float>(i) - 1.0f;
  ladder_embeddings* m = nullptr;
  ASSERT_EQ(ladder_embeddings_create(3, 4, v.data(), &m), LADDER_OK);
  const std::string path = (dir.path() / "m.ladremb").string();
  ASSERT_EQ(ladder_embeddings_save(m, path.c_str()), LADDER_OK);
  ladder_embeddings* back = nullptr;
  ASSERT_EQ(ladder_embeddings_load(path.c_str(), &back), LADDER_OK);
  EXPECT_EQ(ladder_embeddings_rows(back), 3u);
  EXPECT_EQ(ladder_embeddings_dim(back), 4u);
  EXPECT_EQ(std::vector<float>(ladder_embeddings_data(back), ladder_embeddings_data(back) + 12), v);
  ladder_embeddings_free(m);
  ladder_embeddings_free(back);
}

TEST(CApi, ProjectionFitApplySaveLoad) {
  TempDir dir;
  // psi = 2 * phi + 1 per coordinate, exact in float32.
  std::vector<float> phi, psi;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 2; ++j) {
      const float x = static_cast<float>(i * (j + 1) % 5) - static_cast<float>(j);
      phi.push_back(x);
      psi.push_back(2.0f * x + 1.0f);
    }
  }
  ladder_embeddings *x = nullptr, *y = nullptr, *out = nullptr;
  ASSERT_EQ(ladder_embeddings_create(6, 2, phi.data(), &x), LADDER_OK);
  ASSERT_EQ(ladder_embeddings_create(6, 2, psi.data(), &y), LADDER_OK);
  ladder_projector* p = nullptr;
  ASSERT_EQ(ladder_projection_fit(x, y, 0.0, &p), LADDER_OK) << ladder_last_error();
  EXPECT_LE(ladder_projector_fit_rmse(p), 1e-6);
  const std::string path = (dir.path() / "proj").string();
  ASSERT_EQ(ladder_projector_save(p, path.c_str()), LADDER_OK);
  ladder_projector* q = nullptr;
  ASSERT_EQ(ladder_projector_load(path.c_str(), &q), LADDER_OK);
  ASSERT_EQ(ladder_projector_apply(q, x, &out), LADDER_OK);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    EXPECT_NEAR(ladder_embeddings_data(out)[i], psi[i], 1e-4);
  }
  ladder_embeddings* wrong = nullptr;
  ASSERT_EQ(ladder_embeddings_create(1, 3, psi.data(), &wrong), LADDER_OK);
  ladder_embeddings* ignored = nullptr;
  EXPECT_EQ(ladder_projector_apply(q, wrong, &ignored), LADDER_DIMENSION_MISMATCH);
  EXPECT_EQ(ladder_projection_fit(x, wrong, 0.0, &p), LADDER_SHAPE_MISMATCH);
  for (auto* e : {x, y, out, wrong}) ladder_embeddings_free(e);
  ladder_projector_free(p);
  ladder_projector_free(q);
}

TEST(CApi, RetrieveTopK) {
  const float rows[] = {1, 0, 0, 1, 1, 1, -1, 0};
  ladder_embeddings* corpus = nullptr;
  ASSERT_EQ(ladder_embeddings_create(4, 2, rows, &corpus), LADDER_OK);
  const double query[] = {1.0, 0.0};
  std::size_t idx[4];
  double sim[4];
  std::size_t n = 0;
  ASSERT_EQ(ladder_retrieve_topk(query, 2, corpus, 3, LADDER_SIM_COSINE, idx, sim, &n), LADDER_OK);
  ASSERT_EQ(n, 3u);
  EXPECT_EQ(idx[0], 0u);
  EXPECT_EQ(idx[1], 2u);
  EXPECT_NEAR(sim[1], std::sqrt(0.5), 1e-12);
  EXPECT_EQ(idx[2], 1u);
  ASSERT_EQ(ladder_retrieve_topk(query, 2, corpus, 10, LADDER_SIM_DOT, idx, sim, &n), LADDER_OK);
  EXPECT_EQ(n, 4u);
  EXPECT_EQ(idx[3], 3u);
  const double bad[] = {1.0, 0.0, 0.0};
  EXPECT_EQ(ladder_retrieve_topk(bad, 3, corpus, 1, LADDER_SIM_DOT, idx, sim, &n),
            LADDER_DIMENSION_MISMATCH);
  ladder_embeddings_free(corpus);
}

TEST(CApi, PromptAndParse) {
  const char* sentences[] = {"a bird on water", "a bird in a forest"};
  char* prompt = nullptr;
  ASSERT_EQ(ladder_build_prompt("bird classification", "image", sentences, 2, 0, &prompt),
            LADDER_OK);
  const std::string text = TakeString(prompt);
  EXPECT_NE(text.find("a bird on water"), std::string::npos);
  EXPECT_EQ(ladder_build_prompt("t", "m", sentences, 0, 0, &prompt), LADDER_EMPTY_SENTENCES);

  const char* response =
      "hypothesis_dict = {'H1': 'The model fails on water.'}\n"
      "prompt_dict = {'H1_water': ['a bird on water', 'a duck on a lake']}\n";
  char* parsed = nullptr;
  ASSERT_EQ(ladder_parse_llm_response(response, &parsed), LADDER_OK) << ladder_last_error();
  const json j = json::parse(TakeString(parsed));
  ASSERT_EQ(j["hypotheses"].size(), 1u);
  EXPECT_EQ(j["hypotheses"][0]["attribute"], "water");
  EXPECT_EQ(ladder_parse_llm_response("no dictionaries here", &parsed), LADDER_PARSE_ERROR);
}

TEST(CApi, Auroc) {
  const double scores[] = {0.1, 0.4, 0.35, 0.8};
  const int labels[] = {0, 0, 1, 1};
  double a = 0.0;
  ASSERT_EQ(ladder_auroc(scores, labels, 4, &a), LADDER_OK);
  EXPECT_DOUBLE_EQ(a, 0.75);
  const int one_class[] = {1, 1, 1, 1};
  EXPECT_EQ(ladder_auroc(scores, one_class, 4, &a), LADDER_SINGLE_CLASS);
}

TEST(CApi, PipelineAndBundlePredictMatchMetrics) {
  TempDir dir;
  const std::string data = (dir.path() / "data").string();
  const std::string work = (dir.path() / "work").string();
  RunStage("synth", {{"seed", 1}, {"paths", {{"out", data}}}});
  const json c = {{"seed", 1},
                  {"paths", {{"data", data}, {"work_dir", work}}},
                  {"llm", {{"provider", "mock"}}}};
  for (const char* stage : {"fit-projection", "discover", "slices", "mitigate", "eval"}) {
    RunStage(stage, c);
  }
  std::ifstream in(dir.path() / "work" / "metrics.json");
  const json metrics = json::parse(in);

  ladder_dataset* test = nullptr;
  ASSERT_EQ(ladder_dataset_load((data + "/test/manifest.json").c_str(), &test), LADDER_OK);
  ladder_projector* proj = nullptr;
  ASSERT_EQ(ladder_projector_load((work + "/projector").c_str(), &proj), LADDER_OK);
  ladder_bundle* bundle = nullptr;
  ASSERT_EQ(ladder_bundle_load((work + "/bundle").c_str(), &bundle), LADDER_OK);
  EXPECT_EQ(ladder_bundle_num_heads(bundle), 2u);
  EXPECT_EQ(ladder_dataset_num_classes(test), 2u);

  const ladder_embeddings* features = ladder_dataset_features(test);
  ladder_embeddings* projected = nullptr;
  ASSERT_EQ(ladder_projector_apply(proj, features, &projected), LADDER_OK);
  const std::size_t n = ladder_dataset_size(test);
  const std::size_t d_phi = ladder_embeddings_dim(features);
  const std::size_t d_psi = ladder_embeddings_dim(projected);
  std::size_t correct = 0, control_correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int cls = -1;
    ASSERT_EQ(ladder_bundle_predict(bundle, ladder_embeddings_data(features) + i * d_phi, d_phi,
                                    ladder_embeddings_data(projected) + i * d_psi, d_psi, &cls),
              LADDER_OK);
    correct += cls == ladder_dataset_label(test, i);
    control_correct += ladder_dataset_prediction(test, i) == ladder_dataset_label(test, i);
  }
  EXPECT_DOUBLE_EQ(static_cast<double>(correct) / static_cast<double>(n),
                   metrics["test"]["ensemble"]["mean_accuracy"].get<double>());
  EXPECT_DOUBLE_EQ(static_cast<double>(control_correct) / static_cast<double>(n),
                   metrics["test"]["erm_control"]["mean_accuracy"].get<double>());
  int cls = 0;
  EXPECT_EQ(ladder_bundle_predict(bundle, ladder_embeddings_data(features), d_phi - 1,
                                  ladder_embeddings_data(projected), d_psi, &cls),
            LADDER_DIMENSION_MISMATCH);

  ladder_embeddings_free(projected);
  ladder_bundle_free(bundle);
  ladder_projector_free(proj);
  ladder_dataset_free(test);
}

TEST(CApi, RunStageErrors) {
  TempDir dir;
  char* result = nullptr;
  EXPECT_EQ(ladder_run_stage("export", "{}", &result), LADDER_CONFIG_ERROR);
  EXPECT_EQ(ladder_run_stage("synth", "{not json", &result), LADDER_CONFIG_ERROR);
  EXPECT_EQ(ladder_run_stage(nullptr, "{}", &result), LADDER_INVALID_ARGUMENT);
  const json c = {{"paths", {{"work_dir", (dir.path() / "w").string()},
                             {"data", (dir.path() / "missing").string()}}},
                  {"llm", {{"provider", "mock"}}}};
  EXPECT_EQ(ladder_run_stage("slices", c.dump().c_str(), nullptr), LADDER_MISSING_INPUT)
      << ladder_last_error();
  EXPECT_EQ(result, nullptr);
}

}  // namespace
