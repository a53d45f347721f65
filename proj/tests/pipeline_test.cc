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


#include "ladder/pipeline.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <map>
#include <sstream>

#include "e2e.hpp"
#include "ladder/error.hpp"
#include "test_util.hpp"

namespace ladder {
namespace {

using ::ladder::e2e::ReadJson;
using ::ladder::testing::ReadFile;
using ::ladder::testing::TempDir;
using nlohmann::json;

class SynthPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir();
    run_ = new e2e::PipelineRun(e2e::RunSynthPipeline(dir_->path() / "seed1", 1));
  }
  static void TearDownTestSuite() {
    delete run_;
    delete dir_;
  }
  static TempDir* dir_;
  static e2e::PipelineRun* run_;
};

TempDir* SynthPipeline::dir_ = nullptr;
e2e::PipelineRun* SynthPipeline::run_ = nullptr;

TEST_F(SynthPipeline, PlantedHypothesisIsTopFlaggedSlicePerClass) {
  ASSERT_TRUE(run_->mitigated);
  std::map<int, json> top;
  for (const auto& s : run_->slices["slices"]) {
    const int c = s["class"].get<int>();
    if (!top.count(c) || s["gap"].get<double>() > top[c]["gap"].get<double>()) top[c] = s;
  }
  ASSERT_EQ(top.size(), 2u);
  for (const auto& [c, s] : top) {
    EXPECT_EQ(s["hypothesis_id"], "c" + std::to_string(c) + ".H1");
    EXPECT_TRUE(s["is_error_slice"].get<bool>());
    EXPECT_GE(s["gap"].get<double>(), 0.10);
  }
  for (const auto& s : run_->slices["slices"]) {
    if (s["attribute"].get<std::string>().find("_outline") != std::string::npos) {
      EXPECT_FALSE(s["is_error_slice"].get<bool>()) << s["hypothesis_id"];
    }
  }
}

TEST_F(SynthPipeline, BundleRetainsExactlyPlantedHypotheses) {
  const json bundle = ReadJson(run_->work_dir / "bundle" / "bundle.json");
  std::vector<std::string> ids;
  for (const auto& h : bundle["hypotheses"]) ids.push_back(h["hypothesis_id"]);
  EXPECT_EQ(ids, (std::vector<std::string>{"c0.H1", "c1.H1"}));
  EXPECT_TRUE(bundle["warnings"].empty());
}

TEST_F(SynthPipeline, MetricsAgainstOracle) {
  const json& m = run_->metrics;
  EXPECT_EQ(m["group_key"], "bias_aligned");
  EXPECT_EQ(m["split"], "test");
  const double control = m["test"]["erm_control"]["wga"].get<double>();
  const double ensemble = m["test"]["ensemble"]["wga"].get<double>();
  EXPECT_NEAR(control, run_->oracle["analytic_erm_wga"].get<double>(), 0.03);
  EXPECT_GE(ensemble - control, 0.15);
  EXPECT_GE(ensemble, run_->oracle["balanced_head_wga"].get<double>() - 0.05);
  EXPECT_GE(m["discovery"]["precision_at_k"].get<double>(), 0.9);
  EXPECT_EQ(m["discovery"]["k"], 10);
  std::size_t routed = 0;
  for (const auto& h : m["test"]["heads"]) routed += h["routed"].get<std::size_t>();
  EXPECT_EQ(routed, 6000u);
}

TEST_F(SynthPipeline, ReportGapsMatchSlicesJson) {
  const std::string report = ReadFile(run_->work_dir / "report.md");
  for (const auto& s : run_->slices["slices"]) {
    char gap[32];
    std::snprintf(gap, sizeof(gap), "| %.3f |", s["gap"].get<double>());
    const std::string id = s["hypothesis_id"];
    const auto row = report.find("| " + id + " |");
    ASSERT_NE(row, std::string::npos) << id;
    const std::string line = report.substr(row, report.find('\n', row) - row);
    EXPECT_NE(line.find(gap), std::string::npos) << line;
    EXPECT_EQ(line.find("✓") != std::string::npos, s["is_error_slice"].get<bool>()) << line;
  }
}

TEST_F(SynthPipeline, DiscoverArtifacts) {
  const auto d = run_->work_dir / "discover";
  for (int c = 0; c < 2; ++c) {
    const auto cls = d / ("class_" + std::to_string(c));
    EXPECT_TRUE(std::filesystem::exists(cls / "prompt.txt"));
    EXPECT_EQ(ReadJson(cls / "topk.json").size(), 200u);
    EXPECT_EQ(ReadJson(cls / "hypotheses.json")["hypotheses"].size(), 2u);
  }
  std::ifstream log(run_->work_dir / "run_log.jsonl");
  std::string line;
  std::vector<std::string> stages;
  while (std::getline(log, line)) {
    const json j = json::parse(line);
    EXPECT_EQ(j["status"], "ok");
    EXPECT_TRUE(j.contains("git_describe"));
    EXPECT_TRUE(j.contains("wall_time_seconds"));
    stages.push_back(j["stage"]);
  }
  EXPECT_EQ(stages, (std::vector<std::string>{"fit-projection", "discover", "slices", "mitigate",
                                              "eval", "report"}));
}

TEST_F(SynthPipeline, RerunIsByteIdentical) {
  TempDir other;
  e2e::PipelineRun again = e2e::RunSynthPipeline(other.path() / "elsewhere", 1);
  std::size_t compared = 0;
  for (const auto* root : {&run_->data_dir, &run_->work_dir}) {
    const auto& other_root = root == &run_->data_dir ? again.data_dir : again.work_dir;
    for (const auto& e : std::filesystem::recursive_directory_iterator(*root)) {
      if (!e.is_regular_file() || e.path().filename() == "run_log.jsonl") continue;
      const auto rel = std::filesystem::relative(e.path(), *root);
      EXPECT_EQ(ReadFile(e.path()), ReadFile(other_root / rel)) << rel;
      ++compared;
    }
  }
  EXPECT_GT(compared, 30u);
}

TEST_F(SynthPipeline, ValidateAcceptsSynthOutput) {
  RunConfig c = e2e::MockConfig(run_->data_dir, run_->work_dir, 1);
  const json v = RunStage(Stage::kValidate, c);
  EXPECT_TRUE(v["valid"].get<bool>());
  EXPECT_EQ(v["datasets"].size(), 3u);
  EXPECT_EQ(v["corpus"]["dim"], 32);
}

TEST(Pipeline, NullBiasFlagsNothing) {
  TempDir dir;
  e2e::PipelineRun run = e2e::RunSynthPipeline(dir.path(), 2, json{{"bias_strength", 0.0}});
  EXPECT_FALSE(run.mitigated);
  EXPECT_EQ(run.slices["n_flagged"], 0);
  RunConfig c = e2e::MockConfig(run.data_dir, run.work_dir, 2);
  EXPECT_LADDER_ERROR(RunStage(Stage::kMitigate, c), ErrorCode::kNoErrorSlices);
  EXPECT_TRUE(std::filesystem::exists(run.work_dir / "report.md"));
}

TEST(Pipeline, SlicesWithoutDiscoverIsMissingInput) {
  TempDir dir;
  RunConfig synth;
  synth.paths.out = dir / "data";
  RunStage(Stage::kSynth, synth);
  RunConfig c = e2e::MockConfig(dir / "data", dir / "work", 0);
  EXPECT_LADDER_ERROR(RunStage(Stage::kSlices, c), ErrorCode::kMissingInput);
  EXPECT_LADDER_ERROR(RunStage(Stage::kDiscover, c), ErrorCode::kMissingInput);
  // Failures are logged too.
  std::ifstream log(dir / "work" / "run_log.jsonl");
  std::string line;
  std::getline(log, line);
  const json j = json::parse(line);
  EXPECT_EQ(j["status"], "error");
  EXPECT_EQ(j["error"]["code"], "MissingInput");
}

TEST(Pipeline, ValidateRejectsBrokenDataset) {
  TempDir dir;
  RunConfig synth;
  synth.paths.out = dir / "data";
  RunStage(Stage::kSynth, synth);
  std::filesystem::remove(dir / "data" / "val" / "features.ladremb");
  RunConfig c;
  c.paths.val = dir / "data" / "val" / "manifest.json";
  EXPECT_LADDER_ERROR(RunStage(Stage::kValidate, c), ErrorCode::kMissingFile);
  EXPECT_FALSE(std::filesystem::exists(dir / "ladder_out" / "run_log.jsonl"));
  EXPECT_LADDER_ERROR(RunStage(Stage::kValidate, RunConfig{}), ErrorCode::kMissingInput);
}

TEST(RenderReport, EmptyHypothesesSection) {
  const json slices = {{"similarity", "cosine"}, {"tau", "median"}, {"gap_threshold", 0.1},
                       {"n_flagged", 0}, {"slices", json::array()}};
  const std::string md = RenderReport(slices, nullptr);
  EXPECT_NE(md.find("## No hypotheses"), std::string::npos);
}

TEST(RenderReport, FlaggedRow) {
  const json slice = {{"class", 0}, {"class_name", "bird"}, {"hypothesis_id", "c0.H1"},
                      {"attribute", "water"}, {"slice_size", 3}, {"class_size", 10},
                      {"accuracy_present", 0.9}, {"accuracy_absent", 0.4}, {"gap", 0.25},
                      {"is_error_slice", true}};
  const json slices = {{"similarity", "cosine"}, {"tau", "median"}, {"gap_threshold", 0.1},
                       {"n_flagged", 1}, {"slices", json::array({slice})}};
  const std::string md = RenderReport(slices, nullptr);
  EXPECT_NE(md.find("| c0.H1 | water | 3 / 10 | 0.900 | 0.400 | 0.250 | ✓ |"), std::string::npos)
      << md;
}

TEST(RunConfig, FromJsonValidation) {
  RunConfig c = RunConfig::FromJson({{"seed", 4}, {"similarity", "dot"}, {"tau", "percentile:30"}});
  EXPECT_EQ(c.seed, 4u);
  EXPECT_EQ(c.similarity, SimilarityMode::kDot);
  EXPECT_EQ(c.tau.kind, TauPolicy::Kind::kPercentile);
  EXPECT_EQ(RunConfig::FromJson(c.ToJson()).ToJson(), c.ToJson());
  EXPECT_LADDER_ERROR(RunConfig::FromJson({{"bogus", 1}}), ErrorCode::kConfigError);
  EXPECT_LADDER_ERROR(RunConfig::FromJson({{"similarity", "euclid"}}), ErrorCode::kConfigError);
  EXPECT_LADDER_ERROR(RunConfig::FromJson({{"precision_k", 0}}), ErrorCode::kConfigError);
  EXPECT_LADDER_ERROR(RunConfig::FromJson({{"calibration", "logit"}}), ErrorCode::kConfigError);
  EXPECT_EQ(RunConfig{}.EffectiveTopK(), 200u);
  RunConfig med;
  med.medical = true;
  EXPECT_EQ(med.EffectiveTopK(), 100u);
}

TEST(Stage, Names) {
  for (Stage s : {Stage::kSynth, Stage::kFitProjection, Stage::kDiscover, Stage::kSlices,
                  Stage::kMitigate, Stage::kEval, Stage::kReport, Stage::kValidate}) {
    EXPECT_EQ(ParseStage(StageName(s)), s);
  }
  EXPECT_EQ(StageName(Stage::kFitProjection), "fit-projection");
  EXPECT_LADDER_ERROR(ParseStage("export"), ErrorCode::kConfigError);
}

}  // namespace
}  // namespace ladder
