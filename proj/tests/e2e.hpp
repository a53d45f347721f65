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


#ifndef LADDER_TESTS_E2E_HPP_
#define LADDER_TESTS_E2E_HPP_

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "json.hpp"
#include "ladder/pipeline.hpp"

namespace ladder::e2e {

inline nlohmann::json ReadJson(const std::filesystem::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

struct PipelineRun {
  std::filesystem::path data_dir;
  std::filesystem::path work_dir;
  nlohmann::json oracle;   // oracle_report.json
  nlohmann::json slices;   // slices.json
  nlohmann::json metrics;  // metrics.json, absent when nothing was flagged
  bool mitigated = false;
};

inline RunConfig MockConfig(const std::filesystem::path& data_dir,
                            const std::filesystem::path& work_dir, std::uint64_t seed) {
  RunConfig c;
  c.seed = seed;
  c.llm.provider = "mock";
  c.paths.data = data_dir;
  c.paths.work_dir = work_dir;
  c.ResolveDataDir();
  return c;
}

// synth -> fit-projection -> discover -> slices -> mitigate -> eval ->
// report under `root`. With nothing flagged mitigate and eval are skipped.
inline PipelineRun RunSynthPipeline(const std::filesystem::path& root, std::uint64_t seed,
                                    const std::optional<nlohmann::json>& synth_config = {}) {
  PipelineRun run;
  run.data_dir = root / "data";
  run.work_dir = root / "work";
  std::filesystem::create_directories(root);

  RunConfig synth;
  synth.seed = seed;
  synth.paths.out = run.data_dir;
  if (synth_config) {
    synth.paths.synth_config = root / "synth_config.json";
    std::ofstream(synth.paths.synth_config) << synth_config->dump(2);
  }
  RunStage(Stage::kSynth, synth);
  run.oracle = ReadJson(run.data_dir / "oracle_report.json");

  const RunConfig c = MockConfig(run.data_dir, run.work_dir, seed);
  RunStage(Stage::kFitProjection, c);
  RunStage(Stage::kDiscover, c);
  RunStage(Stage::kSlices, c);
  run.slices = ReadJson(run.work_dir / "slices.json");
  if (run.slices.at("n_flagged").get<int>() == 0) {
    RunStage(Stage::kReport, c);
    return run;
  }
  RunStage(Stage::kMitigate, c);
  RunStage(Stage::kEval, c);
  RunStage(Stage::kReport, c);
  run.metrics = ReadJson(run.work_dir / "metrics.json");
  run.mitigated = true;
  return run;
}

}  // namespace ladder::e2e

#endif  // LADDER_TESTS_E2E_HPP_
