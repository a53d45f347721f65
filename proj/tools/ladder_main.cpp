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

// Command-line front end. Flags are folded into a JSON run configuration
// and handed to the shared library through ladder_run_stage().

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ladder/ladder.h"

namespace {

using nlohmann::json;

enum class Kind { kString, kDouble, kUInt, kFlag, kList };

struct Binding {
  std::string pointer;  // JSON pointer into the run config
  Kind kind;
  std::string text;
  double number = 0.0;
  unsigned long long integer = 0;
  bool flag = false;
  std::vector<std::string> list;
  CLI::Option* option = nullptr;
};

struct FlagSpec {
  const char* name;
  const char* pointer;
  Kind kind;
  const char* help;
};

const FlagSpec kFlags[] = {
    {"--work-dir", "/paths/work_dir", Kind::kString, "Directory holding stage artifacts"},
    {"--data", "/paths/data", Kind::kString, "Synthbench output directory supplying inputs"},
    {"--train", "/paths/train", Kind::kString, "Train manifest.json"},
    {"--val", "/paths/val", Kind::kString, "Validation manifest.json"},
    {"--test", "/paths/test", Kind::kString, "Test manifest.json"},
    {"--corpus", "/paths/corpus", Kind::kString, "corpus.jsonl"},
    {"--corpus-embeddings", "/paths/corpus_embeddings", Kind::kString, "Corpus .ladremb"},
    {"--gt-slices", "/paths/gt_slices", Kind::kString, "Ground-truth slices JSON"},
    {"--out", "/paths/out", Kind::kString, "Output directory (synth) or file (report)"},
    {"--synth-config", "/paths/synth_config", Kind::kString, "Synthbench generator config JSON"},
    {"--manifest", "/paths/manifests", Kind::kList, "Manifest to validate (repeatable)"},
    {"--seed", "/seed", Kind::kUInt, "Seed for every random choice"},
    {"--similarity", "/similarity", Kind::kString, "cosine or dot"},
    {"--topk", "/topk", Kind::kUInt, "Sentences retrieved per class"},
    {"--tau", "/tau", Kind::kString, "median, percentile:p or fixed:v"},
    {"--gap-threshold", "/gap_threshold", Kind::kDouble, "Error-gap flag threshold"},
    {"--max-hypotheses", "/max_hypotheses", Kind::kUInt, "Hypotheses evaluated per class"},
    {"--calibration", "/calibration", Kind::kString, "zscore or raw"},
    {"--l2", "/l2", Kind::kDouble, "Head l2 penalty"},
    {"--ridge", "/ridge", Kind::kDouble, "Projection ridge penalty"},
    {"--task", "/task", Kind::kString, "Task name used in prompts"},
    {"--modality", "/modality", Kind::kString, "Modality used in prompts"},
    {"--medical", "/medical", Kind::kFlag, "Medical prompt variant"},
    {"--dump-scores", "/dump_scores", Kind::kFlag, "Store per-sample scores in slices.json"},
    {"--group-key", "/group_key", Kind::kString, "Group tag(s) for worst-group accuracy"},
    {"--precision-k", "/precision_k", Kind::kUInt, "k for Precision@k"},
    {"--provider", "/llm/provider", Kind::kString, "http or mock"},
    {"--mock-file", "/llm/mock_file", Kind::kString, "Mock responses JSONL"},
    {"--endpoint", "/llm/http/endpoint", Kind::kString, "Chat-completion URL"},
    {"--model", "/llm/model", Kind::kString, "Chat model name"},
    {"--api-key-env", "/llm/http/api_key_env", Kind::kString, "Env var holding the API key"},
    {"--embedder", "/embedder/kind", Kind::kString, "lookup or remote"},
    {"--embedder-endpoint", "/embedder/http/endpoint", Kind::kString, "Embeddings URL"},
    {"--embedder-model", "/embedder/model", Kind::kString, "Embedding model name"},
};

const char* const kStages[][2] = {
    {"synth", "Generate a synthetic benchmark with planted biases"},
    {"fit-projection", "Fit the feature-to-VLR projection on the train split"},
    {"discover", "Retrieve sentences and generate hypotheses per class"},
    {"slices", "Score hypotheses and extract error slices"},
    {"mitigate", "Train balanced heads for flagged hypotheses"},
    {"eval", "Evaluate the ensemble on the test split"},
    {"report", "Render the Markdown report"},
    {"validate", "Validate dataset and corpus files"},
};

void PrintError(const std::string& code, const std::string& message) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LADDER error-slice discovery and mitigation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ladder_version());

  std::map<std::string, std::vector<Binding>> bindings;
  std::map<std::string, std::string> config_files;
  for (const auto& [name, help] : kStages) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_files[name], "Run configuration JSON file");
    auto& list = bindings[name];
    list.reserve(std::size(kFlags));
    for (const auto& spec : kFlags) {
      list.push_back(Binding{spec.pointer, spec.kind});
      Binding& b = list.back();
      switch (spec.kind) {
        case Kind::kString: b.option = sub->add_option(spec.name, b.text, spec.help); break;
        case Kind::kDouble: b.option = sub->add_option(spec.name, b.number, spec.help); break;
        case Kind::kUInt: b.option = sub->add_option(spec.name, b.integer, spec.help); break;
        case Kind::kFlag: b.option = sub->add_flag(spec.name, b.flag, spec.help); break;
        case Kind::kList: b.option = sub->add_option(spec.name, b.list, spec.help); break;
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  json config = json::object();
  if (!config_files[stage].empty()) {
    std::ifstream in(config_files[stage]);
    if (!in) {
      PrintError("MissingInput", "cannot read config " + config_files[stage]);
      return 2;
    }
    try {
      config = json::parse(in);
    } catch (const json::exception& e) {
      PrintError("ConfigError", e.what());
      return 2;
    }
  }
  for (const auto& b : bindings[stage]) {
    if (b.option->count() == 0) continue;
    const json::json_pointer ptr(b.pointer);
    switch (b.kind) {
      case Kind::kString: config[ptr] = b.text; break;
      case Kind::kDouble: config[ptr] = b.number; break;
      case Kind::kUInt: config[ptr] = b.integer; break;
      case Kind::kFlag: config[ptr] = b.flag; break;
      case Kind::kList: config[ptr] = b.list; break;
    }
  }

  char* result = nullptr;
  const int status = ladder_run_stage(stage.c_str(), config.dump().c_str(), &result);
  if (status != LADDER_OK) {
    PrintError(ladder_status_name(status), ladder_last_error());
    return status == LADDER_CONFIG_ERROR ? 2 : 1;
  }
  if (result != nullptr) {
    std::cout << result << std::endl;
    ladder_free_string(result);
  }
  return 0;
}
