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

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>

#include "io_util.hpp"
#include "ladder/corpus.hpp"
#include "ladder/embedder.hpp"
#include "ladder/error.hpp"
#include "ladder/hypothesis.hpp"
#include "ladder/metrics.hpp"
#include "ladder/mitigator.hpp"
#include "ladder/projection.hpp"
#include "ladder/retrieval.hpp"
#include "ladder/synthbench.hpp"

#ifndef LADDER_GIT_DESCRIBE
#define LADDER_GIT_DESCRIBE "unknown"
#endif

namespace ladder {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::pair<Stage, const char*> kStageNames[] = {
    {Stage::kSynth, "synth"},       {Stage::kFitProjection, "fit-projection"},
    {Stage::kDiscover, "discover"}, {Stage::kSlices, "slices"},
    {Stage::kMitigate, "mitigate"}, {Stage::kEval, "eval"},
    {Stage::kReport, "report"},     {Stage::kValidate, "validate"}};

void Require(const fs::path& path, const std::string& what) {
  if (path.empty()) throw Error(ErrorCode::kMissingInput, "no " + what + " configured");
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kMissingInput, "missing " + what + ": " + path.string());
  }
}

fs::path ProjectorDir(const RunConfig& c) { return c.paths.work_dir / "projector"; }
fs::path DiscoverDir(const RunConfig& c) { return c.paths.work_dir / "discover"; }
fs::path SlicesFile(const RunConfig& c) { return c.paths.work_dir / "slices.json"; }
fs::path BundleDir(const RunConfig& c) { return c.paths.work_dir / "bundle"; }
fs::path MetricsFile(const RunConfig& c) { return c.paths.work_dir / "metrics.json"; }

std::string ClassDirName(int c) { return "class_" + std::to_string(c); }

SliceDataset LoadSplit(const fs::path& manifest, const std::string& what) {
  Require(manifest, what + " manifest");
  return LoadDataset(manifest);
}

AffineProjector LoadStageProjector(const RunConfig& c) {
  Require(ProjectorDir(c) / "projector.json", "projector (run fit-projection first)");
  return LoadProjector(ProjectorDir(c));
}

TextCorpus LoadStageCorpus(const RunConfig& c) {
  Require(c.paths.corpus, "corpus");
  Require(c.paths.corpus_embeddings, "corpus embeddings");
  return LoadTextCorpus(c.paths.corpus, c.paths.corpus_embeddings);
}

std::unique_ptr<TextEmbedder> MakeEmbedder(const RunConfig& c, const TextCorpus& corpus) {
  if (c.embedder.kind == "lookup") return std::make_unique<LookupEmbedder>(corpus);
  if (c.embedder.kind == "remote") {
    return std::make_unique<RemoteEmbedder>(c.embedder.http, c.embedder.model);
  }
  throw Error(ErrorCode::kConfigError, "unknown embedder '" + c.embedder.kind + "'");
}

std::vector<HypothesisSet> LoadHypothesisSets(const RunConfig& c) {
  const fs::path index = DiscoverDir(c) / "discover.json";
  Require(index, "discover output (run discover first)");
  const json doc = internal::ReadJsonFile(index);
  std::vector<HypothesisSet> sets;
  for (const auto& entry : doc.at("classes")) {
    const fs::path file = DiscoverDir(c) / entry.at("hypotheses").get<std::string>();
    Require(file, "hypotheses");
    sets.push_back(HypothesisSetFromJson(internal::ReadJsonFile(file)));
  }
  return sets;
}

std::vector<SliceReport> LoadSliceReports(const RunConfig& c, const SliceDataset& val) {
  Require(SlicesFile(c), "slices.json (run slices first)");
  const json doc = internal::ReadJsonFile(SlicesFile(c));
  std::vector<SliceReport> reports;
  for (const auto& s : doc.at("slices")) reports.push_back(SliceReportFromJson(s, val));
  return reports;
}

// ---------------------------------------------------------------- stages

json StageSynth(const RunConfig& c) {
  if (c.paths.out.empty()) throw Error(ErrorCode::kConfigError, "synth needs an output directory");
  SynthConfig sc;
  if (!c.paths.synth_config.empty()) {
    Require(c.paths.synth_config, "synth config");
    sc = SynthConfig::FromJson(internal::ReadJsonFile(c.paths.synth_config));
  }
  sc.seed = c.seed;
  sc.Validate();
  const SynthBundle bundle = GenerateSynth(sc);
  SaveSynthBundle(bundle, c.paths.out);
  const OracleReport oracle = MakeOracleReport(bundle, c.l2);
  internal::WriteJsonAtomic(c.paths.out / "oracle_report.json", oracle.ToJson());
  return {{"analytic", bundle.analytic}, {"oracle", oracle.ToJson()}};
}

json StageFitProjection(const RunConfig& c) {
  const SliceDataset train = LoadSplit(c.paths.train, "train");
  if (!train.vlr_image) {
    throw Error(ErrorCode::kMissingInput, "train manifest has no vlr_image embeddings");
  }
  const AffineProjector p = FitProjection(train.features, *train.vlr_image, c.ridge);
  SaveProjector(p, ProjectorDir(c));
  return {{"fit_rmse", p.fit_rmse}, {"d_phi", p.input_dim()}, {"d_psi", p.output_dim()},
          {"rows", train.size()}};
}

json StageDiscover(const RunConfig& c) {
  const SliceDataset val = LoadSplit(c.paths.val, "validation");
  const AffineProjector projector = LoadStageProjector(c);
  const TextCorpus corpus = LoadStageCorpus(c);
  const EmbeddingMatrix projected = Project(projector, val.features);
  auto client = MakeLlmClient(c.llm);
  json classes = json::array();
  json skipped = json::array();
  for (std::size_t ci = 0; ci < val.num_classes(); ++ci) {
    const int cls = static_cast<int>(ci);
    DeltaVector delta;
    try {
      delta = MeanDifference(projected, val, cls);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateClass) throw;
      skipped.push_back({{"class", cls}, {"reason", e.what()}});
      continue;
    }
    const auto top = RetrieveTopK(delta, corpus, c.EffectiveTopK(), c.similarity);
    std::vector<std::string> texts;
    for (const auto& r : top) texts.push_back(r.text);
    const std::string prompt = BuildPrompt(c.task, c.modality, texts, texts.size(), c.medical);
    const fs::path dir = DiscoverDir(c) / ClassDirName(cls);
    fs::create_directories(dir);
    internal::WriteJsonAtomic(dir / "topk.json", TopKToJson(top));
    internal::WriteFileAtomic(dir / "prompt.txt", prompt);
    HypothesisSet set;
    try {
      set = GenerateHypotheses(*client, prompt, cls);
    } catch (const ParseFailure& e) {
      internal::WriteFileAtomic(dir / "raw_response.txt", e.raw());
      throw;
    }
    internal::WriteJsonAtomic(dir / "hypotheses.json", HypothesisSetToJson(set));
    classes.push_back({{"class", cls},
                       {"class_name", val.classes[ci]},
                       {"n_correct", delta.n_correct},
                       {"n_wrong", delta.n_wrong},
                       {"n_hypotheses", set.hypotheses.size()},
                       {"prompt_sha256", PromptHash(prompt)},
                       {"topk", ClassDirName(cls) + "/topk.json"},
                       {"prompt", ClassDirName(cls) + "/prompt.txt"},
                       {"hypotheses", ClassDirName(cls) + "/hypotheses.json"}});
  }
  const json index = {{"config", c.Echo()}, {"classes", classes}, {"skipped", skipped}};
  internal::WriteJsonAtomic(DiscoverDir(c) / "discover.json", index);
  return {{"classes", classes.size()}, {"skipped", skipped}};
}

json StageSlices(const RunConfig& c) {
  const std::vector<HypothesisSet> sets = LoadHypothesisSets(c);
  const SliceDataset val = LoadSplit(c.paths.val, "validation");
  const AffineProjector projector = LoadStageProjector(c);
  const TextCorpus corpus = LoadStageCorpus(c);
  const EmbeddingMatrix projected = Project(projector, val.features);
  auto embedder = MakeEmbedder(c, corpus);
  SliceConfig sc;
  sc.similarity = c.similarity;
  sc.tau = c.tau;
  sc.gap_threshold = c.gap_threshold;
  sc.max_hypotheses = c.max_hypotheses;
  json slices = json::array();
  std::size_t flagged = 0;
  for (const auto& set : sets) {
    for (const auto& r : DetectErrorSlices(val, projected, set, *embedder, sc)) {
      if (r.is_error_slice) ++flagged;
      slices.push_back(SliceReportToJson(r, val, c.dump_scores));
    }
  }
  const json doc = {{"config", c.Echo()},
                    {"split", SplitName(val.split)},
                    {"similarity", SimilarityModeName(c.similarity)},
                    {"tau", c.tau.ToString()},
                    {"gap_threshold", c.gap_threshold},
                    {"n_flagged", flagged},
                    {"slices", slices}};
  internal::WriteJsonAtomic(SlicesFile(c), doc);
  return {{"reports", slices.size()}, {"flagged", flagged}};
}

json StageMitigate(const RunConfig& c) {
  const std::vector<HypothesisSet> sets = LoadHypothesisSets(c);
  const SliceDataset val = LoadSplit(c.paths.val, "validation");
  const std::vector<SliceReport> reports = LoadSliceReports(c, val);
  const AffineProjector projector = LoadStageProjector(c);
  const TextCorpus corpus = LoadStageCorpus(c);
  const EmbeddingMatrix projected = Project(projector, val.features);
  auto embedder = MakeEmbedder(c, corpus);
  MitigationConfig mc;
  mc.similarity = c.similarity;
  mc.calibration = Calibration::ParseMode(c.calibration);
  mc.l2 = c.l2;
  mc.seed = c.seed;
  const MitigationBundle bundle = Mitigate(val, projected, reports, sets, *embedder, mc);
  // Build beside the target, then swap, so stale heads never survive.
  const fs::path target = BundleDir(c);
  const fs::path staging = target.string() + ".tmp";
  fs::remove_all(staging);
  SaveBundle(bundle, staging);
  fs::remove_all(target);
  fs::rename(staging, target);
  json heads = json::array();
  for (const auto& h : bundle.heads) heads.push_back(h.hypothesis_id);
  return {{"heads", heads}, {"warnings", bundle.warnings}};
}

std::string ResolveGroupKey(const RunConfig& c) {
  if (!c.group_key.empty()) return c.group_key;
  if (!c.paths.synth_config.empty() && fs::exists(c.paths.synth_config)) {
    return SynthGroupKey(SynthConfig::FromJson(internal::ReadJsonFile(c.paths.synth_config)));
  }
  return kBiasAlignedTag;
}

json PredictorBlock(const SliceDataset& ds, const std::vector<int>& preds,
                    const std::string& group_key, std::vector<std::string>& warnings,
                    const std::string& name) {
  json block = {{"mean_accuracy", MeanAccuracy(ds, preds)}};
  try {
    const WorstGroup wg = WorstGroupAccuracy(ds, preds, group_key);
    json groups = json::array();
    for (const auto& g : wg.groups) {
      groups.push_back({{"cell", g.cell}, {"count", g.count}, {"accuracy", g.accuracy}});
    }
    block["wga"] = wg.accuracy;
    block["worst_group"] = wg.cell;
    block["groups"] = groups;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kMissingGroupTag && e.code() != ErrorCode::kEmptyCell) throw;
    block["wga"] = nullptr;
    warnings.push_back(name + ": worst-group accuracy unavailable (" + e.what() + ")");
  }
  return block;
}

json DiscoveryMetrics(const RunConfig& c, const MitigationBundle& bundle,
                      const AffineProjector& projector, std::vector<std::string>& warnings) {
  if (c.paths.gt_slices.empty() || !fs::exists(c.paths.gt_slices)) return nullptr;
  const SliceDataset val = LoadSplit(c.paths.val, "validation");
  const json gt_doc = internal::ReadJsonFile(c.paths.gt_slices);
  const GroundTruthSlices gt = GroundTruthFromJson(gt_doc, val);
  const std::vector<SliceReport> reports = LoadSliceReports(c, val);

  PredictedSlices pred;
  for (const auto& r : reports) {
    if (r.is_error_slice) pred.slices.push_back({r.hypothesis_id, r.RankedMembers()});
  }
  json out = {{"k", c.precision_k},
              {"n_ground_truth", gt.slices.size()},
              {"n_predicted", pred.slices.size()}};
  out["precision_at_k"] = pred.slices.empty() ? 0.0 : PrecisionAtK(gt, pred, c.precision_k);

  // AUROC of -s_H for ground-truth membership inside the slice's class.
  const EmbeddingMatrix projected = Project(projector, val.features);
  json aurocs = json::array();
  const auto& gt_json = gt_doc.at("slices");
  for (std::size_t g = 0; g < gt.slices.size(); ++g) {
    if (!gt_json[g].contains("class")) continue;
    const int cls = gt_json[g].at("class").get<int>();
    std::set<std::size_t> in_slice(gt.slices[g].members.begin(), gt.slices[g].members.end());
    const std::vector<std::size_t> rows = val.ClassMembers(cls);
    json best = nullptr;
    std::string best_id;
    for (std::size_t h = 0; h < bundle.heads.size(); ++h) {
      if (bundle.hyp_classes[h] != cls) continue;
      const auto scores = ScoreHypothesis(projected, bundle.hyp_embeddings[h], bundle.similarity);
      std::vector<double> s;
      std::vector<int> y;
      for (std::size_t r : rows) {
        s.push_back(-scores[r]);
        y.push_back(in_slice.count(r) ? 1 : 0);
      }
      try {
        const double a = Auroc(s, y);
        if (best.is_null() || a > best.get<double>()) {
          best = a;
          best_id = bundle.heads[h].hypothesis_id;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kSingleClass) throw;
        warnings.push_back(gt.slices[g].name + ": AUROC undefined (" + e.what() + ")");
      }
    }
    aurocs.push_back({{"slice", gt.slices[g].name}, {"auroc", best}, {"hypothesis_id", best_id}});
  }
  out["auroc"] = aurocs;
  return out;
}

json StageEval(const RunConfig& c) {
  const SliceDataset test = LoadSplit(c.paths.test, "test");
  const AffineProjector projector = LoadStageProjector(c);
  Require(BundleDir(c) / "bundle.json", "mitigation bundle (run mitigate first)");
  const MitigationBundle bundle = LoadBundle(BundleDir(c));
  const EmbeddingMatrix projected = Project(projector, test.features);
  const std::string key = ResolveGroupKey(c);
  std::vector<std::string> warnings;

  json predictors;
  predictors["erm_control"] = PredictorBlock(test, test.Predictions(), key, warnings, "erm_control");
  predictors["ensemble"] =
      PredictorBlock(test, EnsemblePredictAll(test.features, projected, bundle), key, warnings,
                     "ensemble");
  predictors["erm_head"] = PredictorBlock(test, HeadPredictAll(bundle.erm_head, test.features),
                                          key, warnings, "erm_head");
  json heads = json::array();
  std::vector<std::size_t> routed(bundle.heads.size(), 0);
  for (std::size_t i = 0; i < test.size(); ++i) {
    ++routed[EnsembleRoute(test.features.row(i), projected.row(i), bundle).head_index];
  }
  for (std::size_t h = 0; h < bundle.heads.size(); ++h) {
    json block = PredictorBlock(test, HeadPredictAll(bundle.heads[h], test.features), key,
                                warnings, bundle.heads[h].hypothesis_id);
    block["hypothesis_id"] = bundle.heads[h].hypothesis_id;
    block["routed"] = routed[h];
    heads.push_back(std::move(block));
  }
  predictors["heads"] = heads;

  json metrics = {{"config", c.Echo()},
                  {"split", SplitName(test.split)},
                  {"group_key", key},
                  {"test", predictors},
                  {"discovery", DiscoveryMetrics(c, bundle, projector, warnings)},
                  {"warnings", warnings}};
  internal::WriteJsonAtomic(MetricsFile(c), metrics);
  return {{"ensemble", predictors["ensemble"]["wga"]},
          {"erm_control", predictors["erm_control"]["wga"]}};
}

json StageReport(const RunConfig& c) {
  Require(SlicesFile(c), "slices.json (run slices first)");
  const fs::path out = c.paths.out.empty() ? c.paths.work_dir / "report.md" : c.paths.out;
  RenderReportFile(SlicesFile(c), MetricsFile(c), out);
  return {{"report", out.filename().string()}};
}

json StageValidate(const RunConfig& c) {
  std::vector<fs::path> manifests = c.paths.manifests;
  for (const auto& p : {c.paths.train, c.paths.val, c.paths.test}) {
    if (!p.empty()) manifests.push_back(p);
  }
  const bool has_corpus = !c.paths.corpus.empty() || !c.paths.corpus_embeddings.empty();
  if (manifests.empty() && !has_corpus) {
    throw Error(ErrorCode::kMissingInput, "nothing to validate");
  }
  json datasets = json::array();
  for (const auto& m : manifests) {
    const SliceDataset ds = LoadSplit(m, "dataset");
    datasets.push_back({{"manifest", m.string()},
                        {"name", ds.name},
                        {"split", SplitName(ds.split)},
                        {"samples", ds.size()},
                        {"classes", ds.num_classes()},
                        {"d_phi", ds.features.dim()},
                        {"d_vlr", ds.vlr_image ? json(ds.vlr_image->dim()) : json(nullptr)}});
  }
  json result = {{"valid", true}, {"datasets", datasets}, {"errors", json::array()}};
  if (has_corpus) {
    const TextCorpus corpus = LoadStageCorpus(c);
    result["corpus"] = {{"sentences", corpus.size()}, {"dim", corpus.embeddings.dim()}};
  }
  return result;
}

std::string Timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void AppendRunLog(const fs::path& dir, const json& line) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream out(dir / "run_log.jsonl", std::ios::app | std::ios::binary);
  if (out) out << line.dump() << '\n';
}

std::string Fmt(const json& v) {
  if (!v.is_number()) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v.get<double>());
  return buf;
}

// Pipes inside free text would break table rows.
std::string Cell(std::string text) {
  for (std::size_t pos = 0; (pos = text.find('|', pos)) != std::string::npos; pos += 2) {
    text.replace(pos, 1, "\\|");
  }
  return text;
}

}  // namespace

std::string StageName(Stage stage) {
  for (const auto& [s, name] : kStageNames) {
    if (s == stage) return name;
  }
  return "unknown";
}

Stage ParseStage(const std::string& name) {
  for (const auto& [s, n] : kStageNames) {
    if (name == n) return s;
  }
  throw Error(ErrorCode::kConfigError, "unknown stage '" + name + "'");
}

std::size_t RunConfig::EffectiveTopK() const {
  if (topk > 0) return topk;
  return medical ? kDefaultTopKMedical : kDefaultTopKNatural;
}

void RunConfig::ResolveDataDir() {
  if (paths.data.empty()) return;
  const fs::path& d = paths.data;
  auto fill = [](fs::path& field, const fs::path& candidate) {
    if (field.empty()) field = candidate;
  };
  fill(paths.train, d / "train" / "manifest.json");
  fill(paths.val, d / "val" / "manifest.json");
  fill(paths.test, d / "test" / "manifest.json");
  fill(paths.corpus, d / "corpus.jsonl");
  fill(paths.corpus_embeddings, d / "corpus.ladremb");
  fill(paths.gt_slices, d / "gt_slices.json");
  fill(paths.synth_config, d / "synth_config.json");
  if (llm.provider == "mock") fill(llm.mock_file, d / "mock_responses.jsonl");
}

json RunConfig::Echo() const {
  return {{"similarity", SimilarityModeName(similarity)},
          {"topk", EffectiveTopK()},
          {"tau", tau.ToString()},
          {"gap_threshold", gap_threshold},
          {"max_hypotheses", max_hypotheses},
          {"calibration", calibration},
          {"l2", l2},
          {"ridge", ridge},
          {"seed", seed},
          {"task", task},
          {"modality", modality},
          {"medical", medical},
          {"group_key", group_key},
          {"precision_k", precision_k},
          {"llm", {{"provider", llm.provider},
                   {"model", llm.model},
                   {"temperature", llm.temperature},
                   {"max_tokens", llm.max_tokens}}},
          {"embedder", {{"kind", embedder.kind}, {"model", embedder.model}}}};
}

json RunConfig::ToJson() const {
  auto http_json = [](const HttpSettings& h) {
    return json{{"endpoint", h.endpoint},
                {"api_key_env", h.api_key_env},
                {"auth_header", h.auth_header},
                {"extra_headers", h.extra_headers},
                {"timeout_seconds", h.timeout_seconds},
                {"max_retries", h.max_retries},
                {"backoff_initial_seconds", h.backoff_initial_seconds}};
  };
  json manifests = json::array();
  for (const auto& m : paths.manifests) manifests.push_back(m.string());
  return {{"similarity", SimilarityModeName(similarity)},
          {"topk", topk},
          {"tau", tau.ToString()},
          {"gap_threshold", gap_threshold},
          {"max_hypotheses", max_hypotheses},
          {"calibration", calibration},
          {"l2", l2},
          {"ridge", ridge},
          {"seed", seed},
          {"task", task},
          {"modality", modality},
          {"medical", medical},
          {"dump_scores", dump_scores},
          {"group_key", group_key},
          {"precision_k", precision_k},
          {"llm", {{"provider", llm.provider},
                   {"http", http_json(llm.http)},
                   {"model", llm.model},
                   {"temperature", llm.temperature},
                   {"max_tokens", llm.max_tokens},
                   {"mock_file", llm.mock_file.string()}}},
          {"embedder", {{"kind", embedder.kind},
                        {"http", http_json(embedder.http)},
                        {"model", embedder.model}}},
          {"paths", {{"data", paths.data.string()},
                     {"train", paths.train.string()},
                     {"val", paths.val.string()},
                     {"test", paths.test.string()},
                     {"corpus", paths.corpus.string()},
                     {"corpus_embeddings", paths.corpus_embeddings.string()},
                     {"gt_slices", paths.gt_slices.string()},
                     {"synth_config", paths.synth_config.string()},
                     {"work_dir", paths.work_dir.string()},
                     {"out", paths.out.string()},
                     {"manifests", manifests}}}};
}

namespace {

void CheckKeys(const json& obj, const json& allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::kConfigError, where + " must be an object");
  for (const auto& [key, v] : obj.items()) {
    if (!allowed.contains(key)) {
      throw Error(ErrorCode::kConfigError, "unknown config key '" + where + key + "'");
    }
  }
}

HttpSettings HttpFromJson(const json& j, const json& defaults, HttpSettings h) {
  CheckKeys(j, defaults, "http.");
  h.endpoint = j.value("endpoint", h.endpoint);
  h.api_key_env = j.value("api_key_env", h.api_key_env);
  h.auth_header = j.value("auth_header", h.auth_header);
  if (j.contains("extra_headers")) {
    h.extra_headers = j.at("extra_headers").get<std::map<std::string, std::string>>();
  }
  h.timeout_seconds = j.value("timeout_seconds", h.timeout_seconds);
  h.max_retries = j.value("max_retries", h.max_retries);
  h.backoff_initial_seconds = j.value("backoff_initial_seconds", h.backoff_initial_seconds);
  return h;
}

}  // namespace

RunConfig RunConfig::FromJson(const json& value) {
  RunConfig c;
  const json defaults = c.ToJson();
  try {
    CheckKeys(value, defaults, "");
    c.similarity = ParseSimilarityMode(value.value("similarity", SimilarityModeName(c.similarity)));
    c.topk = value.value("topk", c.topk);
    c.tau = TauPolicy::Parse(value.value("tau", c.tau.ToString()));
    c.gap_threshold = value.value("gap_threshold", c.gap_threshold);
    c.max_hypotheses = value.value("max_hypotheses", c.max_hypotheses);
    c.calibration = value.value("calibration", c.calibration);
    Calibration::ParseMode(c.calibration);
    c.l2 = value.value("l2", c.l2);
    c.ridge = value.value("ridge", c.ridge);
    c.seed = value.value("seed", c.seed);
    c.task = value.value("task", c.task);
    c.modality = value.value("modality", c.modality);
    c.medical = value.value("medical", c.medical);
    c.dump_scores = value.value("dump_scores", c.dump_scores);
    c.group_key = value.value("group_key", c.group_key);
    c.precision_k = value.value("precision_k", c.precision_k);
    if (value.contains("llm")) {
      const json& l = value.at("llm");
      CheckKeys(l, defaults.at("llm"), "llm.");
      c.llm.provider = l.value("provider", c.llm.provider);
      if (l.contains("http")) {
        c.llm.http = HttpFromJson(l.at("http"), defaults.at("llm").at("http"), c.llm.http);
      }
      c.llm.model = l.value("model", c.llm.model);
      c.llm.temperature = l.value("temperature", c.llm.temperature);
      c.llm.max_tokens = l.value("max_tokens", c.llm.max_tokens);
      c.llm.mock_file = l.value("mock_file", std::string{});
    }
    if (value.contains("embedder")) {
      const json& e = value.at("embedder");
      CheckKeys(e, defaults.at("embedder"), "embedder.");
      c.embedder.kind = e.value("kind", c.embedder.kind);
      if (e.contains("http")) {
        c.embedder.http =
            HttpFromJson(e.at("http"), defaults.at("embedder").at("http"), c.embedder.http);
      }
      c.embedder.model = e.value("model", c.embedder.model);
    }
    if (value.contains("paths")) {
      const json& p = value.at("paths");
      CheckKeys(p, defaults.at("paths"), "paths.");
      auto path = [&](const char* key, fs::path& field) {
        if (p.contains(key)) field = p.at(key).get<std::string>();
      };
      path("data", c.paths.data);
      path("train", c.paths.train);
      path("val", c.paths.val);
      path("test", c.paths.test);
      path("corpus", c.paths.corpus);
      path("corpus_embeddings", c.paths.corpus_embeddings);
      path("gt_slices", c.paths.gt_slices);
      path("synth_config", c.paths.synth_config);
      path("work_dir", c.paths.work_dir);
      path("out", c.paths.out);
      if (p.contains("manifests")) {
        for (const auto& m : p.at("manifests")) c.paths.manifests.emplace_back(m.get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("bad run config: ") + e.what());
  }
  if (!(c.gap_threshold >= 0.0)) throw Error(ErrorCode::kConfigError, "gap_threshold must be >= 0");
  if (!(c.l2 >= 0.0)) throw Error(ErrorCode::kConfigError, "l2 must be >= 0");
  if (!(c.ridge >= 0.0)) throw Error(ErrorCode::kConfigError, "ridge must be >= 0");
  if (c.precision_k == 0) throw Error(ErrorCode::kConfigError, "precision_k must be >= 1");
  if (c.max_hypotheses == 0) throw Error(ErrorCode::kConfigError, "max_hypotheses must be >= 1");
  if (c.paths.work_dir.empty()) throw Error(ErrorCode::kConfigError, "work_dir must be set");
  c.ResolveDataDir();
  return c;
}

json RunStage(Stage stage, const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  json log = {{"stage", StageName(stage)},
              {"config", config.Echo()},
              {"git_describe", LADDER_GIT_DESCRIBE},
              {"timestamp", Timestamp()}};
  const fs::path log_dir = stage == Stage::kSynth ? config.paths.out : config.paths.work_dir;
  auto finish = [&](const std::string& status) {
    log["status"] = status;
    log["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (stage != Stage::kValidate && !log_dir.empty()) AppendRunLog(log_dir, log);
  };
  try {
    json result;
    switch (stage) {
      case Stage::kSynth: result = StageSynth(config); break;
      case Stage::kFitProjection: result = StageFitProjection(config); break;
      case Stage::kDiscover: result = StageDiscover(config); break;
      case Stage::kSlices: result = StageSlices(config); break;
      case Stage::kMitigate: result = StageMitigate(config); break;
      case Stage::kEval: result = StageEval(config); break;
      case Stage::kReport: result = StageReport(config); break;
      case Stage::kValidate: result = StageValidate(config); break;
    }
    finish("ok");
    return result;
  } catch (const Error& e) {
    log["error"] = {{"code", ErrorCodeName(e.code())}, {"message", e.what()}};
    finish("error");
    throw;
  } catch (const json::exception& e) {
    log["error"] = {{"code", "ParseError"}, {"message", e.what()}};
    finish("error");
    throw Error(ErrorCode::kParseError, e.what());
  } catch (const fs::filesystem_error& e) {
    log["error"] = {{"code", "IoError"}, {"message", e.what()}};
    finish("error");
    throw Error(ErrorCode::kIoError, e.what());
  }
}

std::string RenderReport(const json& slices, const json& metrics) {
  std::string md = "# LADDER error-slice report\n\n";
  try {
    const json& list = slices.at("slices");
    md += "Similarity: " + slices.value("similarity", std::string("cosine")) +
          ", tau: " + slices.value("tau", std::string("median")) +
          ", gap threshold: " + Fmt(slices.value("gap_threshold", json(kDefaultGapThreshold))) +
          "\n\n";
    if (list.empty()) {
      md += "## No hypotheses\n\nNo hypotheses were available for any class.\n\n";
    }
    std::map<int, std::vector<const json*>> by_class;
    std::map<int, std::string> names;
    for (const auto& s : list) {
      const int cls = s.at("class").get<int>();
      by_class[cls].push_back(&s);
      names[cls] = s.value("class_name", std::to_string(cls));
    }
    for (const auto& [cls, rows] : by_class) {
      md += "## Class " + std::to_string(cls) + ": " + Cell(names[cls]) + "\n\n";
      md += "| Hypothesis | Attribute | Slice size | Accuracy present | Accuracy absent | Gap | Flag |\n";
      md += "|---|---|---:|---:|---:|---:|:---:|\n";
      for (const json* s : rows) {
        md += "| " + Cell(s->at("hypothesis_id").get<std::string>()) + " | " +
              Cell(s->value("attribute", std::string{})) + " | " +
              std::to_string(s->at("slice_size").get<std::size_t>()) + " / " +
              std::to_string(s->at("class_size").get<std::size_t>()) + " | " +
              Fmt(s->at("accuracy_present")) + " | " + Fmt(s->at("accuracy_absent")) + " | " +
              Fmt(s->at("gap")) + " | " + (s->at("is_error_slice").get<bool>() ? "✓" : "") +
              " |\n";
      }
      md += "\n";
    }
    md += "## Mitigation\n\n";
    if (metrics.is_null()) {
      md += "No metrics available.\n";
      return md;
    }
    const json& test = metrics.at("test");
    md += "Group key: `" + metrics.value("group_key", std::string{}) + "`\n\n";
    md += "| Model | Mean accuracy | Worst-group accuracy | Worst group |\n";
    md += "|---|---:|---:|---|\n";
    auto row = [&](const std::string& label, const json& b) {
      md += "| " + Cell(label) + " | " + Fmt(b.at("mean_accuracy")) + " | " + Fmt(b.at("wga")) +
            " | " + Cell(b.value("worst_group", std::string{})) + " |\n";
    };
    row("Before: original classifier", test.at("erm_control"));
    row("After: LADDER ensemble", test.at("ensemble"));
    row("ERM head on validation", test.at("erm_head"));
    for (const auto& h : test.at("heads")) row("Head " + h.at("hypothesis_id").get<std::string>(), h);
    md += "\n";
    const json& disc = metrics.value("discovery", json(nullptr));
    if (!disc.is_null()) {
      md += "Precision@" + std::to_string(disc.at("k").get<std::size_t>()) + " against ground truth: " +
            Fmt(disc.at("precision_at_k")) + "\n";
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("malformed report input: ") + e.what());
  }
  return md;
}

void RenderReportFile(const fs::path& slices_json, const fs::path& metrics_json,
                      const fs::path& out) {
  const json slices = internal::ReadJsonFile(slices_json);
  const json metrics =
      fs::exists(metrics_json) ? internal::ReadJsonFile(metrics_json) : json(nullptr);
  internal::WriteFileAtomic(out, RenderReport(slices, metrics));
}

}  // namespace ladder
