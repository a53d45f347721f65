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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "json.hpp"
#include "ladder/corpus.hpp"
#include "ladder/error.hpp"
#include "ladder/hypothesis.hpp"
#include "ladder/metrics.hpp"
#include "ladder/mitigator.hpp"
#include "ladder/pipeline.hpp"
#include "ladder/projection.hpp"
#include "ladder/retrieval.hpp"

struct ladder_embeddings {
  ladder::EmbeddingMatrix matrix;
};
struct ladder_dataset {
  ladder::SliceDataset dataset;
  ladder_embeddings features;
};
struct ladder_projector {
  ladder::AffineProjector projector;
};
struct ladder_bundle {
  ladder::MitigationBundle bundle;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
int Guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return LADDER_OK;
  } catch (const ladder::Error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return LADDER_PARSE_ERROR;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return LADDER_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LADDER_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return LADDER_INTERNAL;
  }
}

void NotNull(const void* p, const char* what) {
  if (p == nullptr) {
    throw ladder::Error(ladder::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* ladder_version(void) { return "0.1.0"; }

const char* ladder_status_name(int status) {
  static thread_local std::string name;
  name = ladder::ErrorCodeName(static_cast<ladder::ErrorCode>(status));
  return name.c_str();
}

const char* ladder_last_error(void) { return g_last_error.c_str(); }

void ladder_free_string(char* s) { std::free(s); }

int ladder_run_stage(const char* stage, const char* config_json, char** result_json) {
  return Guard([&] {
    NotNull(stage, "stage");
    NotNull(config_json, "config_json");
    const ladder::Stage st = ladder::ParseStage(stage);
    nlohmann::json cfg;
    try {
      cfg = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      throw ladder::Error(ladder::ErrorCode::kConfigError,
                          std::string("config is not valid JSON: ") + e.what());
    }
    const ladder::RunConfig config = ladder::RunConfig::FromJson(cfg);
    const nlohmann::json result = ladder::RunStage(st, config);
    if (result_json != nullptr) *result_json = CopyString(result.dump());
  });
}

int ladder_embeddings_create(size_t rows, size_t dim, const float* data, ladder_embeddings** out) {
  return Guard([&] {
    NotNull(out, "out");
    if (dim == 0) throw ladder::Error(ladder::ErrorCode::kShapeMismatch, "dim must be >= 1");
    if (rows > 0) NotNull(data, "data");
    std::vector<float> values(data, data + rows * dim);
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (!std::isfinite(values[k])) {
        throw ladder::Error(ladder::ErrorCode::kNonFinite,
                            "non-finite value at row " + std::to_string(k / dim));
      }
    }
    *out = new ladder_embeddings{ladder::EmbeddingMatrix(rows, dim, std::move(values))};
  });
}

int ladder_embeddings_load(const char* path, ladder_embeddings** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new ladder_embeddings{ladder::LoadEmbeddings(path)};
  });
}

int ladder_embeddings_save(const ladder_embeddings* m, const char* path) {
  return Guard([&] {
    NotNull(m, "matrix");
    NotNull(path, "path");
    ladder::SaveEmbeddings(m->matrix, path);
  });
}

size_t ladder_embeddings_rows(const ladder_embeddings* m) { return m ? m->matrix.rows() : 0; }
size_t ladder_embeddings_dim(const ladder_embeddings* m) { return m ? m->matrix.dim() : 0; }
const float* ladder_embeddings_data(const ladder_embeddings* m) {
  return m ? m->matrix.data().data() : nullptr;
}
void ladder_embeddings_free(ladder_embeddings* m) { delete m; }

int ladder_dataset_load(const char* manifest_path, ladder_dataset** out) {
  return Guard([&] {
    NotNull(manifest_path, "manifest_path");
    NotNull(out, "out");
    auto* d = new ladder_dataset{ladder::LoadDataset(manifest_path), {}};
    d->features.matrix = d->dataset.features;
    *out = d;
  });
}

size_t ladder_dataset_size(const ladder_dataset* d) { return d ? d->dataset.size() : 0; }
size_t ladder_dataset_num_classes(const ladder_dataset* d) {
  return d ? d->dataset.num_classes() : 0;
}
const ladder_embeddings* ladder_dataset_features(const ladder_dataset* d) {
  return d ? &d->features : nullptr;
}
int ladder_dataset_label(const ladder_dataset* d, size_t row) {
  return (d && row < d->dataset.size()) ? d->dataset.samples[row].label : -1;
}
int ladder_dataset_prediction(const ladder_dataset* d, size_t row) {
  return (d && row < d->dataset.size()) ? d->dataset.samples[row].prediction : -1;
}
void ladder_dataset_free(ladder_dataset* d) { delete d; }

int ladder_projection_fit(const ladder_embeddings* features, const ladder_embeddings* targets,
                          double ridge, ladder_projector** out) {
  return Guard([&] {
    NotNull(features, "features");
    NotNull(targets, "targets");
    NotNull(out, "out");
    *out = new ladder_projector{ladder::FitProjection(features->matrix, targets->matrix, ridge)};
  });
}

int ladder_projector_apply(const ladder_projector* p, const ladder_embeddings* features,
                           ladder_embeddings** out) {
  return Guard([&] {
    NotNull(p, "projector");
    NotNull(features, "features");
    NotNull(out, "out");
    if (features->matrix.dim() != p->projector.input_dim()) {
      throw ladder::Error(ladder::ErrorCode::kDimensionMismatch,
                          "feature dim does not match the projector input");
    }
    *out = new ladder_embeddings{ladder::Project(p->projector, features->matrix)};
  });
}

double ladder_projector_fit_rmse(const ladder_projector* p) {
  return p ? p->projector.fit_rmse : 0.0;
}

int ladder_projector_save(const ladder_projector* p, const char* directory) {
  return Guard([&] {
    NotNull(p, "projector");
    NotNull(directory, "directory");
    ladder::SaveProjector(p->projector, directory);
  });
}

int ladder_projector_load(const char* directory, ladder_projector** out) {
  return Guard([&] {
    NotNull(directory, "directory");
    NotNull(out, "out");
    *out = new ladder_projector{ladder::LoadProjector(directory)};
  });
}

void ladder_projector_free(ladder_projector* p) { delete p; }

int ladder_retrieve_topk(const double* query, size_t dim, const ladder_embeddings* corpus,
                         size_t k, ladder_similarity mode, size_t* out_indices,
                         double* out_similarities, size_t* out_count) {
  return Guard([&] {
    NotNull(query, "query");
    NotNull(corpus, "corpus");
    NotNull(out_count, "out_count");
    if (k > 0) {
      NotNull(out_indices, "out_indices");
      NotNull(out_similarities, "out_similarities");
    }
    ladder::DeltaVector delta;
    delta.values.assign(query, query + dim);
    ladder::TextCorpus tc;
    tc.embeddings = corpus->matrix;
    tc.sentences.resize(corpus->matrix.rows());
    const auto sim =
        mode == LADDER_SIM_DOT ? ladder::SimilarityMode::kDot : ladder::SimilarityMode::kCosine;
    const auto top = ladder::RetrieveTopK(delta, tc, k, sim);
    const size_t n = std::min(k, top.size());
    for (size_t i = 0; i < n; ++i) {
      out_indices[i] = top[i].corpus_index;
      out_similarities[i] = top[i].similarity;
    }
    *out_count = n;
  });
}

int ladder_build_prompt(const char* task, const char* modality, const char* const* sentences,
                        size_t n_sentences, int medical, char** out_prompt) {
  return Guard([&] {
    NotNull(task, "task");
    NotNull(modality, "modality");
    NotNull(out_prompt, "out_prompt");
    if (n_sentences > 0) NotNull(sentences, "sentences");
    std::vector<std::string> list;
    for (size_t i = 0; i < n_sentences; ++i) {
      NotNull(sentences[i], "sentence");
      list.emplace_back(sentences[i]);
    }
    *out_prompt = CopyString(ladder::BuildPrompt(task, modality, list, list.size(), medical != 0));
  });
}

int ladder_parse_llm_response(const char* text, char** hypotheses_json) {
  return Guard([&] {
    NotNull(text, "text");
    NotNull(hypotheses_json, "hypotheses_json");
    const ladder::HypothesisSet set = ladder::ParseLlmResponse(text);
    nlohmann::json j = ladder::HypothesisSetToJson(set);
    j.erase("class");
    *hypotheses_json = CopyString(j.dump());
  });
}

int ladder_auroc(const double* scores, const int* labels, size_t n, double* out) {
  return Guard([&] {
    NotNull(out, "out");
    if (n > 0) {
      NotNull(scores, "scores");
      NotNull(labels, "labels");
    }
    *out = ladder::Auroc(std::span<const double>(scores, n), std::span<const int>(labels, n));
  });
}

int ladder_bundle_load(const char* directory, ladder_bundle** out) {
  return Guard([&] {
    NotNull(directory, "directory");
    NotNull(out, "out");
    *out = new ladder_bundle{ladder::LoadBundle(directory)};
  });
}

size_t ladder_bundle_num_heads(const ladder_bundle* b) { return b ? b->bundle.heads.size() : 0; }

int ladder_bundle_predict(const ladder_bundle* b, const float* features_row, size_t d_phi,
                          const float* projected_row, size_t d_psi, int* out_class) {
  return Guard([&] {
    NotNull(b, "bundle");
    NotNull(features_row, "features_row");
    NotNull(projected_row, "projected_row");
    NotNull(out_class, "out_class");
    *out_class = ladder::EnsemblePredict(std::span<const float>(features_row, d_phi),
                                         std::span<const float>(projected_row, d_psi), b->bundle);
  });
}

void ladder_bundle_free(ladder_bundle* b) { delete b; }

}  // extern "C"
