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

/* C interface to the LADDER engine. Every fallible call returns a status
 * code (LADDER_OK on success); the message for the most recent failure on
 * the calling thread is available from ladder_last_error(). Objects are
 * opaque handles released with their matching *_free function. Strings
 * returned through char** out-parameters are released with
 * ladder_free_string(). */
#ifndef LADDER_LADDER_H_
#define LADDER_LADDER_H_

#include <stddef.h>
#include <stdint.h>

#if defined(LADDER_BUILDING_LIBRARY)
#define LADDER_API __attribute__((visibility("default")))
#else
#define LADDER_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ladder_status {
  LADDER_OK = 0,
  LADDER_INVALID_ARGUMENT = 1,
  LADDER_IO_ERROR = 2,
  LADDER_BAD_MAGIC = 3,
  LADDER_UNSUPPORTED_VERSION = 4,
  LADDER_SHAPE_MISMATCH = 5,
  LADDER_NON_FINITE = 6,
  LADDER_MISSING_FILE = 7,
  LADDER_ROW_COUNT_MISMATCH = 8,
  LADDER_DUPLICATE_ID = 9,
  LADDER_BAD_LABEL = 10,
  LADDER_SINGULAR_SYSTEM = 11,
  LADDER_EMPTY_SET = 12,
  LADDER_DEGENERATE_CLASS = 13,
  LADDER_DIMENSION_MISMATCH = 14,
  LADDER_EMPTY_SENTENCES = 15,
  LADDER_EMPTY_RECORDS = 16,
  LADDER_HTTP_ERROR = 17,
  LADDER_AUTH_ERROR = 18,
  LADDER_PARSE_ERROR = 19,
  LADDER_PAIRING_ERROR = 20,
  LADDER_EMBEDDER_UNAVAILABLE = 21,
  LADDER_EMPTY_SENTENCE_SET = 22,
  LADDER_DEGENERATE_SCORES = 23,
  LADDER_EMPTY_CELL = 24,
  LADDER_SINGLE_CLASS_SET = 25,
  LADDER_NO_ERROR_SLICES = 26,
  LADDER_EMPTY_BUNDLE = 27,
  LADDER_EMPTY_GROUND_TRUTH = 28,
  LADDER_MISSING_GROUP_TAG = 29,
  LADDER_SINGLE_CLASS = 30,
  LADDER_EMPTY_DATASET = 31,
  LADDER_CONFIG_ERROR = 32,
  LADDER_MISSING_INPUT = 33,
  LADDER_MOCK_MISS = 34,
  LADDER_INTERNAL = 99
} ladder_status;

typedef enum ladder_similarity { LADDER_SIM_DOT = 0, LADDER_SIM_COSINE = 1 } ladder_similarity;

typedef struct ladder_embeddings ladder_embeddings;
typedef struct ladder_dataset ladder_dataset;
typedef struct ladder_projector ladder_projector;
typedef struct ladder_bundle ladder_bundle;

LADDER_API const char* ladder_version(void);
/* "ShapeMismatch", "MissingInput", ...; "Unknown" for foreign codes. */
LADDER_API const char* ladder_status_name(int status);
/* Thread-local; empty string after a successful call. */
LADDER_API const char* ladder_last_error(void);
LADDER_API void ladder_free_string(char* s);

/* Runs a pipeline stage ("synth", "fit-projection", "discover", "slices",
 * "mitigate", "eval", "report", "validate") with a JSON run configuration.
 * result_json may be NULL; otherwise it receives the stage summary. */
LADDER_API int ladder_run_stage(const char* stage, const char* config_json, char** result_json);

/* Embedding matrices (.ladremb). */
LADDER_API int ladder_embeddings_create(size_t rows, size_t dim, const float* data,
                                        ladder_embeddings** out);
LADDER_API int ladder_embeddings_load(const char* path, ladder_embeddings** out);
LADDER_API int ladder_embeddings_save(const ladder_embeddings* m, const char* path);
LADDER_API size_t ladder_embeddings_rows(const ladder_embeddings* m);
LADDER_API size_t ladder_embeddings_dim(const ladder_embeddings* m);
LADDER_API const float* ladder_embeddings_data(const ladder_embeddings* m);
LADDER_API void ladder_embeddings_free(ladder_embeddings* m);

/* Datasets described by manifest.json. */
LADDER_API int ladder_dataset_load(const char* manifest_path, ladder_dataset** out);
LADDER_API size_t ladder_dataset_size(const ladder_dataset* d);
LADDER_API size_t ladder_dataset_num_classes(const ladder_dataset* d);
LADDER_API const ladder_embeddings* ladder_dataset_features(const ladder_dataset* d);
LADDER_API int ladder_dataset_label(const ladder_dataset* d, size_t row);
LADDER_API int ladder_dataset_prediction(const ladder_dataset* d, size_t row);
LADDER_API void ladder_dataset_free(ladder_dataset* d);

/* Affine projection from classifier features into the VLR space. */
LADDER_API int ladder_projection_fit(const ladder_embeddings* features,
                                     const ladder_embeddings* targets, double ridge,
                                     ladder_projector** out);
LADDER_API int ladder_projector_apply(const ladder_projector* p, const ladder_embeddings* features,
                                      ladder_embeddings** out);
LADDER_API double ladder_projector_fit_rmse(const ladder_projector* p);
LADDER_API int ladder_projector_save(const ladder_projector* p, const char* directory);
LADDER_API int ladder_projector_load(const char* directory, ladder_projector** out);
LADDER_API void ladder_projector_free(ladder_projector* p);

/* Top-k rows of `corpus` by similarity to `query`. Writes up to k entries
 * to out_indices/out_similarities and the count to out_count. */
LADDER_API int ladder_retrieve_topk(const double* query, size_t dim,
                                    const ladder_embeddings* corpus, size_t k,
                                    ladder_similarity mode, size_t* out_indices,
                                    double* out_similarities, size_t* out_count);

/* Hypothesis prompt and response handling. */
LADDER_API int ladder_build_prompt(const char* task, const char* modality,
                                   const char* const* sentences, size_t n_sentences, int medical,
                                   char** out_prompt);
/* On success hypotheses_json receives {"hypotheses":[...]}. */
LADDER_API int ladder_parse_llm_response(const char* text, char** hypotheses_json);

/* Metrics. */
LADDER_API int ladder_auroc(const double* scores, const int* labels, size_t n, double* out);

/* Mitigation bundles written by the mitigate stage. */
LADDER_API int ladder_bundle_load(const char* directory, ladder_bundle** out);
LADDER_API size_t ladder_bundle_num_heads(const ladder_bundle* b);
LADDER_API int ladder_bundle_predict(const ladder_bundle* b, const float* features_row,
                                     size_t d_phi, const float* projected_row, size_t d_psi,
                                     int* out_class);
LADDER_API void ladder_bundle_free(ladder_bundle* b);

#ifdef __cplusplus
}
#endif

#endif /* LADDER_LADDER_H_ */
