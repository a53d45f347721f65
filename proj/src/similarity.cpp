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

#include "ladder/similarity.hpp"

#include "ladder/error.hpp"

namespace ladder {

std::string SimilarityModeName(SimilarityMode mode) {
  return mode == SimilarityMode::kDot ? "dot" : "cosine";
}

SimilarityMode ParseSimilarityMode(const std::string& name) {
  if (name == "dot") return SimilarityMode::kDot;
  if (name == "cosine") return SimilarityMode::kCosine;
  throw Error(ErrorCode::kConfigError, "similarity must be 'dot' or 'cosine', got '" + name + "'");
}

namespace {

template <typename T>
std::vector<double> NormalizedImpl(std::span<const T> v) {
  const double n = Norm(v);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = n > 0.0 ? static_cast<double>(v[i]) / n : 0.0;
  }
  return out;
}

}  // namespace

std::vector<double> Normalized(std::span<const double> v) { return NormalizedImpl(v); }
std::vector<double> Normalized(std::span<const float> v) { return NormalizedImpl(v); }

}  // namespace ladder
