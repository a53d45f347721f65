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

#ifndef LADDER_SIMILARITY_HPP_
#define LADDER_SIMILARITY_HPP_

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace ladder {

// `kCosine` l2-normalises both operands; `kDot` is the raw inner product.
enum class SimilarityMode { kDot, kCosine };

std::string SimilarityModeName(SimilarityMode mode);
SimilarityMode ParseSimilarityMode(const std::string& name);

template <typename A, typename B>
double Dot(std::span<const A> a, std::span<const B> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

template <typename A>
double Norm(std::span<const A> a) {
  return std::sqrt(Dot(a, a));
}

// Zero vectors have similarity 0 with everything under kCosine.
template <typename A, typename B>
double Similarity(std::span<const A> a, std::span<const B> b, SimilarityMode mode) {
  const double dot = Dot(a, b);
  if (mode == SimilarityMode::kDot) return dot;
  const double denom = Norm(a) * Norm(b);
  return denom > 0.0 ? dot / denom : 0.0;
}

// Unit-length copy; zero vectors stay zero.
std::vector<double> Normalized(std::span<const double> v);
std::vector<double> Normalized(std::span<const float> v);

}  // namespace ladder

#endif  // LADDER_SIMILARITY_HPP_
