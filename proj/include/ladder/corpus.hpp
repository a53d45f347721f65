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

#ifndef LADDER_CORPUS_HPP_
#define LADDER_CORPUS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ladder {

// Dense row-major real32 matrix. Storage is float; consumers widen to double.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  // Zero-filled rows x dim matrix. dim must be >= 1.
  EmbeddingMatrix(std::size_t rows, std::size_t dim);
  EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<float> data);

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return rows_ == 0; }

  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<float> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  float at(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  float& at(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }

  const std::vector<float>& data() const { return data_; }

  // Rows selected by index, in the given order.
  EmbeddingMatrix SelectRows(std::span<const std::size_t> indices) const;

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 1;
  std::vector<float> data_;
};

enum class Split { kTrain, kValidation, kTest };

std::string SplitName(Split split);
Split ParseSplit(const std::string& name);

struct SampleRecord {
  std::string id;
  int label = 0;
  int prediction = 0;
  std::optional<double> score;
  std::map<std::string, int> groups;

  bool correct() const { return label == prediction; }
  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct SliceDataset {
  std::string name;
  std::vector<std::string> classes;
  Split split = Split::kValidation;
  std::vector<SampleRecord> samples;
  EmbeddingMatrix features;                 // classifier representation, one row per sample
  std::optional<EmbeddingMatrix> vlr_image;  // vision-language image embedding

  std::size_t size() const { return samples.size(); }
  std::size_t num_classes() const { return classes.size(); }
  // Row indices whose label equals `class_label`, ascending.
  std::vector<std::size_t> ClassMembers(int class_label) const;
  std::vector<int> Labels() const;
  std::vector<int> Predictions() const;

  friend bool operator==(const SliceDataset&, const SliceDataset&) = default;
};

struct Sentence {
  std::string id;
  std::string text;
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct TextCorpus {
  std::vector<Sentence> sentences;
  EmbeddingMatrix embeddings;

  std::size_t size() const { return sentences.size(); }
  friend bool operator==(const TextCorpus&, const TextCorpus&) = default;
};

// Binary ".ladremb" format: "LADR", u32 version (=1), u64 rows, u64 dim, then
// rows*dim little-endian float32 values. No padding, no trailer.
inline constexpr std::uint32_t kEmbeddingFormatVersion = 1;
inline constexpr std::size_t kEmbeddingHeaderBytes = 24;

std::vector<std::uint8_t> EncodeEmbeddings(const EmbeddingMatrix& matrix);
EmbeddingMatrix DecodeEmbeddings(std::span<const std::uint8_t> bytes);

EmbeddingMatrix LoadEmbeddings(const std::filesystem::path& path);
void SaveEmbeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path);

// Throws on any violated dataset invariant.
void ValidateDataset(const SliceDataset& dataset);

// Loads manifest.json and every file it references. Relative paths in the
// manifest resolve against the manifest's directory.
SliceDataset LoadDataset(const std::filesystem::path& manifest_path);

// Writes manifest.json, samples.jsonl, features.ladremb and (if present)
// vlr_image.ladremb into `directory`.
void SaveDataset(const SliceDataset& dataset, const std::filesystem::path& directory);

TextCorpus LoadTextCorpus(const std::filesystem::path& sentences_jsonl,
                          const std::filesystem::path& embeddings_path);
void SaveTextCorpus(const TextCorpus& corpus, const std::filesystem::path& sentences_jsonl,
                    const std::filesystem::path& embeddings_path);

}  // namespace ladder

#endif  // LADDER_CORPUS_HPP_
