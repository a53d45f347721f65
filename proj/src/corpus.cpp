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

#include "ladder/corpus.hpp"

#include <cmath>
#include <cstring>
#include <unordered_set>

#include "io_util.hpp"
#include "json.hpp"
#include "ladder/error.hpp"

namespace ladder {

namespace fs = std::filesystem;
using nlohmann::json;

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim)
    : EmbeddingMatrix(rows, dim, std::vector<float>(rows * dim, 0.0f)) {}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<float> data)
    : rows_(rows), dim_(dim), data_(std::move(data)) {
  if (dim_ == 0) {
    throw Error(ErrorCode::kShapeMismatch, "embedding dim must be >= 1");
  }
  if (data_.size() != rows_ * dim_) {
    throw Error(ErrorCode::kShapeMismatch,
                "embedding data length " + std::to_string(data_.size()) + " != " +
                    std::to_string(rows_) + "x" + std::to_string(dim_));
  }
}

EmbeddingMatrix EmbeddingMatrix::SelectRows(std::span<const std::size_t> indices) const {
  std::vector<float> out;
  out.reserve(indices.size() * dim_);
  for (std::size_t i : indices) {
    if (i >= rows_) throw Error(ErrorCode::kInvalidArgument, "row index out of range");
    auto r = row(i);
    out.insert(out.end(), r.begin(), r.end());
  }
  return EmbeddingMatrix(indices.size(), dim_, std::move(out));
}

std::string SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "validation";
}

Split ParseSplit(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "validation" || name == "val") return Split::kValidation;
  if (name == "test") return Split::kTest;
  throw Error(ErrorCode::kInvalidArgument, "unknown split '" + name + "'");
}

std::vector<std::size_t> SliceDataset::ClassMembers(int class_label) const {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].label == class_label) members.push_back(i);
  }
  return members;
}

std::vector<int> SliceDataset::Labels() const {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.label);
  return out;
}

std::vector<int> SliceDataset::Predictions() const {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.prediction);
  return out;
}

namespace {

constexpr char kMagic[4] = {'L', 'A', 'D', 'R'};

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void PutU64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t GetLE(std::span<const std::uint8_t> bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(bytes[offset + i]) << (8 * i);
  }
  return v;
}

void CheckFinite(const EmbeddingMatrix& m, const std::string& what) {
  const auto& data = m.data();
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (!std::isfinite(data[k])) {
      throw Error(ErrorCode::kNonFinite, what + ": non-finite value at row " +
                                             std::to_string(k / m.dim()) + ", column " +
                                             std::to_string(k % m.dim()));
    }
  }
}

}  // namespace

std::vector<std::uint8_t> EncodeEmbeddings(const EmbeddingMatrix& matrix) {
  std::vector<std::uint8_t> out;
  out.reserve(kEmbeddingHeaderBytes + matrix.data().size() * 4);
  out.insert(out.end(), kMagic, kMagic + 4);
  PutU32(out, kEmbeddingFormatVersion);
  PutU64(out, matrix.rows());
  PutU64(out, matrix.dim());
  for (float f : matrix.data()) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    PutU32(out, bits);
  }
  return out;
}

EmbeddingMatrix DecodeEmbeddings(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "embedding file does not start with 'LADR'");
  }
  if (bytes.size() < kEmbeddingHeaderBytes) {
    throw Error(ErrorCode::kShapeMismatch, "embedding header truncated");
  }
  const auto version = static_cast<std::uint32_t>(GetLE(bytes, 4, 4));
  if (version != kEmbeddingFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "embedding format version " + std::to_string(version) + " not supported");
  }
  const std::uint64_t rows = GetLE(bytes, 8, 8);
  const std::uint64_t dim = GetLE(bytes, 16, 8);
  if (dim == 0) {
    throw Error(ErrorCode::kShapeMismatch, "embedding dim must be >= 1");
  }
  const std::uint64_t payload = bytes.size() - kEmbeddingHeaderBytes;
  // Guard the multiplication against overflow before comparing.
  if (rows > payload / 4 / dim + 1 || rows * dim * 4 != payload) {
    throw Error(ErrorCode::kShapeMismatch,
                "payload of " + std::to_string(payload) + " bytes does not match " +
                    std::to_string(rows) + "x" + std::to_string(dim) + " float32");
  }
  std::vector<float> data(rows * dim);
  for (std::size_t k = 0; k < data.size(); ++k) {
    const auto bits = static_cast<std::uint32_t>(GetLE(bytes, kEmbeddingHeaderBytes + 4 * k, 4));
    std::memcpy(&data[k], &bits, sizeof(bits));
  }
  EmbeddingMatrix m(rows, dim, std::move(data));
  CheckFinite(m, "embedding file");
  return m;
}

EmbeddingMatrix LoadEmbeddings(const fs::path& path) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kMissingFile, "missing embedding file " + path.string());
  }
  try {
    return DecodeEmbeddings(internal::ReadBinaryFile(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void SaveEmbeddings(const EmbeddingMatrix& matrix, const fs::path& path) {
  const auto parent = path.parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw Error(ErrorCode::kIoError, "parent directory does not exist: " + parent.string());
  }
  internal::WriteFileAtomic(path, EncodeEmbeddings(matrix));
}

void ValidateDataset(const SliceDataset& dataset) {
  if (dataset.classes.empty()) {
    throw Error(ErrorCode::kBadLabel, "dataset has no classes");
  }
  const int num_classes = static_cast<int>(dataset.classes.size());
  if (dataset.features.rows() != dataset.samples.size()) {
    throw Error(ErrorCode::kRowCountMismatch,
                "features has " + std::to_string(dataset.features.rows()) + " rows for " +
                    std::to_string(dataset.samples.size()) + " samples");
  }
  if (dataset.vlr_image && dataset.vlr_image->rows() != dataset.samples.size()) {
    throw Error(ErrorCode::kRowCountMismatch,
                "vlr_image has " + std::to_string(dataset.vlr_image->rows()) + " rows for " +
                    std::to_string(dataset.samples.size()) + " samples");
  }
  CheckFinite(dataset.features, "features");
  if (dataset.vlr_image) CheckFinite(*dataset.vlr_image, "vlr_image");
  std::unordered_set<std::string> seen;
  for (const auto& s : dataset.samples) {
    if (!seen.insert(s.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate sample id '" + s.id + "'");
    }
    if (s.label < 0 || s.label >= num_classes) {
      throw Error(ErrorCode::kBadLabel, "sample '" + s.id + "' has label " +
                                            std::to_string(s.label) + " outside [0, " +
                                            std::to_string(num_classes) + ")");
    }
    if (s.prediction < 0 || s.prediction >= num_classes) {
      throw Error(ErrorCode::kBadLabel, "sample '" + s.id + "' has prediction " +
                                            std::to_string(s.prediction) + " outside [0, " +
                                            std::to_string(num_classes) + ")");
    }
    if (s.score && !(*s.score >= 0.0 && *s.score <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "sample '" + s.id + "' has score outside [0,1]");
    }
    for (const auto& [name, value] : s.groups) {
      if (value != 0 && value != 1) {
        throw Error(ErrorCode::kInvalidArgument,
                    "sample '" + s.id + "' group '" + name + "' must be 0 or 1");
      }
    }
  }
}

namespace {

SampleRecord ParseSample(const json& row) {
  SampleRecord s;
  try {
    s.id = row.at("id").get<std::string>();
    s.label = row.at("label").get<int>();
    s.prediction = row.at("prediction").get<int>();
    if (row.contains("score") && !row["score"].is_null()) {
      s.score = row["score"].get<double>();
    }
    if (row.contains("groups") && !row["groups"].is_null()) {
      for (const auto& [name, value] : row["groups"].items()) {
        s.groups[name] = value.get<int>();
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("bad sample record: ") + e.what());
  }
  return s;
}

json SampleToJson(const SampleRecord& s) {
  json row = {{"id", s.id}, {"label", s.label}, {"prediction", s.prediction}};
  if (s.score) row["score"] = *s.score;
  if (!s.groups.empty()) row["groups"] = s.groups;
  return row;
}

}  // namespace

SliceDataset LoadDataset(const fs::path& manifest_path) {
  if (!fs::exists(manifest_path)) {
    throw Error(ErrorCode::kMissingFile, "missing manifest " + manifest_path.string());
  }
  const json manifest = internal::ReadJsonFile(manifest_path);
  const fs::path base = manifest_path.parent_path();
  SliceDataset ds;
  fs::path samples_path, features_path;
  std::optional<fs::path> vlr_path;
  try {
    ds.name = manifest.at("name").get<std::string>();
    ds.classes = manifest.at("classes").get<std::vector<std::string>>();
    ds.split = ParseSplit(manifest.value("split", std::string("validation")));
    samples_path = internal::ResolvePath(base, manifest.at("samples").get<std::string>());
    features_path = internal::ResolvePath(base, manifest.at("features").get<std::string>());
    if (manifest.contains("vlr_image") && !manifest["vlr_image"].is_null()) {
      vlr_path = internal::ResolvePath(base, manifest["vlr_image"].get<std::string>());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError,
                manifest_path.string() + ": bad manifest: " + e.what());
  }
  for (const auto& p : {samples_path, features_path}) {
    if (!fs::exists(p)) throw Error(ErrorCode::kMissingFile, "missing file " + p.string());
  }
  if (vlr_path && !fs::exists(*vlr_path)) {
    throw Error(ErrorCode::kMissingFile, "missing file " + vlr_path->string());
  }
  for (const auto& row : internal::ReadJsonLines(samples_path)) {
    ds.samples.push_back(ParseSample(row));
  }
  ds.features = LoadEmbeddings(features_path);
  if (vlr_path) ds.vlr_image = LoadEmbeddings(*vlr_path);
  ValidateDataset(ds);
  return ds;
}

void SaveDataset(const SliceDataset& dataset, const fs::path& directory) {
  ValidateDataset(dataset);
  fs::create_directories(directory);
  json manifest = {{"name", dataset.name},
                   {"classes", dataset.classes},
                   {"split", SplitName(dataset.split)},
                   {"samples", "samples.jsonl"},
                   {"features", "features.ladremb"}};
  std::vector<json> rows;
  rows.reserve(dataset.samples.size());
  for (const auto& s : dataset.samples) rows.push_back(SampleToJson(s));
  internal::WriteFileAtomic(directory / "samples.jsonl", internal::DumpJsonLines(rows));
  SaveEmbeddings(dataset.features, directory / "features.ladremb");
  if (dataset.vlr_image) {
    manifest["vlr_image"] = "vlr_image.ladremb";
    SaveEmbeddings(*dataset.vlr_image, directory / "vlr_image.ladremb");
  }
  internal::WriteJsonAtomic(directory / "manifest.json", manifest);
}

TextCorpus LoadTextCorpus(const fs::path& sentences_jsonl, const fs::path& embeddings_path) {
  TextCorpus corpus;
  std::unordered_set<std::string> seen;
  for (const auto& row : internal::ReadJsonLines(sentences_jsonl)) {
    Sentence s;
    try {
      s.id = row.at("id").get<std::string>();
      s.text = row.at("text").get<std::string>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, std::string("bad corpus record: ") + e.what());
    }
    if (!seen.insert(s.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate sentence id '" + s.id + "'");
    }
    corpus.sentences.push_back(std::move(s));
  }
  corpus.embeddings = LoadEmbeddings(embeddings_path);
  if (corpus.embeddings.rows() != corpus.sentences.size()) {
    throw Error(ErrorCode::kRowCountMismatch,
                "corpus embeddings have " + std::to_string(corpus.embeddings.rows()) +
                    " rows for " + std::to_string(corpus.sentences.size()) + " sentences");
  }
  return corpus;
}

void SaveTextCorpus(const TextCorpus& corpus, const fs::path& sentences_jsonl,
                    const fs::path& embeddings_path) {
  if (corpus.embeddings.rows() != corpus.sentences.size()) {
    throw Error(ErrorCode::kRowCountMismatch, "corpus embeddings/sentences count differ");
  }
  std::vector<json> rows;
  rows.reserve(corpus.sentences.size());
  for (const auto& s : corpus.sentences) rows.push_back({{"id", s.id}, {"text", s.text}});
  internal::WriteFileAtomic(sentences_jsonl, internal::DumpJsonLines(rows));
  SaveEmbeddings(corpus.embeddings, embeddings_path);
}

}  // namespace ladder
