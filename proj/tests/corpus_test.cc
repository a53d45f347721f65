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

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <limits>
#include <random>

#include "ladder/error.hpp"
#include "test_util.hpp"

namespace ladder {
namespace {

using ::ladder::testing::RandomMatrix;
using ::ladder::testing::ReadFile;
using ::ladder::testing::TempDir;
using ::ladder::testing::WriteFile;

std::string Header(std::uint32_t version, std::uint64_t rows, std::uint64_t dim) {
  std::string out = "LADR";
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((version >> (8 * i)) & 0xff));
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((rows >> (8 * i)) & 0xff));
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((dim >> (8 * i)) & 0xff));
  return out;
}

std::string FloatBytes(float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  std::string out;
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  return out;
}

TEST(EmbeddingFormat, EmptyMatrixLoads) {
  TempDir dir;
  WriteFile(dir / "e.ladremb", Header(1, 0, 4));
  EmbeddingMatrix m = LoadEmbeddings(dir / "e.ladremb");
  EXPECT_EQ(m.rows(), 0u);
  EXPECT_EQ(m.dim(), 4u);
}

TEST(EmbeddingFormat, IdentityPayload) {
  TempDir dir;
  WriteFile(dir / "e.ladremb", Header(1, 2, 2) + FloatBytes(1) + FloatBytes(0) + FloatBytes(0) +
                                   FloatBytes(1));
  EmbeddingMatrix m = LoadEmbeddings(dir / "e.ladremb");
  ASSERT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.at(0, 0), 1.0f);
  EXPECT_EQ(m.at(0, 1), 0.0f);
  EXPECT_EQ(m.at(1, 0), 0.0f);
  EXPECT_EQ(m.at(1, 1), 1.0f);
}

TEST(EmbeddingFormat, EmptyMatrixIsHeaderOnly) {
  TempDir dir;
  SaveEmbeddings(EmbeddingMatrix(0, 4), dir / "e.ladremb");
  EXPECT_EQ(ReadFile(dir / "e.ladremb"), Header(1, 0, 4));
  EXPECT_EQ(ReadFile(dir / "e.ladremb").size(), 24u);
}

TEST(EmbeddingFormat, ScalarPayloadIsLittleEndianFloat) {
  TempDir dir;
  SaveEmbeddings(EmbeddingMatrix(1, 1, {3.5f}), dir / "e.ladremb");
  const std::string bytes = ReadFile(dir / "e.ladremb");
  ASSERT_EQ(bytes.size(), 28u);
  // 3.5f == 0x40600000
  EXPECT_EQ(bytes.substr(24), std::string("\x00\x00\x60\x40", 4));
}

TEST(EmbeddingFormat, RandomRoundTripIsBitExact) {
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    std::mt19937_64 rng(seed);
    EmbeddingMatrix m = RandomMatrix(100, 16, rng);
    TempDir dir;
    SaveEmbeddings(m, dir / "m.ladremb");
    EmbeddingMatrix back = LoadEmbeddings(dir / "m.ladremb");
    ASSERT_EQ(back.rows(), m.rows());
    ASSERT_EQ(back.dim(), m.dim());
    EXPECT_EQ(std::memcmp(back.data().data(), m.data().data(), m.data().size() * sizeof(float)),
              0);
    SaveEmbeddings(back, dir / "n.ladremb");
    EXPECT_EQ(ReadFile(dir / "m.ladremb"), ReadFile(dir / "n.ladremb"));
  }
}

TEST(EmbeddingFormat, EncodeDecodeInMemory) {
  std::mt19937_64 rng(3);
  EmbeddingMatrix m = RandomMatrix(5, 3, rng);
  auto bytes = EncodeEmbeddings(m);
  EXPECT_EQ(bytes.size(), kEmbeddingHeaderBytes + 5 * 3 * 4);
  EXPECT_EQ(DecodeEmbeddings(bytes), m);
}

TEST(EmbeddingFormat, RejectsBadMagic) {
  TempDir dir;
  std::string bytes = Header(1, 1, 1) + FloatBytes(1);
  bytes[0] = 'X';
  WriteFile(dir / "e.ladremb", bytes);
  EXPECT_LADDER_ERROR(LoadEmbeddings(dir / "e.ladremb"), ErrorCode::kBadMagic);
}

TEST(EmbeddingFormat, RejectsUnknownVersion) {
  TempDir dir;
  WriteFile(dir / "e.ladremb", Header(2, 1, 1) + FloatBytes(1));
  EXPECT_LADDER_ERROR(LoadEmbeddings(dir / "e.ladremb"), ErrorCode::kUnsupportedVersion);
}

TEST(EmbeddingFormat, RejectsShortAndLongPayload) {
  TempDir dir;
  WriteFile(dir / "short.ladremb", Header(1, 2, 2) + FloatBytes(1));
  EXPECT_LADDER_ERROR(LoadEmbeddings(dir / "short.ladremb"), ErrorCode::kShapeMismatch);
  WriteFile(dir / "long.ladremb", Header(1, 1, 1) + FloatBytes(1) + "x");
  EXPECT_LADDER_ERROR(LoadEmbeddings(dir / "long.ladremb"), ErrorCode::kShapeMismatch);
  WriteFile(dir / "trunc.ladremb", "LADR\x01");
  EXPECT_LADDER_ERROR(LoadEmbeddings(dir / "trunc.ladremb"), ErrorCode::kShapeMismatch);
}

TEST(EmbeddingFormat, RejectsZeroDim) {
  TempDir dir;
  WriteFile(dir / "e.ladremb", Header(1, 0, 0));
  EXPECT_LADDER_ERROR(LoadEmbeddings(dir / "e.ladremb"), ErrorCode::kShapeMismatch);
  EXPECT_LADDER_ERROR(EmbeddingMatrix(2, 0), ErrorCode::kShapeMismatch);
  EXPECT_LADDER_ERROR(EmbeddingMatrix(2, 2, {1.0f}), ErrorCode::kShapeMismatch);
}

TEST(EmbeddingFormat, RejectsNonFinite) {
  TempDir dir;
  WriteFile(dir / "nan.ladremb",
            Header(1, 1, 2) + FloatBytes(1) + FloatBytes(std::numeric_limits<float>::quiet_NaN()));
  EXPECT_LADDER_ERROR(LoadEmbeddings(dir / "nan.ladremb"), ErrorCode::kNonFinite);
  WriteFile(dir / "inf.ladremb",
            Header(1, 1, 1) + FloatBytes(-std::numeric_limits<float>::infinity()));
  EXPECT_LADDER_ERROR(LoadEmbeddings(dir / "inf.ladremb"), ErrorCode::kNonFinite);
}

TEST(EmbeddingFormat, MissingFileAndMissingParent) {
  TempDir dir;
  EXPECT_LADDER_ERROR(LoadEmbeddings(dir / "nope.ladremb"), ErrorCode::kMissingFile);
  EXPECT_LADDER_ERROR(SaveEmbeddings(EmbeddingMatrix(1, 1), dir / "a" / "b.ladremb"),
                      ErrorCode::kIoError);
}

SliceDataset SmallDataset(std::size_t n, std::size_t dim, bool with_vlr) {
  std::mt19937_64 rng(11);
  SliceDataset d;
  d.name = "toy";
  d.classes = {"a", "b"};
  d.split = Split::kValidation;
  for (std::size_t i = 0; i < n; ++i) {
    SampleRecord s;
    s.id = "x" + std::to_string(i);
    s.label = static_cast<int>(i % 2);
    s.prediction = static_cast<int>((i / 2) % 2);
    if (i % 3 == 0) s.score = 0.1 * static_cast<double>(i % 10);
    if (i % 2 == 0) s.groups["water"] = static_cast<int>(i % 4 == 0);
    d.samples.push_back(s);
  }
  d.features = RandomMatrix(n, dim, rng);
  if (with_vlr) d.vlr_image = RandomMatrix(n, 4, rng);
  return d;
}

TEST(Dataset, SaveLoadRoundTrip) {
  TempDir dir;
  SliceDataset d = SmallDataset(3, 8, true);
  SaveDataset(d, dir.path());
  SliceDataset back = LoadDataset(dir / "manifest.json");
  EXPECT_EQ(back.size(), 3u);
  EXPECT_EQ(back, d);
  // Loading twice is deterministic.
  EXPECT_EQ(LoadDataset(dir / "manifest.json"), back);
}

TEST(Dataset, OptionalVlrImage) {
  TempDir dir;
  SliceDataset d = SmallDataset(4, 2, false);
  SaveDataset(d, dir.path());
  SliceDataset back = LoadDataset(dir / "manifest.json");
  EXPECT_FALSE(back.vlr_image.has_value());
  EXPECT_EQ(back, d);
}

TEST(Dataset, ManifestPathsResolveRelativeToManifest) {
  TempDir dir;
  std::filesystem::create_directories(dir / "data");
  SliceDataset d = SmallDataset(3, 8, false);
  SaveDataset(d, dir / "data");
  EXPECT_EQ(LoadDataset(dir / "data" / "manifest.json").size(), 3u);
}

TEST(Dataset, FeatureRowsShortOfSamples) {
  TempDir dir;
  SliceDataset d = SmallDataset(3, 8, false);
  SaveDataset(d, dir.path());
  std::mt19937_64 rng(1);
  SaveEmbeddings(RandomMatrix(2, 8, rng), dir / "features.ladremb");
  EXPECT_LADDER_ERROR(LoadDataset(dir / "manifest.json"), ErrorCode::kRowCountMismatch);
}

TEST(Dataset, MissingReferencedFile) {
  TempDir dir;
  SliceDataset d = SmallDataset(3, 8, true);
  SaveDataset(d, dir.path());
  std::filesystem::remove(dir / "vlr_image.ladremb");
  EXPECT_LADDER_ERROR(LoadDataset(dir / "manifest.json"), ErrorCode::kMissingFile);
  EXPECT_LADDER_ERROR(LoadDataset(dir / "absent.json"), ErrorCode::kMissingFile);
}

TEST(Dataset, BadManifestAndRecords) {
  TempDir dir;
  SliceDataset d = SmallDataset(3, 8, false);
  SaveDataset(d, dir.path());
  WriteFile(dir / "bad.json", "{not json");
  EXPECT_LADDER_ERROR(LoadDataset(dir / "bad.json"), ErrorCode::kParseError);
  WriteFile(dir / "samples.jsonl", "{\"id\":\"a\",\"label\":\"x\",\"prediction\":0}\n");
  EXPECT_LADDER_ERROR(LoadDataset(dir / "manifest.json"), ErrorCode::kParseError);
}

TEST(DatasetValidation, RejectsEachInvariantViolation) {
  SliceDataset ok = SmallDataset(4, 3, true);
  EXPECT_NO_THROW(ValidateDataset(ok));

  SliceDataset d = ok;
  d.samples[1].label = 2;
  EXPECT_LADDER_ERROR(ValidateDataset(d), ErrorCode::kBadLabel);

  d = ok;
  d.samples[1].prediction = -1;
  EXPECT_LADDER_ERROR(ValidateDataset(d), ErrorCode::kBadLabel);

  d = ok;
  d.classes.clear();
  EXPECT_LADDER_ERROR(ValidateDataset(d), ErrorCode::kBadLabel);

  d = ok;
  d.samples[2].id = d.samples[0].id;
  EXPECT_LADDER_ERROR(ValidateDataset(d), ErrorCode::kDuplicateId);

  d = ok;
  d.samples[0].score = 1.5;
  EXPECT_LADDER_ERROR(ValidateDataset(d), ErrorCode::kInvalidArgument);

  d = ok;
  d.samples[0].groups["water"] = 2;
  EXPECT_LADDER_ERROR(ValidateDataset(d), ErrorCode::kInvalidArgument);

  d = ok;
  d.samples.pop_back();
  EXPECT_LADDER_ERROR(ValidateDataset(d), ErrorCode::kRowCountMismatch);

  d = ok;
  std::mt19937_64 rng(2);
  d.vlr_image = RandomMatrix(3, 4, rng);
  EXPECT_LADDER_ERROR(ValidateDataset(d), ErrorCode::kRowCountMismatch);

  d = ok;
  d.features.at(0, 0) = std::numeric_limits<float>::infinity();
  EXPECT_LADDER_ERROR(ValidateDataset(d), ErrorCode::kNonFinite);
}

TEST(TextCorpusIo, RoundTripAndErrors) {
  TempDir dir;
  TextCorpus c;
  c.sentences = {{"s1", "a bird on water"}, {"s2", "a \"quoted\" phrase, with comma"}};
  std::mt19937_64 rng(4);
  c.embeddings = RandomMatrix(2, 5, rng);
  SaveTextCorpus(c, dir / "corpus.jsonl", dir / "corpus.ladremb");
  EXPECT_EQ(LoadTextCorpus(dir / "corpus.jsonl", dir / "corpus.ladremb"), c);

  WriteFile(dir / "dup.jsonl", "{\"id\":\"s1\",\"text\":\"a\"}\n{\"id\":\"s1\",\"text\":\"b\"}\n");
  EXPECT_LADDER_ERROR(LoadTextCorpus(dir / "dup.jsonl", dir / "corpus.ladremb"),
                      ErrorCode::kDuplicateId);
  WriteFile(dir / "one.jsonl", "{\"id\":\"s1\",\"text\":\"a\"}\n");
  EXPECT_LADDER_ERROR(LoadTextCorpus(dir / "one.jsonl", dir / "corpus.ladremb"),
                      ErrorCode::kRowCountMismatch);
}

TEST(EmbeddingMatrixTest, SelectRows) {
  EmbeddingMatrix m(3, 2, {1, 2, 3, 4, 5, 6});
  std::vector<std::size_t> idx = {2, 0};
  EmbeddingMatrix s = m.SelectRows(idx);
  EXPECT_EQ(s, EmbeddingMatrix(2, 2, {5, 6, 1, 2}));
  std::vector<std::size_t> bad = {3};
  EXPECT_LADDER_ERROR(m.SelectRows(bad), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace ladder
