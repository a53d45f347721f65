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

#ifndef LADDER_ERROR_HPP_
#define LADDER_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace ladder {

// Every domain failure in the library maps onto one of these codes. The
// numeric values are part of the C ABI (see ladder.h) and must not change.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kIoError = 2,
  kBadMagic = 3,
  kUnsupportedVersion = 4,
  kShapeMismatch = 5,
  kNonFinite = 6,
  kMissingFile = 7,
  kRowCountMismatch = 8,
  kDuplicateId = 9,
  kBadLabel = 10,
  kSingularSystem = 11,
  kEmptySet = 12,
  kDegenerateClass = 13,
  kDimensionMismatch = 14,
  kEmptySentences = 15,
  kEmptyRecords = 16,
  kHttpError = 17,
  kAuthError = 18,
  kParseError = 19,
  kPairingError = 20,
  kEmbedderUnavailable = 21,
  kEmptySentenceSet = 22,
  kDegenerateScores = 23,
  kEmptyCell = 24,
  kSingleClassSet = 25,
  kNoErrorSlices = 26,
  kEmptyBundle = 27,
  kEmptyGroundTruth = 28,
  kMissingGroupTag = 29,
  kSingleClass = 30,
  kEmptyDataset = 31,
  kConfigError = 32,
  kMissingInput = 33,
  kMockMiss = 34,
  kInternal = 99,
};

// Stable identifier used in machine-readable error output, e.g. "ShapeMismatch".
std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// LLM parse failures keep the verbatim text that failed to parse.
class ParseFailure : public Error {
 public:
  ParseFailure(ErrorCode code, const std::string& message, std::string raw)
      : Error(code, message), raw_(std::move(raw)) {}

  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

}  // namespace ladder

#endif  // LADDER_ERROR_HPP_
