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

#include "ladder/error.hpp"

namespace ladder {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kRowCountMismatch: return "RowCountMismatch";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kBadLabel: return "BadLabel";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kDegenerateClass: return "DegenerateClass";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptySentences: return "EmptySentences";
    case ErrorCode::kEmptyRecords: return "EmptyRecords";
    case ErrorCode::kHttpError: return "HttpError";
    case ErrorCode::kAuthError: return "AuthError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kPairingError: return "PairingError";
    case ErrorCode::kEmbedderUnavailable: return "EmbedderUnavailable";
    case ErrorCode::kEmptySentenceSet: return "EmptySentenceSet";
    case ErrorCode::kDegenerateScores: return "DegenerateScores";
    case ErrorCode::kEmptyCell: return "EmptyCell";
    case ErrorCode::kSingleClassSet: return "SingleClassSet";
    case ErrorCode::kNoErrorSlices: return "NoErrorSlices";
    case ErrorCode::kEmptyBundle: return "EmptyBundle";
    case ErrorCode::kEmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::kMissingGroupTag: return "MissingGroupTag";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kMissingInput: return "MissingInput";
    case ErrorCode::kMockMiss: return "MockMiss";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

}  // namespace ladder
