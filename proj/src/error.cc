// Copyright 2026 The patchtriage Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "patchtriage/error.h"

namespace patchtriage {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidCategory:
      return "InvalidCategory";
    case ErrorCode::kDiffParse:
      return "DiffParseError";
    case ErrorCode::kIo:
      return "IoError";
    case ErrorCode::kSchema:
      return "SchemaError";
    case ErrorCode::kInvalidRatio:
      return "InvalidRatio";
    case ErrorCode::kEmptyDiff:
      return "EmptyDiff";
    case ErrorCode::kBackendUnavailable:
      return "BackendUnavailable";
    case ErrorCode::kEmptyCompletion:
      return "EmptyCompletion";
    case ErrorCode::kEmptySummary:
      return "EmptySummary";
    case ErrorCode::kEmptyText:
      return "EmptyText";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kTooFewPoints:
      return "TooFewPoints";
    case ErrorCode::kDegenerateSeeding:
      return "DegenerateSeeding";
    case ErrorCode::kLengthMismatch:
      return "LengthMismatch";
    case ErrorCode::kNotReady:
      return "NotReady";
    case ErrorCode::kNotFound:
      return "NotFound";
    case ErrorCode::kBusy:
      return "Busy";
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace patchtriage
