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

#ifndef PATCHTRIAGE_ERROR_H_
#define PATCHTRIAGE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace patchtriage {

// Every domain failure surfaces as an Error carrying one of these codes.
// The names returned by error_code_name() are part of the CLI and HTTP
// output contract.
enum class ErrorCode {
  kInvalidCategory,
  kDiffParse,
  kIo,
  kSchema,
  kInvalidRatio,
  kEmptyDiff,
  kBackendUnavailable,
  kEmptyCompletion,
  kEmptySummary,
  kEmptyText,
  kDimensionMismatch,
  kTooFewPoints,
  kDegenerateSeeding,
  kLengthMismatch,
  kNotReady,
  kNotFound,
  kBusy,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Non-fatal diagnostics (conflicting labels, excluded records, ...).
// Functions that can warn take an optional sink; nullptr discards.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

}  // namespace patchtriage

#endif  // PATCHTRIAGE_ERROR_H_
