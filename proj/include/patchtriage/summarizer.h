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

// Short natural-language summaries of patch diffs: the prompt sent to an
// LLM, the HTTP completion backend, and the deterministic cleanup applied
// to raw completions before classification.

#ifndef PATCHTRIAGE_SUMMARIZER_H_
#define PATCHTRIAGE_SUMMARIZER_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "patchtriage/error.h"

namespace patchtriage {

inline constexpr std::string_view kPromptInstruction =
    "Summarize the following Java diff in exactly 15 words:";

// kPromptInstruction + " " + diff_raw. Throws Error(kEmptyDiff) for an
// empty diff; a textual no-op needs no summary.
std::string build_prompt(std::string_view diff_raw);

struct SummarizerConfig {
  std::string endpoint = "http://127.0.0.1:11434/api/generate";
  std::string model_name = "llama3";
  double timeout_seconds = 60.0;
  int max_retries = 2;
  double temperature = 0.0;
  int parallelism = 4;

  // Throws Error(kInvalidArgument).
  void validate() const;
};

// PATCHTRIAGE_ENDPOINT / PATCHTRIAGE_MODEL_NAME override the given values.
SummarizerConfig apply_env_overrides(SummarizerConfig config);

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  // Returns the raw completion text for `prompt`.
  virtual std::string complete(const std::string& prompt) = 0;
};

// POSTs {"model", "prompt", "temperature", "stream": false} to the
// configured endpoint.
class HttpCompletionBackend : public CompletionBackend {
 public:
  explicit HttpCompletionBackend(SummarizerConfig config);
  std::string complete(const std::string& prompt) override;

 private:
  SummarizerConfig config_;
};

// Pulls the completion text out of the response shapes used by common
// local LLM servers: {"response"}, {"content"}, {"text"}, {"completion"},
// {"choices": [{"text"}]} and {"choices": [{"message": {"content"}}]}.
// Throws Error(kBackendUnavailable) when none is present.
std::string extract_completion_text(const nlohmann::json& response);

// Returns the backend's completion verbatim. Throws Error(kEmptyDiff),
// Error(kEmptyCompletion) for a blank completion, or whatever the backend
// throws.
std::string summarize(CompletionBackend& backend, std::string_view diff_raw);
std::string summarize(const SummarizerConfig& config,
                      std::string_view diff_raw);

struct SummaryOutcome {
  std::optional<std::string> summary;
  std::optional<ErrorCode> error;
  std::string error_message;
};

// Summarizes every diff with at most `parallelism` concurrent backend
// calls. Outcomes are in input order; failures are per item.
std::vector<SummaryOutcome> summarize_batch(
    CompletionBackend& backend, std::span<const std::string> diffs,
    int parallelism);

struct CleanupRules {
  // Matched case-insensitively at the start of the text.
  std::vector<std::string> strip_prefixes;
  // UTF-8 encoded code points deleted everywhere.
  std::vector<std::string> strip_chars;
  // Whole-word replacements, matched case-insensitively; an upper-case
  // first letter in the source carries over to the replacement.
  std::vector<std::pair<std::string, std::string>> verb_map;

  static CleanupRules defaults();

  // Rejects tables whose replacements could be rewritten again, which
  // would break idempotence. Throws Error(kInvalidArgument).
  void validate() const;
};

// Trims, strips leading filler phrases, deletes quote characters,
// collapses whitespace and maps verbs, repeating until nothing changes.
// Throws Error(kEmptySummary) if nothing is left.
std::string clean_summary(std::string_view raw,
                          const CleanupRules& rules = CleanupRules::defaults());

std::size_t word_count(std::string_view text);

}  // namespace patchtriage

#endif  // PATCHTRIAGE_SUMMARIZER_H_
