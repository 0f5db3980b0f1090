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

// Patch records and labeled summaries, their JSONL/CSV persistence, and the
// dedup/split steps used when building a training corpus.
//
// JSONL is canonical: one object per line with exactly the fields
//   patch_id, project, llm, diff_raw, summary_raw, summary_clean,
//   category_manual, category_auto, compiled, passed, noop
// and null for absent optionals. CSV uses the same column order with
// RFC-4180 quoting; present strings are always quoted so that an unquoted
// empty cell means "absent" and `""` means the empty string.

#ifndef PATCHTRIAGE_DATASET_H_
#define PATCHTRIAGE_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "patchtriage/error.h"
#include "patchtriage/taxonomy.h"

namespace patchtriage {

struct PatchRecord {
  std::string patch_id;
  std::string project;
  std::string llm;
  std::string diff_raw;
  std::optional<std::string> summary_raw;
  std::optional<std::string> summary_clean;
  std::optional<CategoryId> category_manual;
  std::optional<CategoryId> category_auto;
  std::optional<bool> compiled;
  std::optional<bool> passed;
  std::optional<bool> noop;

  friend bool operator==(const PatchRecord&, const PatchRecord&) = default;
};

struct LabeledSummary {
  std::string text;
  CategoryId category;
  bool synthetic = false;

  friend bool operator==(const LabeledSummary&,
                         const LabeledSummary&) = default;
};

enum class RecordFormat { kJsonl, kCsv };

// "jsonl" or "csv"; anything else is kInvalidArgument.
RecordFormat parse_record_format(std::string_view name);

// Throws Error(kSchema) naming `index` when an invariant is violated.
void validate_record(const PatchRecord& record, std::size_t index);

nlohmann::json record_to_json(const PatchRecord& record);
PatchRecord record_from_json(const nlohmann::json& j, std::size_t index);

std::vector<PatchRecord> parse_records(std::string_view text,
                                       RecordFormat format);
std::string serialize_records(std::span<const PatchRecord> records,
                              RecordFormat format);

std::vector<PatchRecord> load_records(const std::filesystem::path& path,
                                      RecordFormat format);
void save_records(std::span<const PatchRecord> records,
                  const std::filesystem::path& path, RecordFormat format);

// Labeled summaries as JSONL: {"text": ..., "category": ..., "synthetic": ...}
std::vector<LabeledSummary> parse_summaries(std::string_view jsonl);
std::string serialize_summaries(std::span<const LabeledSummary> items);

// Keeps the first occurrence of each exact text. Identical texts carrying
// different categories keep the first label and emit a ConflictingLabel
// warning.
std::vector<LabeledSummary> dedup_summaries(
    std::span<const LabeledSummary> items, Warnings* warnings = nullptr);

struct TrainTestSplit {
  std::vector<LabeledSummary> train;
  std::vector<LabeledSummary> test;
};

inline constexpr double kDefaultSplitRatio = 0.8;
inline constexpr std::uint64_t kDefaultSplitSeed = 42;

// Stratified by category: each category with n >= 2 items contributes
// clamp(round(ratio * n), 1, n - 1) items to train; smaller categories go
// wholly to train with a warning. Both halves keep input order.
TrainTestSplit split_train_test(std::span<const LabeledSummary> items,
                                double ratio = kDefaultSplitRatio,
                                std::uint64_t seed = kDefaultSplitSeed,
                                Warnings* warnings = nullptr);

}  // namespace patchtriage

#endif  // PATCHTRIAGE_DATASET_H_
