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

// Per-category outcome statistics and the skip/evaluate filter built on
// them, plus replay of the filter over a recorded patch stream.

#ifndef PATCHTRIAGE_TRIAGE_H_
#define PATCHTRIAGE_TRIAGE_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "patchtriage/dataset.h"
#include "patchtriage/error.h"
#include "patchtriage/taxonomy.h"

namespace patchtriage {

struct CategoryCounts {
  std::size_t total = 0;
  std::size_t compiled = 0;
  std::size_t passed = 0;
  std::size_t noop = 0;

  // Null when total is 0.
  std::optional<double> compile_rate() const;
  std::optional<double> pass_rate() const;
  std::optional<double> noop_rate() const;
  // Passed over compiled; null when nothing compiled.
  std::optional<double> pass_rate_of_compiled() const;

  friend bool operator==(const CategoryCounts&,
                         const CategoryCounts&) = default;
};

struct CategoryStats {
  std::array<CategoryCounts, kNumCategories> categories{};
  std::size_t excluded = 0;

  const CategoryCounts& operator[](CategoryId c) const {
    return categories[c.value()];
  }
  // Throws Error(kInvalidArgument) if passed && !compiled.
  void add(CategoryId category, bool compiled, bool passed, bool noop);
  std::size_t total() const;
};

enum class CategoryField { kManual, kAuto };
// Throws Error(kInvalidArgument) for anything but "manual" or "auto".
CategoryField parse_category_field(std::string_view name);

// Records without the chosen category or any of the three flags, or with
// passed but not compiled, are excluded with a warning.
CategoryStats accumulate_stats(std::span<const PatchRecord> records,
                               CategoryField field,
                               Warnings* warnings = nullptr);

enum class PassRateBasis { kTotal, kCompiled };

struct TriagePolicy {
  bool skip_noop_categories = true;
  double min_pass_rate = 0.10;  // tau
  std::size_t min_samples = 20;
  PassRateBasis pass_rate_basis = PassRateBasis::kTotal;

  // Skips nothing.
  static TriagePolicy neutral();
  // Throws Error(kInvalidArgument) unless 0 <= tau <= 1.
  void validate() const;
};

enum class Verdict { kSkip, kEvaluate };
enum class SkipReason { kNoOpCategory, kLowPassRate, kDefault };

struct TriageDecision {
  Verdict verdict = Verdict::kEvaluate;
  SkipReason reason = SkipReason::kDefault;

  friend bool operator==(const TriageDecision&,
                         const TriageDecision&) = default;
};

std::string_view verdict_name(Verdict v);
std::string_view reason_name(SkipReason r);

// NoOp categories are skipped outright when enabled. Otherwise a category
// with at least min_samples records is skipped when its pass rate is below
// tau. Under the compiled basis a category where nothing compiled counts as
// pass rate 0.
TriageDecision decide(const TriagePolicy& policy, const CategoryStats& stats,
                      CategoryId predicted);

enum class ReplayMode { kPrequential, kOracle };

struct ReplayReport {
  std::size_t records = 0;
  std::size_t evaluations_skipped = 0;
  std::size_t evaluations_run = 0;
  std::size_t passing_patches_lost = 0;
  std::size_t noops_avoided = 0;
  std::size_t skipped_noop_category = 0;
  std::size_t skipped_low_pass_rate = 0;

  friend bool operator==(const ReplayReport&, const ReplayReport&) = default;
};

// Streams the records in order. Prequential mode decides each record from
// the records before it; oracle mode uses statistics of the whole stream.
// Throws Error(kSchema) naming the first record missing category_auto or a
// flag.
ReplayReport replay(std::span<const PatchRecord> records,
                    const TriagePolicy& policy,
                    ReplayMode mode = ReplayMode::kPrequential);

struct MismatchEntry {
  int auto_category = 0;
  int manual_category = 0;
  std::size_t count = 0;

  friend bool operator==(const MismatchEntry&, const MismatchEntry&) = default;
};

// Disagreeing (auto, manual) pairs by descending count, then ascending
// (auto, manual). Records lacking either category are skipped with a
// warning.
std::vector<MismatchEntry> mismatch_matrix(std::span<const PatchRecord> records,
                                           Warnings* warnings = nullptr);

// "auto,manual,count" header then one row per entry.
std::string mismatches_to_csv(std::span<const MismatchEntry> entries);

nlohmann::json stats_to_json(const CategoryStats& stats);
nlohmann::json policy_to_json(const TriagePolicy& policy);
// Missing keys keep their defaults. Throws Error(kInvalidArgument).
TriagePolicy policy_from_json(const nlohmann::json& j);
nlohmann::json decision_to_json(const TriageDecision& decision);
nlohmann::json replay_to_json(const ReplayReport& report);
nlohmann::json mismatches_to_json(std::span<const MismatchEntry> entries);

}  // namespace patchtriage

#endif  // PATCHTRIAGE_TRIAGE_H_
