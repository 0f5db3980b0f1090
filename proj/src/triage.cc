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

#include "patchtriage/triage.h"

#include <algorithm>
#include <map>

namespace patchtriage {
namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

nlohmann::json nullable(std::optional<double> v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::optional<double> CategoryCounts::compile_rate() const {
  return ratio(compiled, total);
}
std::optional<double> CategoryCounts::pass_rate() const {
  return ratio(passed, total);
}
std::optional<double> CategoryCounts::noop_rate() const {
  return ratio(noop, total);
}
std::optional<double> CategoryCounts::pass_rate_of_compiled() const {
  return ratio(passed, compiled);
}

void CategoryStats::add(CategoryId category, bool compiled, bool passed,
                        bool noop) {
  if (passed && !compiled) {
    throw Error(ErrorCode::kInvalidArgument,
                "a patch cannot pass without compiling");
  }
  CategoryCounts& c = categories[category.value()];
  ++c.total;
  c.compiled += compiled;
  c.passed += passed;
  c.noop += noop;
}

std::size_t CategoryStats::total() const {
  std::size_t n = 0;
  for (const CategoryCounts& c : categories) n += c.total;
  return n;
}

CategoryField parse_category_field(std::string_view name) {
  if (name == "manual") return CategoryField::kManual;
  if (name == "auto") return CategoryField::kAuto;
  throw Error(ErrorCode::kInvalidArgument,
              "category field must be 'manual' or 'auto', got '" +
                  std::string(name) + "'");
}

CategoryStats accumulate_stats(std::span<const PatchRecord> records,
                               CategoryField field, Warnings* warnings) {
  CategoryStats stats;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const PatchRecord& r = records[i];
    const std::optional<CategoryId>& category =
        field == CategoryField::kManual ? r.category_manual : r.category_auto;
    std::string problem;
    if (!category) {
      problem = field == CategoryField::kManual ? "no category_manual"
                                                : "no category_auto";
    } else if (!r.compiled || !r.passed || !r.noop) {
      problem = "missing compiled/passed/noop";
    } else if (*r.passed && !*r.compiled) {
      problem = "passed without compiling";
    }
    if (!problem.empty()) {
      ++stats.excluded;
      warn(warnings, "record " + std::to_string(i) + " (" + r.patch_id +
                         ") excluded: " + problem);
      continue;
    }
    stats.add(*category, *r.compiled, *r.passed, *r.noop);
  }
  return stats;
}

TriagePolicy TriagePolicy::neutral() {
  TriagePolicy p;
  p.skip_noop_categories = false;
  p.min_pass_rate = 0.0;
  return p;
}

void TriagePolicy::validate() const {
  if (!(min_pass_rate >= 0.0 && min_pass_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "min_pass_rate must be in [0, 1]");
  }
}

std::string_view verdict_name(Verdict v) {
  return v == Verdict::kSkip ? "Skip" : "Evaluate";
}

std::string_view reason_name(SkipReason r) {
  switch (r) {
    case SkipReason::kNoOpCategory:
      return "NoOpCategory";
    case SkipReason::kLowPassRate:
      return "LowPassRate";
    case SkipReason::kDefault:
      break;
  }
  return "Default";
}

TriageDecision decide(const TriagePolicy& policy, const CategoryStats& stats,
                      CategoryId predicted) {
  if (policy.skip_noop_categories && is_noop_category(predicted)) {
    return {Verdict::kSkip, SkipReason::kNoOpCategory};
  }
  const CategoryCounts& c = stats[predicted];
  if (c.total >= policy.min_samples && c.total > 0) {
    const std::optional<double> rate =
        policy.pass_rate_basis == PassRateBasis::kTotal
            ? c.pass_rate()
            : c.pass_rate_of_compiled();
    if (rate.value_or(0.0) < policy.min_pass_rate) {
      return {Verdict::kSkip, SkipReason::kLowPassRate};
    }
  }
  return {Verdict::kEvaluate, SkipReason::kDefault};
}

ReplayReport replay(std::span<const PatchRecord> records,
                    const TriagePolicy& policy, ReplayMode mode) {
  policy.validate();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const PatchRecord& r = records[i];
    if (!r.category_auto || !r.compiled || !r.passed || !r.noop) {
      throw Error(ErrorCode::kSchema,
                  "record " + std::to_string(i) + " (" + r.patch_id +
                      "): replay needs category_auto, compiled, passed and "
                      "noop");
    }
    if (*r.passed && !*r.compiled) {
      throw Error(ErrorCode::kSchema, "record " + std::to_string(i) + " (" +
                                          r.patch_id +
                                          "): passed without compiling");
    }
  }
  CategoryStats stats;
  if (mode == ReplayMode::kOracle) {
    for (const PatchRecord& r : records) {
      stats.add(*r.category_auto, *r.compiled, *r.passed, *r.noop);
    }
  }
  ReplayReport report;
  report.records = records.size();
  for (const PatchRecord& r : records) {
    const TriageDecision d = decide(policy, stats, *r.category_auto);
    if (d.verdict == Verdict::kSkip) {
      ++report.evaluations_skipped;
      report.passing_patches_lost += *r.passed;
      report.noops_avoided += *r.noop;
      if (d.reason == SkipReason::kNoOpCategory) {
        ++report.skipped_noop_category;
      } else {
        ++report.skipped_low_pass_rate;
      }
    } else {
      ++report.evaluations_run;
    }
    if (mode == ReplayMode::kPrequential) {
      stats.add(*r.category_auto, *r.compiled, *r.passed, *r.noop);
    }
  }
  return report;
}

std::vector<MismatchEntry> mismatch_matrix(std::span<const PatchRecord> records,
                                           Warnings* warnings) {
  std::map<std::pair<int, int>, std::size_t> counts;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const PatchRecord& r = records[i];
    if (!r.category_auto || !r.category_manual) {
      warn(warnings, "record " + std::to_string(i) + " (" + r.patch_id +
                         ") skipped: needs both categories");
      continue;
    }
    if (*r.category_auto != *r.category_manual) {
      ++counts[{r.category_auto->value(), r.category_manual->value()}];
    }
  }
  std::vector<MismatchEntry> out;
  for (const auto& [key, n] : counts) {
    out.push_back({key.first, key.second, n});
  }
  // The map already orders by (auto, manual); a stable sort keeps that as
  // the tie-break.
  std::stable_sort(out.begin(), out.end(),
                   [](const MismatchEntry& a, const MismatchEntry& b) {
                     return a.count > b.count;
                   });
  return out;
}

std::string mismatches_to_csv(std::span<const MismatchEntry> entries) {
  std::string out = "auto,manual,count\n";
  for (const MismatchEntry& e : entries) {
    out += std::to_string(e.auto_category) + "," +
           std::to_string(e.manual_category) + "," + std::to_string(e.count) +
           "\n";
  }
  return out;
}

nlohmann::json stats_to_json(const CategoryStats& stats) {
  nlohmann::json cats = nlohmann::json::array();
  for (int id = 0; id < kNumCategories; ++id) {
    const CategoryCounts& c = stats.categories[id];
    cats.push_back({{"id", id},
                    {"description", describe(id)},
                    {"total", c.total},
                    {"compiled", c.compiled},
                    {"passed", c.passed},
                    {"noop", c.noop},
                    {"compile_rate", nullable(c.compile_rate())},
                    {"pass_rate", nullable(c.pass_rate())},
                    {"noop_rate", nullable(c.noop_rate())}});
  }
  return {{"total", stats.total()},
          {"excluded", stats.excluded},
          {"categories", cats}};
}

nlohmann::json policy_to_json(const TriagePolicy& policy) {
  return {{"skip_noop_categories", policy.skip_noop_categories},
          {"min_pass_rate", policy.min_pass_rate},
          {"min_samples", policy.min_samples},
          {"pass_rate_basis", policy.pass_rate_basis == PassRateBasis::kTotal
                                  ? "total"
                                  : "compiled"}};
}

TriagePolicy policy_from_json(const nlohmann::json& j) {
  TriagePolicy p;
  try {
    p.skip_noop_categories =
        j.value("skip_noop_categories", p.skip_noop_categories);
    p.min_pass_rate = j.value("min_pass_rate", p.min_pass_rate);
    p.min_samples = j.value("min_samples", p.min_samples);
    const std::string basis = j.value("pass_rate_basis", std::string("total"));
    if (basis == "total") {
      p.pass_rate_basis = PassRateBasis::kTotal;
    } else if (basis == "compiled") {
      p.pass_rate_basis = PassRateBasis::kCompiled;
    } else {
      throw Error(ErrorCode::kInvalidArgument,
                  "pass_rate_basis must be 'total' or 'compiled'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("bad policy: ") + e.what());
  }
  p.validate();
  return p;
}

nlohmann::json decision_to_json(const TriageDecision& decision) {
  return {{"verdict", verdict_name(decision.verdict)},
          {"reason", reason_name(decision.reason)}};
}

nlohmann::json replay_to_json(const ReplayReport& report) {
  return {{"records", report.records},
          {"evaluations_skipped", report.evaluations_skipped},
          {"evaluations_run", report.evaluations_run},
          {"passing_patches_lost", report.passing_patches_lost},
          {"noops_avoided", report.noops_avoided},
          {"skipped_noop_category", report.skipped_noop_category},
          {"skipped_low_pass_rate", report.skipped_low_pass_rate}};
}

nlohmann::json mismatches_to_json(std::span<const MismatchEntry> entries) {
  nlohmann::json out = nlohmann::json::array();
  for (const MismatchEntry& e : entries) {
    out.push_back({{"auto", e.auto_category},
                   {"manual", e.manual_category},
                   {"count", e.count}});
  }
  return out;
}

}  // namespace patchtriage
