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

// Template-driven synthetic summaries for enlarging the training corpus.
//
// A template is a sentence with "{slot}" placeholders; each placeholder is
// filled independently from the slot's filler list.

#ifndef PATCHTRIAGE_AUGMENTOR_H_
#define PATCHTRIAGE_AUGMENTOR_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "patchtriage/dataset.h"
#include "patchtriage/error.h"
#include "patchtriage/taxonomy.h"

namespace patchtriage {

struct CategoryTemplates {
  std::vector<std::string> templates;
  std::map<std::string, std::vector<std::string>> slots;
  // Discriminative tokens; used only by the consistency scanner.
  std::vector<std::string> keywords;
};

struct TemplateSet {
  std::map<int, CategoryTemplates> categories;
};

// Checks the structural rules: every taxonomy category present with >= 3
// templates, >= 2 fillers per slot, every placeholder bound to a slot, no
// template shared between categories and no keyword claimed twice. Throws
// Error(kSchema).
void validate_templates(const TemplateSet& templates);

// Parses and validates {"<id>": {"templates", "slots", "keywords"}}.
TemplateSet templates_from_json(const nlohmann::json& j);
nlohmann::json templates_to_json(const TemplateSet& templates);
TemplateSet load_templates(const std::filesystem::path& path);

// The bundled template file under the data directory.
std::filesystem::path default_templates_path();

// Every distinct cleaned sentence a category's templates can produce, in
// template order then lexicographic filler order.
std::vector<std::string> enumerate_realizations(const TemplateSet& templates,
                                                CategoryId category);

// n draws: a uniformly chosen template with uniformly chosen fillers, passed
// through clean_summary. Duplicates are possible. Throws
// Error(kInvalidCategory) if the category has no templates.
std::vector<LabeledSummary> generate_summaries(const TemplateSet& templates,
                                               CategoryId category,
                                               std::size_t n,
                                               std::uint64_t seed);

// dedup(seeds) topped up with fresh unique synthetic summaries until every
// category has `per_category_target` entries or runs out of realizations.
// Seeds above the target are kept.
std::vector<LabeledSummary> augment_dataset(
    std::span<const LabeledSummary> seeds, const TemplateSet& templates,
    std::size_t per_category_target, std::uint64_t seed,
    Warnings* warnings = nullptr);

struct KeywordViolation {
  std::string text;
  int category = 0;
  // Empty when the summary lacks its own keywords; otherwise the category
  // whose keyword it contains.
  std::vector<int> foreign_categories;
};

// Reports summaries that carry none of their category's keywords or any
// keyword of another category.
std::vector<KeywordViolation> scan_keyword_consistency(
    const TemplateSet& templates, std::span<const LabeledSummary> summaries);

}  // namespace patchtriage

#endif  // PATCHTRIAGE_AUGMENTOR_H_
