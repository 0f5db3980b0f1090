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

// The fixed 18-category edit taxonomy for LLM-generated patches.

#ifndef PATCHTRIAGE_TAXONOMY_H_
#define PATCHTRIAGE_TAXONOMY_H_

#include <array>
#include <compare>
#include <string_view>

#include "json.hpp"

namespace patchtriage {

inline constexpr int kNumCategories = 18;

// A validated taxonomy category id in [0, 17].
class CategoryId {
 public:
  // Throws Error(kInvalidCategory) when `id` is out of range.
  explicit CategoryId(int id);

  static bool is_valid(int id) { return id >= 0 && id < kNumCategories; }

  int value() const { return value_; }

  friend auto operator<=>(CategoryId, CategoryId) = default;

 private:
  int value_;
};

struct TaxonomyEntry {
  int id;
  std::string_view description;
  bool noop;
};

// Entries ordered by id.
const std::array<TaxonomyEntry, kNumCategories>& taxonomy();

std::string_view describe(CategoryId id);
std::string_view describe(int id);

// Categories whose patches have no observable behavioral effect:
// no change (1), comment edits (2) and dead code (17).
bool is_noop_category(CategoryId id);
bool is_noop_category(int id);

// [{"id": int, "description": string, "noop": bool}, ...]
nlohmann::json taxonomy_json();

}  // namespace patchtriage

#endif  // PATCHTRIAGE_TAXONOMY_H_
