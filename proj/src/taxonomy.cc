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

#include "patchtriage/taxonomy.h"

#include <string>

#include "patchtriage/error.h"

namespace patchtriage {

namespace {

constexpr std::array<TaxonomyEntry, kNumCategories> kTaxonomy = {{
    {0, "Added (some arbitrary) code from GitHub", false},
    {1, "No change", true},
    {2, "Modified a comment (add/remove/edit)", true},
    {3, "Deleted blocks in a method (all/most/some)", false},
    {4, "Duplicate code", false},
    {5, "Modifications to return statements (add/remove/edit)", false},
    {6, "Changes to method names", false},
    {7, "Changed data types or type usage and generics", false},
    {8, "Includes inlining of implementations (sort, methods...)", false},
    {9, "Added exception-handling constructs (unreachable or reachable)",
     false},
    {10, "Added extra brackets", false},
    {11, "Added synchronization logic", false},
    {12, "Modified Variable/Class/Object Name", false},
    {13, "Modified Control Flow Structure", false},
    {14, "Modified Object/Primitive Creation or Initialization", false},
    {15, "Split a statement into multiple lines", false},
    {16, "Arithmetic manipulation (boolean var. or expr. manipulations)",
     false},
    {17, "Added dead code", true},
}};

}  // namespace

CategoryId::CategoryId(int id) : value_(id) {
  if (!is_valid(id)) {
    throw Error(ErrorCode::kInvalidCategory,
                "category id " + std::to_string(id) + " outside [0, 17]");
  }
}

const std::array<TaxonomyEntry, kNumCategories>& taxonomy() {
  return kTaxonomy;
}

std::string_view describe(CategoryId id) {
  return kTaxonomy[id.value()].description;
}

std::string_view describe(int id) { return describe(CategoryId(id)); }

bool is_noop_category(CategoryId id) { return kTaxonomy[id.value()].noop; }

bool is_noop_category(int id) { return is_noop_category(CategoryId(id)); }

nlohmann::json taxonomy_json() {
  nlohmann::json out = nlohmann::json::array();
  for (const TaxonomyEntry& e : kTaxonomy) {
    out.push_back({{"id", e.id},
                   {"description", std::string(e.description)},
                   {"noop", e.noop}});
  }
  return out;
}

}  // namespace patchtriage
