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

#include "patchtriage/augmentor.h"

#include <set>
#include <unordered_set>

#include "patchtriage/embedder.h"
#include "patchtriage/io.h"
#include "patchtriage/random.h"
#include "patchtriage/summarizer.h"

namespace patchtriage {
namespace {

// A template split into literal text and placeholder names:
// literals.size() == names.size() + 1.
struct ParsedTemplate {
  std::vector<std::string> literals;
  std::vector<std::string> names;
};

ParsedTemplate parse_template(const std::string& tpl) {
  ParsedTemplate p;
  std::string literal;
  for (std::size_t i = 0; i < tpl.size(); ++i) {
    if (tpl[i] == '}') {
      throw Error(ErrorCode::kSchema, "unmatched '}' in template: " + tpl);
    }
    if (tpl[i] != '{') {
      literal += tpl[i];
      continue;
    }
    const std::size_t close = tpl.find('}', i);
    if (close == std::string::npos) {
      throw Error(ErrorCode::kSchema, "unclosed '{' in template: " + tpl);
    }
    std::string name = tpl.substr(i + 1, close - i - 1);
    if (name.empty() || name.find('{') != std::string::npos) {
      throw Error(ErrorCode::kSchema, "bad placeholder in template: " + tpl);
    }
    p.literals.push_back(std::move(literal));
    literal.clear();
    p.names.push_back(std::move(name));
    i = close;
  }
  p.literals.push_back(std::move(literal));
  return p;
}

std::string fill(const ParsedTemplate& p, const CategoryTemplates& ct,
                 const std::vector<std::size_t>& choice) {
  std::string s = p.literals[0];
  for (std::size_t k = 0; k < p.names.size(); ++k) {
    s += ct.slots.at(p.names[k])[choice[k]];
    s += p.literals[k + 1];
  }
  try {
    return clean_summary(s);
  } catch (const Error&) {
    throw Error(ErrorCode::kSchema, "template realizes to an empty summary");
  }
}

const CategoryTemplates& category_templates(const TemplateSet& templates,
                                            CategoryId category) {
  const auto it = templates.categories.find(category.value());
  if (it == templates.categories.end() || it->second.templates.empty()) {
    throw Error(ErrorCode::kInvalidCategory,
                "no templates for category " +
                    std::to_string(category.value()));
  }
  return it->second;
}

std::string draw(const CategoryTemplates& ct, Rng& rng) {
  const ParsedTemplate p =
      parse_template(ct.templates[uniform_index(rng, ct.templates.size())]);
  std::vector<std::size_t> choice;
  for (const std::string& name : p.names) {
    choice.push_back(uniform_index(rng, ct.slots.at(name).size()));
  }
  return fill(p, ct, choice);
}

constexpr std::uint64_t kGenerateSalt = 0x100;
constexpr std::uint64_t kAugmentSalt = 0x200;

}  // namespace

void validate_templates(const TemplateSet& templates) {
  std::set<std::string> seen_templates;
  std::map<std::string, int> keyword_owner;
  for (int c = 0; c < kNumCategories; ++c) {
    const auto it = templates.categories.find(c);
    if (it == templates.categories.end()) {
      throw Error(ErrorCode::kSchema,
                  "missing templates for category " + std::to_string(c));
    }
    const CategoryTemplates& ct = it->second;
    const std::string where = "category " + std::to_string(c);
    if (ct.templates.size() < 3) {
      throw Error(ErrorCode::kSchema, where + " needs at least 3 templates");
    }
    for (const auto& [name, fillers] : ct.slots) {
      if (fillers.size() < 2) {
        throw Error(ErrorCode::kSchema,
                    where + " slot '" + name + "' needs at least 2 fillers");
      }
      for (const std::string& f : fillers) {
        if (f.find_first_of("{}") != std::string::npos) {
          throw Error(ErrorCode::kSchema,
                      where + " filler contains a brace: " + f);
        }
      }
    }
    for (const std::string& tpl : ct.templates) {
      for (const std::string& name : parse_template(tpl).names) {
        if (!ct.slots.contains(name)) {
          throw Error(ErrorCode::kSchema,
                      where + " template uses unknown slot '" + name + "'");
        }
      }
      if (!seen_templates.insert(tpl).second) {
        throw Error(ErrorCode::kSchema,
                    where + " repeats a template: " + tpl);
      }
    }
    for (const std::string& kw : ct.keywords) {
      const auto [owner, inserted] = keyword_owner.emplace(kw, c);
      if (!inserted) {
        throw Error(ErrorCode::kSchema,
                    "keyword '" + kw + "' claimed by categories " +
                        std::to_string(owner->second) + " and " +
                        std::to_string(c));
      }
    }
  }
  for (const auto& [id, ct] : templates.categories) {
    if (!CategoryId::is_valid(id)) {
      throw Error(ErrorCode::kSchema,
                  "templates for unknown category " + std::to_string(id));
    }
  }
}

TemplateSet templates_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kSchema, "template file must be a JSON object");
  }
  TemplateSet set;
  try {
    for (const auto& [key, value] : j.items()) {
      std::size_t used = 0;
      int id = -1;
      try {
        id = std::stoi(key, &used);
      } catch (const std::exception&) {
      }
      if (used != key.size() || !CategoryId::is_valid(id)) {
        throw Error(ErrorCode::kSchema, "bad category key '" + key + "'");
      }
      CategoryTemplates ct;
      ct.templates = value.at("templates").get<std::vector<std::string>>();
      if (value.contains("slots")) {
        ct.slots = value["slots"]
                       .get<std::map<std::string, std::vector<std::string>>>();
      }
      if (value.contains("keywords")) {
        ct.keywords = value["keywords"].get<std::vector<std::string>>();
      }
      set.categories[id] = std::move(ct);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("bad template file: ") +
                                        e.what());
  }
  validate_templates(set);
  return set;
}

nlohmann::json templates_to_json(const TemplateSet& templates) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [id, ct] : templates.categories) {
    j[std::to_string(id)] = {{"templates", ct.templates},
                             {"slots", ct.slots},
                             {"keywords", ct.keywords}};
  }
  return j;
}

TemplateSet load_templates(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, path.string() + ": " + e.what());
  }
  return templates_from_json(j);
}

std::filesystem::path default_templates_path() {
  return data_dir() / "templates.json";
}

std::vector<std::string> enumerate_realizations(const TemplateSet& templates,
                                                CategoryId category) {
  const CategoryTemplates& ct = category_templates(templates, category);
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const std::string& tpl : ct.templates) {
    const ParsedTemplate p = parse_template(tpl);
    std::vector<std::size_t> choice(p.names.size(), 0);
    while (true) {
      std::string s = fill(p, ct, choice);
      if (seen.insert(s).second) out.push_back(std::move(s));
      // Odometer over the placeholders, last one fastest.
      bool wrapped = true;
      for (std::size_t k = choice.size(); k-- > 0;) {
        if (++choice[k] < ct.slots.at(p.names[k]).size()) {
          wrapped = false;
          break;
        }
        choice[k] = 0;
      }
      if (wrapped) break;
    }
  }
  return out;
}

std::vector<LabeledSummary> generate_summaries(const TemplateSet& templates,
                                               CategoryId category,
                                               std::size_t n,
                                               std::uint64_t seed) {
  const CategoryTemplates& ct = category_templates(templates, category);
  Rng rng = make_rng(seed, kGenerateSalt + category.value());
  std::vector<LabeledSummary> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({draw(ct, rng), category, true});
  }
  return out;
}

std::vector<LabeledSummary> augment_dataset(
    std::span<const LabeledSummary> seeds, const TemplateSet& templates,
    std::size_t per_category_target, std::uint64_t seed, Warnings* warnings) {
  std::vector<LabeledSummary> out = dedup_summaries(seeds, warnings);
  std::unordered_set<std::string> seen;
  std::vector<std::size_t> counts(kNumCategories, 0);
  for (const LabeledSummary& s : out) {
    seen.insert(s.text);
    ++counts[s.category.value()];
  }
  for (int c = 0; c < kNumCategories; ++c) {
    if (counts[c] >= per_category_target) continue;
    const CategoryId category(c);
    const CategoryTemplates& ct = category_templates(templates, category);
    const std::size_t need = per_category_target - counts[c];
    std::size_t added = 0;
    auto take = [&](std::string text) {
      if (!seen.insert(text).second) return;
      out.push_back({std::move(text), category, true});
      ++added;
    };
    // Random draws first; the attempt cap only matters when the category is
    // close to exhausting its realizations.
    Rng rng = make_rng(seed, kAugmentSalt + c);
    const std::size_t max_attempts = 64 * need + 256;
    for (std::size_t a = 0; added < need && a < max_attempts; ++a) {
      take(draw(ct, rng));
    }
    if (added < need) {
      for (std::string& s : enumerate_realizations(templates, category)) {
        if (added == need) break;
        take(std::move(s));
      }
    }
    if (added < need) {
      warn(warnings, "category " + std::to_string(c) + " reached " +
                         std::to_string(counts[c] + added) + " of target " +
                         std::to_string(per_category_target) +
                         ": templates exhausted");
    }
  }
  return out;
}

std::vector<KeywordViolation> scan_keyword_consistency(
    const TemplateSet& templates, std::span<const LabeledSummary> summaries) {
  std::map<std::string, int> owner;
  for (const auto& [id, ct] : templates.categories) {
    for (const std::string& kw : ct.keywords) {
      for (const std::string& t : tokenize(kw)) owner.emplace(t, id);
    }
  }
  std::vector<KeywordViolation> out;
  for (const LabeledSummary& s : summaries) {
    bool own = false;
    std::set<int> foreign;
    for (const std::string& t : tokenize(s.text)) {
      const auto it = owner.find(t);
      if (it == owner.end()) continue;
      if (it->second == s.category.value()) {
        own = true;
      } else {
        foreign.insert(it->second);
      }
    }
    if (!own || !foreign.empty()) {
      out.push_back({s.text, s.category.value(),
                     std::vector<int>(foreign.begin(), foreign.end())});
    }
  }
  return out;
}

}  // namespace patchtriage
