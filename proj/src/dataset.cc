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

#include "patchtriage/dataset.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "patchtriage/io.h"
#include "patchtriage/random.h"

namespace patchtriage {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 11> kFields = {
    "patch_id",        "project",       "llm",      "diff_raw",
    "summary_raw",     "summary_clean", "category_manual",
    "category_auto",   "compiled",      "passed",   "noop"};

[[noreturn]] void schema_error(std::size_t index, const std::string& what) {
  throw Error(ErrorCode::kSchema,
              "record " + std::to_string(index) + ": " + what);
}

std::string required_string(const json& j, std::string_view key,
                            std::size_t index) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return "";
  if (!it->is_string()) schema_error(index, std::string(key) + " must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& j, std::string_view key,
                                           std::size_t index) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) schema_error(index, std::string(key) + " must be a string");
  return it->get<std::string>();
}

std::optional<CategoryId> optional_category(const json& j, std::string_view key,
                                            std::size_t index) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer() || !CategoryId::is_valid(it->get<int>())) {
    schema_error(index, std::string(key) + " must be an integer in [0, 17]");
  }
  return CategoryId(it->get<int>());
}

std::optional<bool> optional_bool(const json& j, std::string_view key,
                                  std::size_t index) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_boolean()) schema_error(index, std::string(key) + " must be a boolean");
  return it->get<bool>();
}

template <typename T, typename F>
json optional_to_json(const std::optional<T>& v, F convert) {
  return v ? json(convert(*v)) : json(nullptr);
}

// --- CSV -------------------------------------------------------------------

struct CsvCell {
  std::string text;
  bool quoted = false;
};

using CsvRow = std::vector<CsvCell>;

std::string quote_csv(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// RFC-4180 reader; quoted cells may span lines. Accepts LF or CRLF record
// terminators.
std::vector<std::pair<std::size_t, CsvRow>> read_csv(std::string_view text) {
  std::vector<std::pair<std::size_t, CsvRow>> rows;
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::size_t i = 0;
  std::size_t line = 1;
  while (i < text.size()) {
    const std::size_t row_line = line;
    CsvRow row;
    while (true) {
      CsvCell cell;
      if (i < text.size() && text[i] == '"') {
        cell.quoted = true;
        ++i;
        while (true) {
          if (i >= text.size()) {
            throw Error(ErrorCode::kSchema,
                        "csv line " + std::to_string(row_line) +
                            ": unterminated quoted field");
          }
          const char c = text[i++];
          if (c == '"') {
            if (i < text.size() && text[i] == '"') {
              cell.text += '"';
              ++i;
            } else {
              break;
            }
          } else {
            if (c == '\n') ++line;
            cell.text += c;
          }
        }
      } else {
        while (i < text.size() && text[i] != ',' && text[i] != '\n' &&
               !(text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n')) {
          if (text[i] == '"') {
            throw Error(ErrorCode::kSchema,
                        "csv line " + std::to_string(line) +
                            ": stray quote in unquoted field");
          }
          cell.text += text[i++];
        }
      }
      row.push_back(std::move(cell));
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      if (i < text.size() && text[i] == '\r') ++i;
      if (i < text.size() && text[i] == '\n') {
        ++i;
        ++line;
      } else if (i < text.size()) {
        throw Error(ErrorCode::kSchema,
                    "csv line " + std::to_string(line) +
                        ": unexpected character after quoted field");
      }
      break;
    }
    const bool blank = row.size() == 1 && !row[0].quoted && row[0].text.empty();
    if (!blank) rows.emplace_back(row_line, std::move(row));
  }
  return rows;
}

PatchRecord record_from_csv(const CsvRow& row, std::size_t index) {
  if (row.size() != kFields.size()) {
    schema_error(index, "expected " + std::to_string(kFields.size()) +
                            " columns, got " + std::to_string(row.size()));
  }
  auto is_absent = [&](std::size_t col) {
    return !row[col].quoted && row[col].text.empty();
  };
  auto opt_string = [&](std::size_t col) -> std::optional<std::string> {
    if (is_absent(col)) return std::nullopt;
    return row[col].text;
  };
  auto opt_category = [&](std::size_t col) -> std::optional<CategoryId> {
    if (is_absent(col)) return std::nullopt;
    const std::string& t = row[col].text;
    int v = -1;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() ||
        !CategoryId::is_valid(v)) {
      schema_error(index, std::string(kFields[col]) +
                              " must be an integer in [0, 17]");
    }
    return CategoryId(v);
  };
  auto opt_bool = [&](std::size_t col) -> std::optional<bool> {
    if (is_absent(col)) return std::nullopt;
    if (row[col].text == "true") return true;
    if (row[col].text == "false") return false;
    schema_error(index, std::string(kFields[col]) + " must be true or false");
  };

  PatchRecord r;
  r.patch_id = row[0].text;
  r.project = row[1].text;
  r.llm = row[2].text;
  r.diff_raw = row[3].text;
  r.summary_raw = opt_string(4);
  r.summary_clean = opt_string(5);
  r.category_manual = opt_category(6);
  r.category_auto = opt_category(7);
  r.compiled = opt_bool(8);
  r.passed = opt_bool(9);
  r.noop = opt_bool(10);
  validate_record(r, index);
  return r;
}

std::string record_to_csv(const PatchRecord& r) {
  auto opt_str = [](const std::optional<std::string>& s) {
    return s ? quote_csv(*s) : std::string();
  };
  auto opt_cat = [](const std::optional<CategoryId>& c) {
    return c ? std::to_string(c->value()) : std::string();
  };
  auto opt_bool = [](const std::optional<bool>& b) {
    return b ? std::string(*b ? "true" : "false") : std::string();
  };
  std::string out;
  out += quote_csv(r.patch_id) + ",";
  out += quote_csv(r.project) + ",";
  out += quote_csv(r.llm) + ",";
  out += quote_csv(r.diff_raw) + ",";
  out += opt_str(r.summary_raw) + ",";
  out += opt_str(r.summary_clean) + ",";
  out += opt_cat(r.category_manual) + ",";
  out += opt_cat(r.category_auto) + ",";
  out += opt_bool(r.compiled) + ",";
  out += opt_bool(r.passed) + ",";
  out += opt_bool(r.noop);
  return out;
}

void check_unique_ids(std::span<const PatchRecord> records) {
  std::unordered_map<std::string_view, std::size_t> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = seen.emplace(records[i].patch_id, i);
    if (!inserted) {
      schema_error(i, "duplicate patch_id '" + records[i].patch_id +
                          "' (first seen at record " +
                          std::to_string(it->second) + ")");
    }
  }
}

}  // namespace

RecordFormat parse_record_format(std::string_view name) {
  if (name == "jsonl") return RecordFormat::kJsonl;
  if (name == "csv") return RecordFormat::kCsv;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown record format '" + std::string(name) + "'");
}

void validate_record(const PatchRecord& r, std::size_t index) {
  if (r.patch_id.empty()) schema_error(index, "patch_id must be non-empty");
  if (r.passed.value_or(false) && !r.compiled.value_or(false)) {
    schema_error(index, "passed=true requires compiled=true");
  }
  if (r.summary_clean && !r.summary_raw) {
    schema_error(index, "summary_clean present without summary_raw");
  }
}

json record_to_json(const PatchRecord& r) {
  auto id = [](CategoryId c) { return c.value(); };
  auto same = [](const auto& v) { return v; };
  json j = json::object();
  j["patch_id"] = r.patch_id;
  j["project"] = r.project;
  j["llm"] = r.llm;
  j["diff_raw"] = r.diff_raw;
  j["summary_raw"] = optional_to_json(r.summary_raw, same);
  j["summary_clean"] = optional_to_json(r.summary_clean, same);
  j["category_manual"] = optional_to_json(r.category_manual, id);
  j["category_auto"] = optional_to_json(r.category_auto, id);
  j["compiled"] = optional_to_json(r.compiled, same);
  j["passed"] = optional_to_json(r.passed, same);
  j["noop"] = optional_to_json(r.noop, same);
  return j;
}

PatchRecord record_from_json(const json& j, std::size_t index) {
  if (!j.is_object()) schema_error(index, "expected a JSON object");
  PatchRecord r;
  auto id = j.find("patch_id");
  if (id == j.end() || !id->is_string()) {
    schema_error(index, "patch_id must be a string");
  }
  r.patch_id = id->get<std::string>();
  r.project = required_string(j, "project", index);
  r.llm = required_string(j, "llm", index);
  r.diff_raw = required_string(j, "diff_raw", index);
  r.summary_raw = optional_string(j, "summary_raw", index);
  r.summary_clean = optional_string(j, "summary_clean", index);
  r.category_manual = optional_category(j, "category_manual", index);
  r.category_auto = optional_category(j, "category_auto", index);
  r.compiled = optional_bool(j, "compiled", index);
  r.passed = optional_bool(j, "passed", index);
  r.noop = optional_bool(j, "noop", index);
  validate_record(r, index);
  return r;
}

std::vector<PatchRecord> parse_records(std::string_view text,
                                       RecordFormat format) {
  std::vector<PatchRecord> records;
  if (format == RecordFormat::kJsonl) {
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      const std::string_view line = text.substr(pos, nl - pos);
      pos = nl + 1;
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        schema_error(records.size(), "line " + std::to_string(line_no) +
                                         ": invalid JSON: " + e.what());
      }
      records.push_back(record_from_json(j, records.size()));
    }
  } else {
    auto rows = read_csv(text);
    if (rows.empty()) return records;
    const CsvRow& header = rows.front().second;
    bool header_ok = header.size() == kFields.size();
    for (std::size_t c = 0; header_ok && c < header.size(); ++c) {
      header_ok = header[c].text == kFields[c];
    }
    if (!header_ok) {
      throw Error(ErrorCode::kSchema, "csv header does not match the record fields");
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
      records.push_back(record_from_csv(rows[r].second, r - 1));
    }
  }
  check_unique_ids(records);
  return records;
}

std::string serialize_records(std::span<const PatchRecord> records,
                              RecordFormat format) {
  std::string out;
  if (format == RecordFormat::kJsonl) {
    for (const PatchRecord& r : records) {
      out += record_to_json(r).dump();
      out += '\n';
    }
    return out;
  }
  for (std::size_t c = 0; c < kFields.size(); ++c) {
    if (c > 0) out += ',';
    out += kFields[c];
  }
  out += '\n';
  for (const PatchRecord& r : records) {
    out += record_to_csv(r);
    out += '\n';
  }
  return out;
}

std::vector<PatchRecord> load_records(const std::filesystem::path& path,
                                      RecordFormat format) {
  return parse_records(read_text_file(path), format);
}

void save_records(std::span<const PatchRecord> records,
                  const std::filesystem::path& path, RecordFormat format) {
  std::string text;
  try {
    text = serialize_records(records, format);
  } catch (const json::type_error& e) {
    // Non-UTF-8 text cannot be written as JSON.
    throw Error(ErrorCode::kIo, path.string() + ": " + e.what());
  }
  write_file_atomically(path, text);
}

std::vector<LabeledSummary> parse_summaries(std::string_view jsonl) {
  std::vector<LabeledSummary> items;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t nl = jsonl.find('\n', pos);
    if (nl == std::string_view::npos) nl = jsonl.size();
    const std::string_view line = jsonl.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::size_t index = items.size();
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      schema_error(index, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("text") || !j["text"].is_string() ||
        j["text"].get<std::string>().empty()) {
      schema_error(index, "text must be a non-empty string");
    }
    auto category = optional_category(j, "category", index);
    if (!category) schema_error(index, "category is required");
    const bool synthetic = optional_bool(j, "synthetic", index).value_or(false);
    items.push_back({j["text"].get<std::string>(), *category, synthetic});
  }
  return items;
}

std::string serialize_summaries(std::span<const LabeledSummary> items) {
  std::string out;
  for (const LabeledSummary& s : items) {
    out += json{{"text", s.text},
                {"category", s.category.value()},
                {"synthetic", s.synthetic}}
               .dump();
    out += '\n';
  }
  return out;
}

std::vector<LabeledSummary> dedup_summaries(
    std::span<const LabeledSummary> items, Warnings* warnings) {
  std::vector<LabeledSummary> out;
  std::unordered_map<std::string_view, CategoryId> first_label;
  for (const LabeledSummary& item : items) {
    auto [it, inserted] = first_label.emplace(item.text, item.category);
    if (inserted) {
      out.push_back(item);
    } else if (it->second != item.category) {
      warn(warnings, "ConflictingLabel: '" + item.text + "' labeled " +
                         std::to_string(it->second.value()) + " and " +
                         std::to_string(item.category.value()) +
                         "; keeping " + std::to_string(it->second.value()));
    }
  }
  return out;
}

TrainTestSplit split_train_test(std::span<const LabeledSummary> items,
                                double ratio, std::uint64_t seed,
                                Warnings* warnings) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorCode::kInvalidRatio,
                "split ratio must lie in (0, 1), got " + std::to_string(ratio));
  }
  std::map<int, std::vector<std::size_t>> by_category;
  for (std::size_t i = 0; i < items.size(); ++i) {
    by_category[items[i].category.value()].push_back(i);
  }

  Rng rng(seed);
  std::vector<bool> in_train(items.size(), false);
  for (auto& [category, indices] : by_category) {
    const std::size_t n = indices.size();
    if (n < 2) {
      warn(warnings, "category " + std::to_string(category) + " has " +
                         std::to_string(n) + " item(s); all assigned to train");
      for (std::size_t i : indices) in_train[i] = true;
      continue;
    }
    const auto wanted = static_cast<std::size_t>(std::llround(ratio * n));
    const std::size_t n_train = std::clamp<std::size_t>(wanted, 1, n - 1);
    shuffle(indices, rng);
    for (std::size_t k = 0; k < n_train; ++k) in_train[indices[k]] = true;
  }

  TrainTestSplit split;
  for (std::size_t i = 0; i < items.size(); ++i) {
    (in_train[i] ? split.train : split.test).push_back(items[i]);
  }
  return split;
}

}  // namespace patchtriage
