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

#include <map>
#include <random>
#include <set>

#include "gtest/gtest.h"
#include "test_util.h"

namespace patchtriage {
namespace {

using ::patchtriage::testing::TempDir;
using ::patchtriage::testing::write_file;

PatchRecord full_record() {
  PatchRecord r;
  r.patch_id = "jcodec-17";
  r.project = "jcodec";
  r.llm = "mistral";
  r.diff_raw = "1c1\n< a\n---\n> b\n";
  r.summary_raw = "Here is a 15-word summary: \"Changed a to b\"";
  r.summary_clean = "Changed a to b";
  r.category_manual = CategoryId(12);
  r.category_auto = CategoryId(12);
  r.compiled = true;
  r.passed = false;
  r.noop = false;
  return r;
}

std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> kPieces = {
      "a", "Z", " ", ",", "\"", "\"\"", "'", "`", "\n", "\r\n", "\t", "é",
      "“quoted”", "日本", "null", "true", "", "\\", "{}", "0"};
  std::string s;
  const std::size_t n = rng() % 8;
  for (std::size_t i = 0; i < n; ++i) s += kPieces[rng() % kPieces.size()];
  return s;
}

PatchRecord random_record(std::mt19937_64& rng, std::size_t i) {
  PatchRecord r;
  r.patch_id = "p" + std::to_string(i) + random_text(rng);
  r.project = random_text(rng);
  r.llm = random_text(rng);
  r.diff_raw = random_text(rng);
  if (rng() % 2) r.summary_raw = random_text(rng);
  if (r.summary_raw && rng() % 2) r.summary_clean = random_text(rng);
  if (rng() % 2) r.category_manual = CategoryId(static_cast<int>(rng() % 18));
  if (rng() % 2) r.category_auto = CategoryId(static_cast<int>(rng() % 18));
  if (rng() % 3) r.compiled = rng() % 2 == 0;
  if (r.compiled.value_or(false) && rng() % 2) {
    r.passed = rng() % 2 == 0;
  } else if (rng() % 2) {
    r.passed = false;
  }
  if (rng() % 2) r.noop = rng() % 2 == 0;
  return r;
}

TEST(RecordsTest, EmptyFileLoadsNothing) {
  TempDir dir;
  write_file(dir / "empty.jsonl", "");
  write_file(dir / "empty.csv", "");
  EXPECT_TRUE(load_records(dir / "empty.jsonl", RecordFormat::kJsonl).empty());
  EXPECT_TRUE(load_records(dir / "empty.csv", RecordFormat::kCsv).empty());
}

TEST(RecordsTest, SingleJsonlLineWithAllFields) {
  TempDir dir;
  write_file(dir / "one.jsonl",
             R"({"patch_id":"p1","project":"junit4","llm":"mistral",)"
             R"("diff_raw":"1c1\n< a\n---\n> b\n","summary_raw":"x",)"
             R"("summary_clean":"x","category_manual":9,"category_auto":12,)"
             R"("compiled":true,"passed":true,"noop":false})"
             "\n");
  const auto records = load_records(dir / "one.jsonl", RecordFormat::kJsonl);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].patch_id, "p1");
  EXPECT_EQ(records[0].category_manual, CategoryId(9));
  EXPECT_EQ(records[0].category_auto, CategoryId(12));
  EXPECT_EQ(records[0].passed, true);
}

TEST(RecordsTest, JsonlFieldNamesAreExact) {
  const nlohmann::json j = record_to_json(full_record());
  std::vector<std::string> keys;
  for (auto& [k, v] : j.items()) keys.push_back(k);
  const std::set<std::string> expected = {
      "patch_id",      "project",         "llm",           "diff_raw",
      "summary_raw",   "summary_clean",   "category_manual", "category_auto",
      "compiled",      "passed",          "noop"};
  EXPECT_EQ(std::set<std::string>(keys.begin(), keys.end()), expected);
  PatchRecord bare;
  bare.patch_id = "x";
  EXPECT_TRUE(record_to_json(bare)["summary_raw"].is_null());
}

TEST(RecordsTest, PassedWithoutCompiledIsSchemaError) {
  EXPECT_ERROR_CODE(
      parse_records(R"({"patch_id":"p","compiled":false,"passed":true})",
                    RecordFormat::kJsonl),
      ErrorCode::kSchema);
}

TEST(RecordsTest, OtherSchemaViolations) {
  EXPECT_ERROR_CODE(parse_records(R"({"project":"x"})", RecordFormat::kJsonl),
                    ErrorCode::kSchema);
  EXPECT_ERROR_CODE(
      parse_records(R"({"patch_id":"p","category_auto":18})",
                    RecordFormat::kJsonl),
      ErrorCode::kSchema);
  EXPECT_ERROR_CODE(
      parse_records(R"({"patch_id":"p","summary_clean":"x"})",
                    RecordFormat::kJsonl),
      ErrorCode::kSchema);
  EXPECT_ERROR_CODE(
      parse_records("{\"patch_id\":\"p\"}\n{\"patch_id\":\"p\"}\n",
                    RecordFormat::kJsonl),
      ErrorCode::kSchema);
  EXPECT_ERROR_CODE(parse_records("{not json", RecordFormat::kJsonl),
                    ErrorCode::kSchema);
  EXPECT_ERROR_CODE(parse_records("a,b\n1,2\n", RecordFormat::kCsv),
                    ErrorCode::kSchema);
}

TEST(RecordsTest, SchemaErrorNamesRecordIndex) {
  try {
    parse_records("{\"patch_id\":\"a\"}\n{\"patch_id\":\"b\",\"noop\":3}\n",
                  RecordFormat::kJsonl);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("record 1"), std::string::npos);
  }
}

TEST(RecordsTest, MissingFileIsIoError) {
  EXPECT_ERROR_CODE(load_records("/nonexistent/x.jsonl", RecordFormat::kJsonl),
                    ErrorCode::kIo);
}

TEST(RecordsTest, CsvEscaping) {
  PatchRecord r = full_record();
  r.summary_raw = "commas, \"quotes\" and\nnewlines";
  r.summary_clean = "";
  const std::vector<PatchRecord> in = {r};
  const std::string csv = serialize_records(in, RecordFormat::kCsv);
  EXPECT_EQ(parse_records(csv, RecordFormat::kCsv), in);
}

TEST(RecordsTest, CsvAcceptsCrlfAndBom) {
  const std::string csv =
      "\xEF\xBB\xBFpatch_id,project,llm,diff_raw,summary_raw,summary_clean,"
      "category_manual,category_auto,compiled,passed,noop\r\n"
      "p1,junit4,mistral,\"1d0\r\n< x\",,,1,,true,false,true\r\n";
  const auto records = parse_records(csv, RecordFormat::kCsv);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].diff_raw, "1d0\r\n< x");
  EXPECT_FALSE(records[0].summary_raw.has_value());
  EXPECT_EQ(records[0].category_manual, CategoryId(1));
  EXPECT_FALSE(records[0].category_auto.has_value());
  EXPECT_EQ(records[0].noop, true);
}

TEST(RecordsTest, UnicodeSurvivesBothFormats) {
  PatchRecord r = full_record();
  r.summary_raw = "Añadido “try” → catch 日本語";
  r.summary_clean = "Añadido try → catch 日本語";
  const std::vector<PatchRecord> in = {r};
  for (RecordFormat f : {RecordFormat::kJsonl, RecordFormat::kCsv}) {
    EXPECT_EQ(parse_records(serialize_records(in, f), f), in);
  }
}

TEST(RecordsTest, RandomRoundTripBothFormats) {
  std::mt19937_64 rng(2024);
  std::vector<PatchRecord> records;
  for (std::size_t i = 0; i < 100; ++i) records.push_back(random_record(rng, i));
  TempDir dir;
  for (RecordFormat f : {RecordFormat::kJsonl, RecordFormat::kCsv}) {
    const auto path = dir / (f == RecordFormat::kCsv ? "r.csv" : "r.jsonl");
    save_records(records, path, f);
    EXPECT_EQ(load_records(path, f), records);
  }
}

TEST(RecordsTest, ParseFormatName) {
  EXPECT_EQ(parse_record_format("jsonl"), RecordFormat::kJsonl);
  EXPECT_EQ(parse_record_format("csv"), RecordFormat::kCsv);
  EXPECT_ERROR_CODE(parse_record_format("xml"), ErrorCode::kInvalidArgument);
}

TEST(SummariesTest, JsonlRoundTrip) {
  const std::vector<LabeledSummary> items = {
      {"just added try and catch", CategoryId(9), false},
      {"renamed a local variable", CategoryId(12), true}};
  EXPECT_EQ(parse_summaries(serialize_summaries(items)), items);
  EXPECT_ERROR_CODE(parse_summaries(R"({"text":"","category":1})"),
                    ErrorCode::kSchema);
}

TEST(DedupTest, Examples) {
  EXPECT_TRUE(dedup_summaries({}).empty());
  const std::vector<LabeledSummary> in = {{"a", CategoryId(1)},
                                          {"a", CategoryId(1)},
                                          {"b", CategoryId(2)}};
  const std::vector<LabeledSummary> expected = {{"a", CategoryId(1)},
                                                {"b", CategoryId(2)}};
  EXPECT_EQ(dedup_summaries(in), expected);
}

TEST(DedupTest, ConflictingLabelWarnsAndKeepsFirst) {
  const std::vector<LabeledSummary> in = {{"a", CategoryId(3)},
                                          {"a", CategoryId(4)}};
  Warnings warnings;
  const auto out = dedup_summaries(in, &warnings);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].category, CategoryId(3));
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_TRUE(warnings[0].starts_with("ConflictingLabel"));
}

TEST(DedupTest, CaseSensitiveKey) {
  const std::vector<LabeledSummary> in = {{"Added", CategoryId(0)},
                                          {"added", CategoryId(0)}};
  EXPECT_EQ(dedup_summaries(in).size(), 2u);
}

TEST(DedupTest, IdempotentAndShrinking) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LabeledSummary> items;
    const std::size_t n = rng() % 40;
    for (std::size_t i = 0; i < n; ++i) {
      items.push_back({"s" + std::to_string(rng() % 10),
                       CategoryId(static_cast<int>(rng() % 3))});
    }
    const auto once = dedup_summaries(items);
    EXPECT_LE(once.size(), items.size());
    EXPECT_EQ(dedup_summaries(once), once);
  }
}

std::vector<LabeledSummary> balanced_items(int categories, int per_category) {
  std::vector<LabeledSummary> items;
  for (int i = 0; i < per_category; ++i) {
    for (int c = 0; c < categories; ++c) {
      items.push_back({"c" + std::to_string(c) + "-" + std::to_string(i),
                       CategoryId(c)});
    }
  }
  return items;
}

TEST(SplitTest, ExactStratification) {
  const auto items = balanced_items(10, 10);
  const TrainTestSplit split = split_train_test(items, 0.8, 42);
  EXPECT_EQ(split.train.size(), 80u);
  EXPECT_EQ(split.test.size(), 20u);
  std::map<int, int> train_counts, test_counts;
  for (const auto& s : split.train) ++train_counts[s.category.value()];
  for (const auto& s : split.test) ++test_counts[s.category.value()];
  for (int c = 0; c < 10; ++c) {
    EXPECT_EQ(train_counts[c], 8);
    EXPECT_EQ(test_counts[c], 2);
  }
}

TEST(SplitTest, DeterministicForSeed) {
  const auto items = balanced_items(5, 7);
  const TrainTestSplit a = split_train_test(items, 0.7, 9);
  const TrainTestSplit b = split_train_test(items, 0.7, 9);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  const TrainTestSplit c = split_train_test(items, 0.7, 10);
  EXPECT_NE(a.test, c.test);
}

TEST(SplitTest, InvalidRatio) {
  const auto items = balanced_items(2, 2);
  EXPECT_ERROR_CODE(split_train_test(items, 1.2, 1), ErrorCode::kInvalidRatio);
  EXPECT_ERROR_CODE(split_train_test(items, 0.0, 1), ErrorCode::kInvalidRatio);
  EXPECT_ERROR_CODE(split_train_test(items, 1.0, 1), ErrorCode::kInvalidRatio);
}

TEST(SplitTest, SingletonCategoryGoesToTrainWithWarning) {
  std::vector<LabeledSummary> items = balanced_items(2, 5);
  items.push_back({"lonely", CategoryId(17)});
  Warnings warnings;
  const TrainTestSplit split = split_train_test(items, 0.8, 42, &warnings);
  EXPECT_EQ(warnings.size(), 1u);
  bool found = false;
  for (const auto& s : split.train) found |= s.text == "lonely";
  EXPECT_TRUE(found);
}

// Partition plus the +-1 stratification bound on random inputs.
TEST(SplitTest, PartitionAndStratificationProperty) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<LabeledSummary> items;
    const std::size_t n = rng() % 120;
    for (std::size_t i = 0; i < n; ++i) {
      items.push_back({"t" + std::to_string(i),
                       CategoryId(static_cast<int>(rng() % 18))});
    }
    const double ratio = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000;
    const TrainTestSplit split = split_train_test(items, ratio, rng());
    EXPECT_EQ(split.train.size() + split.test.size(), items.size());

    std::multiset<std::string> all, parts;
    for (const auto& s : items) all.insert(s.text);
    for (const auto& s : split.train) parts.insert(s.text);
    for (const auto& s : split.test) parts.insert(s.text);
    EXPECT_EQ(all, parts);

    std::map<int, double> total, train;
    for (const auto& s : items) total[s.category.value()] += 1;
    for (const auto& s : split.train) train[s.category.value()] += 1;
    for (const auto& [c, count] : total) {
      if (count < 2) {
        EXPECT_EQ(train[c], count);
      } else {
        EXPECT_LE(std::abs(train[c] - ratio * count), 1.0) << "category " << c;
      }
    }
  }
}

}  // namespace
}  // namespace patchtriage
