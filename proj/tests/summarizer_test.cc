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

#include "patchtriage/summarizer.h"

#include <atomic>
#include <mutex>
#include <random>
#include <set>

#include "diff_fixtures.h"
#include "gtest/gtest.h"
#include "mock_server.h"
#include "summary_fixtures.h"
#include "test_util.h"

namespace patchtriage {
namespace {

using ::patchtriage::testing::MockServer;
using ::patchtriage::testing::random_summary;
using ::patchtriage::testing::unused_port;

TEST(BuildPromptTest, SubstitutesDiff) {
  EXPECT_EQ(build_prompt("1c1\n< a\n---\n> b"),
            "Summarize the following Java diff in exactly 15 words: "
            "1c1\n< a\n---\n> b");
}

TEST(BuildPromptTest, EmptyDiff) {
  EXPECT_ERROR_CODE(build_prompt(""), ErrorCode::kEmptyDiff);
}

TEST(BuildPromptTest, ListingOnePrompt) {
  const std::string prompt = build_prompt(testing::kTryCatchDiff);
  EXPECT_TRUE(prompt.starts_with(
      "Summarize the following Java diff in exactly 15 words: "));
  EXPECT_NE(prompt.find(testing::kTryCatchDiff), std::string::npos);
  EXPECT_TRUE(prompt.ends_with(testing::kTryCatchDiff));
}

TEST(CleanSummaryTest, Fixtures) {
  for (const auto& [raw, expected] : testing::kCleanupFixtures) {
    EXPECT_EQ(clean_summary(raw), expected) << raw;
  }
}

TEST(CleanSummaryTest, VerbMapPreservesFirstLetterCase) {
  EXPECT_EQ(clean_summary("Updates logic and updated names"),
            "Modifies logic and modified names");
  EXPECT_EQ(clean_summary("UPDATE"), "Modify");
  EXPECT_EQ(clean_summary("updater and update_count untouched"),
            "updater and update_count untouched");
}

TEST(CleanSummaryTest, ExposedPrefixIsStrippedToo) {
  EXPECT_EQ(clean_summary("\"Java diff: added a null check\""),
            "added a null check");
  EXPECT_EQ(clean_summary("` a"), "a");
}

TEST(CleanSummaryTest, EmptyAfterCleanup) {
  EXPECT_ERROR_CODE(clean_summary(""), ErrorCode::kEmptySummary);
  EXPECT_ERROR_CODE(clean_summary("  \"``\" "), ErrorCode::kEmptySummary);
  EXPECT_ERROR_CODE(clean_summary("Here is a 15-word summary:"),
                    ErrorCode::kEmptySummary);
}

TEST(CleanSummaryTest, RulesValidation) {
  CleanupRules rules = CleanupRules::defaults();
  rules.verb_map.push_back({"modify", "update"});
  EXPECT_ERROR_CODE(clean_summary("x", rules), ErrorCode::kInvalidArgument);
  rules = CleanupRules::defaults();
  rules.verb_map.push_back({"fix", "fixed up"});
  EXPECT_ERROR_CODE(clean_summary("x", rules), ErrorCode::kInvalidArgument);
}

TEST(CleanSummaryTest, IdempotentOnRandomStrings) {
  std::mt19937_64 rng(1234);
  int cleaned = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::string raw = random_summary(rng);
    std::string once;
    try {
      once = clean_summary(raw);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kEmptySummary);
      continue;
    }
    ++cleaned;
    EXPECT_EQ(clean_summary(once), once) << "raw: [" << raw << "]";
  }
  EXPECT_GT(cleaned, 500);
}

TEST(CleanSummaryTest, IntroducesOnlyVerbMapCharacters) {
  std::set<char> verb_chars;
  for (const auto& [from, to] : CleanupRules::defaults().verb_map) {
    for (char c : to) {
      verb_chars.insert(c);
      verb_chars.insert(static_cast<char>(std::toupper(c)));
    }
  }
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const std::string raw = random_summary(rng);
    std::string out;
    try {
      out = clean_summary(raw);
    } catch (const Error&) {
      continue;
    }
    const std::set<char> in_chars(raw.begin(), raw.end());
    for (char c : out) {
      EXPECT_TRUE(in_chars.count(c) || verb_chars.count(c) || c == ' ')
          << "introduced '" << c << "' from [" << raw << "]";
    }
  }
}

TEST(WordCountTest, Counts) {
  EXPECT_EQ(word_count(""), 0u);
  EXPECT_EQ(word_count("  just added\ttry and catch "), 5u);
}

class FakeBackend : public CompletionBackend {
 public:
  explicit FakeBackend(std::string reply) : reply_(std::move(reply)) {}
  std::string complete(const std::string& prompt) override {
    std::lock_guard<std::mutex> lock(mu_);
    prompts_.push_back(prompt);
    return reply_;
  }
  std::vector<std::string> prompts_;

 private:
  std::mutex mu_;
  std::string reply_;
};

TEST(SummarizeTest, PassThrough) {
  FakeBackend backend("Added try catch");
  EXPECT_EQ(summarize(backend, "1c1\n< a\n---\n> b\n"), "Added try catch");
  ASSERT_EQ(backend.prompts_.size(), 1u);
  EXPECT_EQ(backend.prompts_[0], build_prompt("1c1\n< a\n---\n> b\n"));
}

TEST(SummarizeTest, EmptyCompletion) {
  FakeBackend backend("  \n");
  EXPECT_ERROR_CODE(summarize(backend, "1d0\n< x\n"),
                    ErrorCode::kEmptyCompletion);
}

TEST(SummarizeTest, HttpBackendPostsExpectedBody) {
  nlohmann::json seen;
  std::mutex mu;
  MockServer server("/api/generate",
                    [&](const httplib::Request& req, httplib::Response& res) {
                      std::lock_guard<std::mutex> lock(mu);
                      seen = nlohmann::json::parse(req.body);
                      res.set_content(
                          R"({"response":"Here is a 15-word summary: \"x\""})",
                          "application/json");
                    });
  SummarizerConfig config;
  config.endpoint = server.url("/api/generate");
  config.max_retries = 0;
  config.timeout_seconds = 5;
  EXPECT_EQ(summarize(config, "1a2\n> X\n"),
            "Here is a 15-word summary: \"x\"");
  EXPECT_EQ(seen["model"], "llama3");
  EXPECT_EQ(seen["prompt"], build_prompt("1a2\n> X\n"));
  EXPECT_EQ(seen["temperature"], 0.0);
}

TEST(SummarizeTest, BackendDown) {
  SummarizerConfig config;
  config.endpoint =
      "http://127.0.0.1:" + std::to_string(unused_port()) + "/api/generate";
  config.max_retries = 1;
  config.timeout_seconds = 1;
  EXPECT_ERROR_CODE(summarize(config, "1a2\n> X\n"),
                    ErrorCode::kBackendUnavailable);
}

TEST(SummarizeTest, RetriesServerErrors) {
  std::atomic<int> calls{0};
  MockServer server("/gen", [&](const httplib::Request&, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 503;
      return;
    }
    res.set_content(R"({"choices":[{"text":"ok now"}]})", "application/json");
  });
  SummarizerConfig config;
  config.endpoint = server.url("/gen");
  config.max_retries = 2;
  config.timeout_seconds = 5;
  EXPECT_EQ(summarize(config, "1d0\n< a\n"), "ok now");
  EXPECT_EQ(calls.load(), 2);
}

TEST(ExtractCompletionTest, ResponseShapes) {
  using nlohmann::json;
  EXPECT_EQ(extract_completion_text(json{{"response", "a"}}), "a");
  EXPECT_EQ(extract_completion_text(json{{"content", "b"}}), "b");
  EXPECT_EQ(extract_completion_text(
                json::parse(R"({"choices":[{"message":{"content":"c"}}]})")),
            "c");
  EXPECT_ERROR_CODE(extract_completion_text(json{{"foo", 1}}),
                    ErrorCode::kBackendUnavailable);
}

TEST(SummarizeBatchTest, KeepsInputOrderAndReportsPerItemErrors) {
  class EchoBackend : public CompletionBackend {
   public:
    std::string complete(const std::string& prompt) override {
      return "summary of " + prompt.substr(kPromptInstruction.size() + 1);
    }
  } backend;
  std::vector<std::string> diffs;
  for (int i = 0; i < 20; ++i) diffs.push_back("d" + std::to_string(i));
  diffs[7] = "";
  const auto outcomes = summarize_batch(backend, diffs, 4);
  ASSERT_EQ(outcomes.size(), diffs.size());
  for (int i = 0; i < 20; ++i) {
    if (i == 7) {
      EXPECT_EQ(outcomes[i].error, ErrorCode::kEmptyDiff);
    } else {
      EXPECT_EQ(outcomes[i].summary, "summary of d" + std::to_string(i));
    }
  }
}

TEST(SummarizerConfigTest, Validation) {
  SummarizerConfig c;
  c.timeout_seconds = 0;
  EXPECT_ERROR_CODE(c.validate(), ErrorCode::kInvalidArgument);
  c = SummarizerConfig{};
  c.max_retries = -1;
  EXPECT_ERROR_CODE(c.validate(), ErrorCode::kInvalidArgument);
  c = SummarizerConfig{};
  c.endpoint = "ftp://x";
  EXPECT_ERROR_CODE(c.validate(), ErrorCode::kInvalidArgument);
}

TEST(SummarizerConfigTest, EnvOverrides) {
  ::setenv("PATCHTRIAGE_MODEL_NAME", "llama3:8b", 1);
  EXPECT_EQ(apply_env_overrides(SummarizerConfig{}).model_name, "llama3:8b");
  ::unsetenv("PATCHTRIAGE_MODEL_NAME");
  EXPECT_EQ(apply_env_overrides(SummarizerConfig{}).model_name, "llama3");
}

}  // namespace
}  // namespace patchtriage
