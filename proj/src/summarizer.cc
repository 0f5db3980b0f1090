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

#include <cctype>
#include <cstdlib>

#include "patchtriage/http_client.h"
#include "patchtriage/parallel.h"

namespace patchtriage {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

// Non-ASCII bytes count as word characters so that accented words are
// never split into a replaceable ASCII head.
bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || u >= 0x80;
}

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

char ascii_upper(char c) {
  return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = ascii_lower(c);
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (ascii_lower(s[i]) != ascii_lower(prefix[i])) return false;
  }
  return true;
}

std::string strip_leading_phrases(std::string_view s,
                                  const std::vector<std::string>& prefixes) {
  bool stripped = true;
  while (stripped) {
    stripped = false;
    for (const std::string& p : prefixes) {
      if (!p.empty() && starts_with_ci(s, p)) {
        s = trim(s.substr(p.size()));
        stripped = true;
      }
    }
  }
  return std::string(s);
}

std::string delete_chars(std::string_view s,
                         const std::vector<std::string>& chars) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    bool matched = false;
    for (const std::string& c : chars) {
      if (!c.empty() && s.substr(i, c.size()) == c) {
        i += c.size();
        matched = true;
        break;
      }
    }
    if (!matched) out += s[i++];
  }
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_run = false;
  for (char c : s) {
    if (is_space(c)) {
      if (!in_run) out += ' ';
      in_run = true;
    } else {
      out += c;
      in_run = false;
    }
  }
  return out;
}

std::string map_words(
    std::string_view s,
    const std::vector<std::pair<std::string, std::string>>& verb_map) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_word_char(s[i])) {
      out += s[i++];
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && is_word_char(s[j])) ++j;
    const std::string_view word = s.substr(i, j - i);
    const std::string key = lower(word);
    const std::string* replacement = nullptr;
    for (const auto& [from, to] : verb_map) {
      if (lower(from) == key) {
        replacement = &to;
        break;
      }
    }
    if (replacement == nullptr || replacement->empty()) {
      out += word;
    } else {
      std::string r = *replacement;
      if (std::isupper(static_cast<unsigned char>(word.front()))) {
        r.front() = ascii_upper(r.front());
      }
      out += r;
    }
    i = j;
  }
  return out;
}

std::string clean_once(std::string_view s, const CleanupRules& rules) {
  std::string t = strip_leading_phrases(trim(s), rules.strip_prefixes);
  t = delete_chars(t, rules.strip_chars);
  t = collapse_whitespace(t);
  return map_words(t, rules.verb_map);
}

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return (v != nullptr && *v != '\0') ? std::string(v) : fallback;
}

}  // namespace

std::string build_prompt(std::string_view diff_raw) {
  if (diff_raw.empty()) {
    throw Error(ErrorCode::kEmptyDiff, "cannot summarize an empty diff");
  }
  std::string prompt(kPromptInstruction);
  prompt += ' ';
  prompt += diff_raw;
  return prompt;
}

void SummarizerConfig::validate() const {
  if (!(timeout_seconds > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "timeout must be positive");
  }
  if (max_retries < 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_retries must be >= 0");
  }
  if (!(temperature >= 0)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0");
  }
  if (parallelism < 1) {
    throw Error(ErrorCode::kInvalidArgument, "parallelism must be >= 1");
  }
  parse_endpoint(endpoint);
}

SummarizerConfig apply_env_overrides(SummarizerConfig config) {
  config.endpoint = env_or("PATCHTRIAGE_ENDPOINT", config.endpoint);
  config.model_name = env_or("PATCHTRIAGE_MODEL_NAME", config.model_name);
  return config;
}

HttpCompletionBackend::HttpCompletionBackend(SummarizerConfig config)
    : config_(std::move(config)) {
  config_.validate();
}

std::string HttpCompletionBackend::complete(const std::string& prompt) {
  const nlohmann::json body = {{"model", config_.model_name},
                               {"prompt", prompt},
                               {"temperature", config_.temperature},
                               {"stream", false}};
  const nlohmann::json response =
      post_json(parse_endpoint(config_.endpoint), body,
                HttpOptions{config_.timeout_seconds, config_.max_retries});
  return extract_completion_text(response);
}

std::string extract_completion_text(const nlohmann::json& response) {
  if (response.is_object()) {
    for (const char* key : {"response", "content", "text", "completion"}) {
      auto it = response.find(key);
      if (it != response.end() && it->is_string()) return it->get<std::string>();
    }
    auto choices = response.find("choices");
    if (choices != response.end() && choices->is_array() && !choices->empty()) {
      const nlohmann::json& first = (*choices)[0];
      if (first.contains("text") && first["text"].is_string()) {
        return first["text"].get<std::string>();
      }
      if (first.contains("message") && first["message"].is_object() &&
          first["message"].contains("content") &&
          first["message"]["content"].is_string()) {
        return first["message"]["content"].get<std::string>();
      }
    }
  }
  throw Error(ErrorCode::kBackendUnavailable,
              "completion response has no recognizable text field");
}

std::string summarize(CompletionBackend& backend, std::string_view diff_raw) {
  std::string completion = backend.complete(build_prompt(diff_raw));
  if (trim(completion).empty()) {
    throw Error(ErrorCode::kEmptyCompletion, "backend returned no text");
  }
  return completion;
}

std::string summarize(const SummarizerConfig& config,
                      std::string_view diff_raw) {
  HttpCompletionBackend backend(config);
  return summarize(backend, diff_raw);
}

std::vector<SummaryOutcome> summarize_batch(
    CompletionBackend& backend, std::span<const std::string> diffs,
    int parallelism) {
  std::vector<SummaryOutcome> outcomes(diffs.size());
  parallel_for(diffs.size(), parallelism, [&](std::size_t i) {
    try {
      outcomes[i].summary = summarize(backend, diffs[i]);
    } catch (const Error& e) {
      outcomes[i].error = e.code();
      outcomes[i].error_message = e.what();
    } catch (const std::exception& e) {
      outcomes[i].error = ErrorCode::kBackendUnavailable;
      outcomes[i].error_message = e.what();
    }
  });
  return outcomes;
}

CleanupRules CleanupRules::defaults() {
  CleanupRules rules;
  rules.strip_prefixes = {"here is a 15-word summary:",
                          "here is a 15 word summary:", "java diff:"};
  rules.strip_chars = {"\"", "'", "`", "“", "”", "‘", "’"};
  rules.verb_map = {{"update", "modify"},
                    {"updates", "modifies"},
                    {"updated", "modified"},
                    {"updating", "modifying"}};
  return rules;
}

void CleanupRules::validate() const {
  for (const auto& [from, to] : verb_map) {
    if (from.empty() || to.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "verb_map entries must be non-empty");
    }
    for (char c : from) {
      if (!is_word_char(c)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "verb_map key '" + from + "' is not a single word");
      }
    }
    for (char c : to) {
      if (!is_word_char(c)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "verb_map value '" + to + "' is not a single word");
      }
    }
    for (const auto& [other_from, unused] : verb_map) {
      if (lower(other_from) == lower(to)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "verb_map value '" + to + "' is also a key");
      }
    }
  }
}

std::string clean_summary(std::string_view raw, const CleanupRules& rules) {
  rules.validate();
  std::string current(raw);
  // Deleting characters can expose a new leading phrase or edge whitespace,
  // so the steps repeat until a pass changes nothing. validate() guarantees
  // a mapped word is never mapped again, so this settles in a few passes.
  for (int pass = 0; pass < 64; ++pass) {
    std::string next = clean_once(current, rules);
    if (next == current) break;
    current = std::move(next);
  }
  if (current.empty()) {
    throw Error(ErrorCode::kEmptySummary, "summary is empty after cleanup");
  }
  return current;
}

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

}  // namespace patchtriage
