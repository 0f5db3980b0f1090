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

// Line-level diffs between an original and a patched source file, rendered
// in the POSIX "normal" format that `diff a b` prints by default:
//
//   312c312,313
//   < old line
//   ---
//   > new line 1
//   > new line 2
//
// Lines are split on '\n' only; a trailing '\r' stays part of the line.
// A missing newline at end of file is not represented in the diff.

#ifndef PATCHTRIAGE_DIFF_H_
#define PATCHTRIAGE_DIFF_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace patchtriage {

struct SourcePair {
  std::string original;
  std::string patched;
  std::string patch_id;
  std::string project;
  std::string llm;
};

// 1-based inclusive line range. An empty range sits between lines `end`
// and `end + 1`, i.e. start == end + 1.
struct LineRange {
  std::size_t start = 1;
  std::size_t end = 0;

  std::size_t size() const { return end + 1 - start; }
  bool empty() const { return end + 1 == start; }

  friend bool operator==(const LineRange&, const LineRange&) = default;
};

enum class HunkKind { kChange, kAdd, kDelete };

struct Hunk {
  HunkKind kind = HunkKind::kChange;
  LineRange original;
  LineRange patched;
  std::vector<std::string> removed;
  std::vector<std::string> added;

  friend bool operator==(const Hunk&, const Hunk&) = default;
};

struct PatchDiff {
  std::vector<Hunk> hunks;
  std::string raw;

  friend bool operator==(const PatchDiff&, const PatchDiff&) = default;
};

std::vector<std::string> split_lines(std::string_view text);

// Minimal edit script between two line sequences. `deleted[i]` marks line i
// of `a` as removed, `inserted[j]` marks line j of `b` as added; every
// unmarked line is kept. Linear-space Myers.
struct EditScript {
  std::vector<bool> deleted;
  std::vector<bool> inserted;

  std::size_t distance() const;
};

EditScript shortest_edit_script(std::span<const std::string> a,
                                std::span<const std::string> b);

PatchDiff compute_diff(std::string_view original, std::string_view patched);
PatchDiff compute_diff(const SourcePair& pair);

std::string render_hunk_header(const Hunk& hunk);
std::string render_diff(std::span<const Hunk> hunks);

// Throws Error(kDiffParse) with the offending 1-based line number.
PatchDiff parse_diff(std::string_view raw);

// True iff the diff has no hunks. Whitespace-only edits are still edits.
bool is_textual_noop(const PatchDiff& diff);

// Replays `diff` on `original`. Throws Error(kDiffParse) when the hunks do
// not fit the original text.
std::vector<std::string> apply_diff(std::span<const std::string> original,
                                    const PatchDiff& diff);

}  // namespace patchtriage

#endif  // PATCHTRIAGE_DIFF_H_
