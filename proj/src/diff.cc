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

#include "patchtriage/diff.h"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>

#include "patchtriage/error.h"

namespace patchtriage {

namespace {

using Index = std::int64_t;

// Recursive middle-snake search over interned line ids. `a_off`/`b_off` are
// the positions of the slices within the full sequences.
class MyersSolver {
 public:
  MyersSolver(std::span<const int> a, std::span<const int> b,
              EditScript* script)
      : a_(a), b_(b), script_(script) {}

  void run() { solve(0, a_.size(), 0, b_.size()); }

 private:
  static Index wrap(Index k, Index z) { return ((k % z) + z) % z; }

  void solve(Index a_lo, Index a_hi, Index b_lo, Index b_hi) {
    // Strip the common prefix and suffix; they never carry edits.
    while (a_lo < a_hi && b_lo < b_hi && a_[a_lo] == b_[b_lo]) {
      ++a_lo;
      ++b_lo;
    }
    while (a_lo < a_hi && b_lo < b_hi && a_[a_hi - 1] == b_[b_hi - 1]) {
      --a_hi;
      --b_hi;
    }
    const Index n = a_hi - a_lo;
    const Index m = b_hi - b_lo;
    if (n == 0) {
      for (Index j = b_lo; j < b_hi; ++j) script_->inserted[j] = true;
      return;
    }
    if (m == 0) {
      for (Index i = a_lo; i < a_hi; ++i) script_->deleted[i] = true;
      return;
    }

    const Index total = n + m;
    const Index z = 2 * std::min(n, m) + 2;
    const Index w = n - m;
    std::vector<Index> fwd(z, 0);
    std::vector<Index> bwd(z, 0);
    auto a_at = [&](Index i) { return a_[a_lo + i]; };
    auto b_at = [&](Index j) { return b_[b_lo + j]; };

    const Index h_max = total / 2 + (total % 2 != 0);
    for (Index h = 0; h <= h_max; ++h) {
      for (int pass = 0; pass < 2; ++pass) {
        // pass 0 walks forward from the top-left, pass 1 backward from the
        // bottom-right; `odd` mirrors which parity of total may meet here.
        std::vector<Index>& cur = pass == 0 ? fwd : bwd;
        const std::vector<Index>& other = pass == 0 ? bwd : fwd;
        const Index odd = pass == 0 ? 1 : 0;
        const Index dir = pass == 0 ? 1 : -1;

        const Index k_lo = -(h - 2 * std::max<Index>(0, h - m));
        const Index k_hi = h - 2 * std::max<Index>(0, h - n);
        for (Index k = k_lo; k <= k_hi; k += 2) {
          Index x = (k == -h || (k != h && cur[wrap(k - 1, z)] <
                                                cur[wrap(k + 1, z)]))
                        ? cur[wrap(k + 1, z)]
                        : cur[wrap(k - 1, z)] + 1;
          Index y = x - k;
          const Index sx = x;
          const Index sy = y;
          while (x < n && y < m &&
                 a_at((1 - odd) * n + dir * x + (odd - 1)) ==
                     b_at((1 - odd) * m + dir * y + (odd - 1))) {
            ++x;
            ++y;
          }
          cur[wrap(k, z)] = x;
          const Index zk = -(k - w);
          if (total % 2 == odd && zk >= -(h - odd) && zk <= h - odd &&
              cur[wrap(k, z)] + other[wrap(zk, z)] >= n) {
            Index d, x0, y0, x1, y1;
            if (odd == 1) {
              d = 2 * h - 1;
              x0 = sx;
              y0 = sy;
              x1 = x;
              y1 = y;
            } else {
              d = 2 * h;
              x0 = n - x;
              y0 = m - y;
              x1 = n - sx;
              y1 = m - sy;
            }
            if (d > 1 || (x0 != x1 && y0 != y1)) {
              solve(a_lo, a_lo + x0, b_lo, b_lo + y0);
              solve(a_lo + x1, a_hi, b_lo + y1, b_hi);
            } else if (m > n) {
              solve(a_hi, a_hi, b_lo + n, b_hi);
            } else if (m < n) {
              solve(a_lo + m, a_hi, b_hi, b_hi);
            }
            return;
          }
        }
      }
    }
  }

  std::span<const int> a_;
  std::span<const int> b_;
  EditScript* script_;
};

std::string render_range(const LineRange& r) {
  if (r.empty()) return std::to_string(r.end);
  if (r.start == r.end) return std::to_string(r.start);
  return std::to_string(r.start) + "," + std::to_string(r.end);
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kDiffParse,
              "line " + std::to_string(line_no) + ": " + what);
}

std::optional<std::size_t> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

struct RawRange {
  std::size_t first;
  std::optional<std::size_t> last;
};

std::optional<RawRange> parse_range(std::string_view s) {
  const std::size_t comma = s.find(',');
  if (comma == std::string_view::npos) {
    auto v = parse_number(s);
    if (!v) return std::nullopt;
    return RawRange{*v, std::nullopt};
  }
  auto first = parse_number(s.substr(0, comma));
  auto last = parse_number(s.substr(comma + 1));
  if (!first || !last || *last < *first) return std::nullopt;
  return RawRange{*first, *last};
}

LineRange to_nonempty(const RawRange& r) {
  if (r.first == 0) return LineRange{1, 0};  // rejected by caller
  return LineRange{r.first, r.last.value_or(r.first)};
}

LineRange anchored_empty(std::size_t after) {
  return LineRange{after + 1, after};
}

}  // namespace

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(pos));
      break;
    }
    lines.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

std::size_t EditScript::distance() const {
  return static_cast<std::size_t>(
      std::count(deleted.begin(), deleted.end(), true) +
      std::count(inserted.begin(), inserted.end(), true));
}

EditScript shortest_edit_script(std::span<const std::string> a,
                                std::span<const std::string> b) {
  // Intern lines so the inner loop compares ints.
  std::unordered_map<std::string_view, int> ids;
  auto intern = [&](std::span<const std::string> lines) {
    std::vector<int> out;
    out.reserve(lines.size());
    for (const std::string& line : lines) {
      auto [it, inserted] =
          ids.emplace(line, static_cast<int>(ids.size()));
      out.push_back(it->second);
    }
    return out;
  };
  const std::vector<int> a_ids = intern(a);
  const std::vector<int> b_ids = intern(b);

  EditScript script;
  script.deleted.assign(a.size(), false);
  script.inserted.assign(b.size(), false);
  MyersSolver(a_ids, b_ids, &script).run();
  return script;
}

PatchDiff compute_diff(std::string_view original, std::string_view patched) {
  const std::vector<std::string> a = split_lines(original);
  const std::vector<std::string> b = split_lines(patched);
  const EditScript script = shortest_edit_script(a, b);

  PatchDiff diff;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    const bool del = i < a.size() && script.deleted[i];
    const bool ins = j < b.size() && script.inserted[j];
    if (!del && !ins) {
      ++i;
      ++j;
      continue;
    }
    const std::size_t i0 = i;
    const std::size_t j0 = j;
    while ((i < a.size() && script.deleted[i]) ||
           (j < b.size() && script.inserted[j])) {
      if (i < a.size() && script.deleted[i]) {
        ++i;
      } else {
        ++j;
      }
    }
    Hunk hunk;
    hunk.original = LineRange{i0 + 1, i};
    hunk.patched = LineRange{j0 + 1, j};
    hunk.removed.assign(a.begin() + i0, a.begin() + i);
    hunk.added.assign(b.begin() + j0, b.begin() + j);
    if (hunk.removed.empty()) {
      hunk.kind = HunkKind::kAdd;
    } else if (hunk.added.empty()) {
      hunk.kind = HunkKind::kDelete;
    } else {
      hunk.kind = HunkKind::kChange;
    }
    diff.hunks.push_back(std::move(hunk));
  }
  diff.raw = render_diff(diff.hunks);
  return diff;
}

PatchDiff compute_diff(const SourcePair& pair) {
  return compute_diff(pair.original, pair.patched);
}

std::string render_hunk_header(const Hunk& hunk) {
  char letter = 'c';
  if (hunk.kind == HunkKind::kAdd) letter = 'a';
  if (hunk.kind == HunkKind::kDelete) letter = 'd';
  return render_range(hunk.original) + letter + render_range(hunk.patched);
}

std::string render_diff(std::span<const Hunk> hunks) {
  std::string out;
  for (const Hunk& hunk : hunks) {
    out += render_hunk_header(hunk);
    out += '\n';
    for (const std::string& line : hunk.removed) {
      out += "< ";
      out += line;
      out += '\n';
    }
    if (hunk.kind == HunkKind::kChange) out += "---\n";
    for (const std::string& line : hunk.added) {
      out += "> ";
      out += line;
      out += '\n';
    }
  }
  return out;
}

PatchDiff parse_diff(std::string_view raw) {
  PatchDiff diff;
  std::vector<std::string_view> lines;
  {
    std::size_t pos = 0;
    while (pos < raw.size()) {
      std::size_t nl = raw.find('\n', pos);
      if (nl == std::string_view::npos) nl = raw.size();
      lines.push_back(raw.substr(pos, nl - pos));
      pos = nl + 1;
    }
  }

  std::size_t idx = 0;
  // Markers emitted by GNU diff for files without a final newline; they
  // carry no line content.
  auto skip_eof_markers = [&] {
    while (idx < lines.size() && lines[idx].starts_with("\\ ")) ++idx;
  };
  auto take_lines = [&](char marker, std::size_t count,
                        std::vector<std::string>* out) {
    for (std::size_t n = 0; n < count; ++n) {
      skip_eof_markers();
      if (idx >= lines.size()) {
        parse_error(idx + 1, "unexpected end of diff");
      }
      const std::string_view line = lines[idx];
      if (line.size() < 2 || line[0] != marker || line[1] != ' ') {
        parse_error(idx + 1, std::string("expected '") + marker + " ' line");
      }
      out->emplace_back(line.substr(2));
      ++idx;
    }
    skip_eof_markers();
  };

  std::size_t prev_orig_end = 0;
  std::size_t prev_patched_end = 0;
  while (idx < lines.size()) {
    const std::size_t header_line = idx + 1;
    const std::string_view header = lines[idx++];
    const std::size_t letter_pos = header.find_first_not_of("0123456789,");
    if (letter_pos == std::string_view::npos || letter_pos == 0) {
      parse_error(header_line, "malformed hunk header");
    }
    const char letter = header[letter_pos];
    if (letter != 'a' && letter != 'c' && letter != 'd') {
      parse_error(header_line, "invalid hunk letter");
    }
    auto left = parse_range(header.substr(0, letter_pos));
    auto right = parse_range(header.substr(letter_pos + 1));
    if (!left || !right) parse_error(header_line, "malformed hunk range");

    Hunk hunk;
    if (letter == 'a') {
      if (left->last || right->first == 0) {
        parse_error(header_line, "malformed add range");
      }
      hunk.kind = HunkKind::kAdd;
      hunk.original = anchored_empty(left->first);
      hunk.patched = to_nonempty(*right);
    } else if (letter == 'd') {
      if (right->last || left->first == 0) {
        parse_error(header_line, "malformed delete range");
      }
      hunk.kind = HunkKind::kDelete;
      hunk.original = to_nonempty(*left);
      hunk.patched = anchored_empty(right->first);
    } else {
      if (left->first == 0 || right->first == 0) {
        parse_error(header_line, "malformed change range");
      }
      hunk.kind = HunkKind::kChange;
      hunk.original = to_nonempty(*left);
      hunk.patched = to_nonempty(*right);
    }
    if (hunk.original.end < prev_orig_end ||
        hunk.patched.end < prev_patched_end ||
        (!diff.hunks.empty() && (hunk.original.start <= prev_orig_end ||
                                 hunk.patched.start <= prev_patched_end))) {
      parse_error(header_line, "hunks out of order or overlapping");
    }
    prev_orig_end = hunk.original.end;
    prev_patched_end = hunk.patched.end;

    take_lines('<', hunk.original.size(), &hunk.removed);
    if (hunk.kind == HunkKind::kChange) {
      if (idx >= lines.size() || lines[idx] != "---") {
        parse_error(idx + 1, "expected '---' separator");
      }
      ++idx;
    }
    take_lines('>', hunk.patched.size(), &hunk.added);
    diff.hunks.push_back(std::move(hunk));
  }
  diff.raw = render_diff(diff.hunks);
  return diff;
}

bool is_textual_noop(const PatchDiff& diff) { return diff.hunks.empty(); }

std::vector<std::string> apply_diff(std::span<const std::string> original,
                                    const PatchDiff& diff) {
  std::vector<std::string> out;
  out.reserve(original.size());
  std::size_t next = 0;  // 0-based index of the next unconsumed line
  for (const Hunk& hunk : diff.hunks) {
    const std::size_t begin = hunk.original.start - 1;
    if (begin < next || hunk.original.end > original.size()) {
      throw Error(ErrorCode::kDiffParse,
                  "hunk " + render_hunk_header(hunk) +
                      " does not fit the original text");
    }
    out.insert(out.end(), original.begin() + next, original.begin() + begin);
    for (std::size_t k = 0; k < hunk.removed.size(); ++k) {
      if (original[begin + k] != hunk.removed[k]) {
        throw Error(ErrorCode::kDiffParse,
                    "hunk " + render_hunk_header(hunk) +
                        " removes a line that differs from the original");
      }
    }
    if (out.size() + 1 != hunk.patched.start) {
      throw Error(ErrorCode::kDiffParse,
                  "hunk " + render_hunk_header(hunk) +
                      " has an inconsistent patched range");
    }
    out.insert(out.end(), hunk.added.begin(), hunk.added.end());
    next = begin + hunk.removed.size();
  }
  out.insert(out.end(), original.begin() + next, original.end());
  return out;
}

}  // namespace patchtriage
