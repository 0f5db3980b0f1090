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

#ifndef PATCHTRIAGE_IO_H_
#define PATCHTRIAGE_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace patchtriage {

// Throws Error(kIo) on failure.
std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temp file, then renames over `path`, so readers see
// either the old or the new contents and never a partial write.
void write_file_atomically(const std::filesystem::path& path,
                           std::string_view contents);

// Appends and flushes; used for audit logs.
void append_to_file(const std::filesystem::path& path,
                    std::string_view contents);

// Bundled data files: $PATCHTRIAGE_DATA_DIR if set, else the source tree's
// data/ directory.
std::filesystem::path data_dir();

}  // namespace patchtriage

#endif  // PATCHTRIAGE_IO_H_
