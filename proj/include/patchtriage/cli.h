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

#ifndef PATCHTRIAGE_CLI_H_
#define PATCHTRIAGE_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace patchtriage {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand. `args` excludes the program name. Results go to
// `out` as JSON or plain ids; warnings and diagnostics go to `err`, where a
// domain error is a single JSON line {"error": code, "message": text}.
//
// The global flags can also come from the environment: --embed-endpoint reads
// PATCHTRIAGE_EMBED_ENDPOINT, and so on.
int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace patchtriage

#endif  // PATCHTRIAGE_CLI_H_
