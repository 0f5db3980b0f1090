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

// Minimal JSON-over-HTTP POST used by the LLM and embedding backends.

#ifndef PATCHTRIAGE_HTTP_CLIENT_H_
#define PATCHTRIAGE_HTTP_CLIENT_H_

#include <string>
#include <string_view>

#include "json.hpp"

namespace patchtriage {

struct Endpoint {
  std::string base;  // "http://host:port"
  std::string path;  // "/api/generate"
};

// Accepts http://host[:port][/path]. Throws Error(kInvalidArgument).
Endpoint parse_endpoint(std::string_view url);

struct HttpOptions {
  double timeout_seconds = 60.0;
  int max_retries = 2;
};

// POSTs `body` and returns the parsed JSON response. Connection failures,
// timeouts and 5xx responses are retried up to `max_retries` times; after
// that, or on any other non-2xx status, throws Error(kBackendUnavailable).
nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body,
                         const HttpOptions& options);

}  // namespace patchtriage

#endif  // PATCHTRIAGE_HTTP_CLIENT_H_
