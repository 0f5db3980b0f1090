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

#include "patchtriage/http_client.h"

#include <chrono>
#include <cmath>
#include <thread>

#include "httplib.h"
#include "patchtriage/error.h"

namespace patchtriage {

Endpoint parse_endpoint(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  if (!url.starts_with(kScheme)) {
    throw Error(ErrorCode::kInvalidArgument,
                "endpoint must start with http://: '" + std::string(url) + "'");
  }
  const std::size_t slash = url.find('/', kScheme.size());
  Endpoint e;
  if (slash == std::string_view::npos) {
    e.base = std::string(url);
    e.path = "/";
  } else {
    e.base = std::string(url.substr(0, slash));
    e.path = std::string(url.substr(slash));
  }
  if (e.base.size() == kScheme.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "endpoint has no host: '" + std::string(url) + "'");
  }
  return e;
}

nlohmann::json post_json(const Endpoint& endpoint, const nlohmann::json& body,
                         const HttpOptions& options) {
  httplib::Client client(endpoint.base);
  const auto timeout = std::chrono::duration<double>(options.timeout_seconds);
  client.set_connection_timeout(
      std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(
      std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(
      std::chrono::duration_cast<std::chrono::microseconds>(timeout));

  const std::string payload = body.dump();
  std::string last_failure;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(
          std::min(2000, 100 * (1 << std::min(attempt, 5)))));
    }
    auto result = client.Post(endpoint.path, payload, "application/json");
    if (!result) {
      last_failure = httplib::to_string(result.error());
      continue;
    }
    if (result->status >= 500) {
      last_failure = "HTTP " + std::to_string(result->status);
      continue;
    }
    if (result->status < 200 || result->status >= 300) {
      throw Error(ErrorCode::kBackendUnavailable,
                  endpoint.base + endpoint.path + " returned HTTP " +
                      std::to_string(result->status));
    }
    try {
      return nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::parse_error&) {
      throw Error(ErrorCode::kBackendUnavailable,
                  endpoint.base + endpoint.path + " returned invalid JSON");
    }
  }
  throw Error(ErrorCode::kBackendUnavailable,
              endpoint.base + endpoint.path + " unreachable after " +
                  std::to_string(options.max_retries + 1) +
                  " attempt(s): " + last_failure);
}

}  // namespace patchtriage
