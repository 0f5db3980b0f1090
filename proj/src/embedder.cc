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

#include "patchtriage/embedder.h"

#include <cmath>
#include <map>
#include <optional>

#include "json.hpp"
#include "patchtriage/error.h"
#include "patchtriage/http_client.h"
#include "patchtriage/parallel.h"

namespace patchtriage {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      current += c;
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

void normalize_l2(std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  const double norm = std::sqrt(sum);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::kEmptyText, "cannot normalize a zero vector");
  }
  for (double& v : values) v /= norm;
}

EmbeddingVector embed_hashed(std::string_view text, std::size_t dimension) {
  if (dimension == 0) {
    throw Error(ErrorCode::kInvalidArgument, "embedding dimension must be > 0");
  }
  const std::vector<std::string> tokens = tokenize(text);
  if (tokens.empty()) {
    throw Error(ErrorCode::kEmptyText,
                "no tokens in '" + std::string(text) + "'");
  }
  // Counting first and accumulating in bucket order keeps the result
  // independent of token order down to the last bit.
  std::map<std::string, int> counts;
  for (const std::string& t : tokens) ++counts[t];

  EmbeddingVector out;
  out.source = EmbeddingSource::kHashed;
  out.values.assign(dimension, 0.0);
  for (const auto& [token, count] : counts) {
    const std::uint64_t h = fnv1a64(token);
    const double sign = (h >> 63) == 0 ? 1.0 : -1.0;
    out.values[h % dimension] += sign * count;
  }
  normalize_l2(out.values);
  return out;
}

std::vector<EmbeddingVector> HashedEmbedder::embed(
    std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) out.push_back(embed_hashed(t, dimension_));
  return out;
}

std::vector<EmbeddingVector> embed_remote(const RemoteEmbedderConfig& config,
                                          std::span<const std::string> texts) {
  if (texts.empty()) return {};
  for (const std::string& t : texts) {
    if (t.empty()) throw Error(ErrorCode::kEmptyText, "cannot embed empty text");
  }
  const Endpoint endpoint = parse_endpoint(config.endpoint);
  const HttpOptions http{config.timeout_seconds, config.max_retries};
  const std::size_t batch = std::max<std::size_t>(1, config.batch_size);
  const std::size_t num_batches = (texts.size() + batch - 1) / batch;

  std::vector<EmbeddingVector> out(texts.size());
  std::vector<std::optional<Error>> failures(num_batches);
  parallel_for(num_batches, config.parallelism, [&](std::size_t b) {
    const std::size_t begin = b * batch;
    const std::size_t end = std::min(texts.size(), begin + batch);
    try {
      nlohmann::json body;
      body["texts"] = nlohmann::json::array();
      for (std::size_t i = begin; i < end; ++i) body["texts"].push_back(texts[i]);
      const nlohmann::json response = post_json(endpoint, body, http);
      if (!response.is_object() || !response.contains("vectors") ||
          !response["vectors"].is_array() ||
          response["vectors"].size() != end - begin) {
        throw Error(ErrorCode::kBackendUnavailable,
                    "embedding response must hold one vector per text");
      }
      for (std::size_t i = begin; i < end; ++i) {
        const nlohmann::json& v = response["vectors"][i - begin];
        if (!v.is_array() || v.size() != config.dimension) {
          throw Error(ErrorCode::kDimensionMismatch,
                      "expected " + std::to_string(config.dimension) +
                          "-dim vectors, got " +
                          std::to_string(v.is_array() ? v.size() : 0));
        }
        EmbeddingVector ev;
        ev.source = EmbeddingSource::kRemote;
        ev.values.reserve(v.size());
        for (const nlohmann::json& x : v) {
          if (!x.is_number()) {
            throw Error(ErrorCode::kBackendUnavailable,
                        "embedding vector holds a non-number");
          }
          ev.values.push_back(x.get<double>());
        }
        normalize_l2(ev.values);
        out[i] = std::move(ev);
      }
    } catch (const Error& e) {
      failures[b] = e;
    }
  });
  for (const std::optional<Error>& f : failures) {
    if (f) throw *f;
  }
  return out;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "cosine of unequal dimensions");
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace patchtriage
