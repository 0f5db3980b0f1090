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

// Fixed-width unit vectors for cleaned summaries. Either a remote sentence
// embedding service or a built-in signed feature-hashing fallback.

#ifndef PATCHTRIAGE_EMBEDDER_H_
#define PATCHTRIAGE_EMBEDDER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace patchtriage {

// Width of MiniLM sentence embeddings; both embedders produce it.
inline constexpr std::size_t kDefaultDimension = 384;

enum class EmbeddingSource { kRemote, kHashed };

struct EmbeddingVector {
  std::vector<double> values;
  EmbeddingSource source = EmbeddingSource::kHashed;
};

std::uint64_t fnv1a64(std::string_view bytes);

// Lower-cased maximal runs of [a-z0-9].
std::vector<std::string> tokenize(std::string_view text);

// Scales `values` to unit L2 norm. Throws Error(kEmptyText) for a zero
// vector.
void normalize_l2(std::vector<double>& values);

// Bag-of-words feature hashing: each token's FNV-1a hash h selects bucket
// h mod dimension with sign -1 when the top bit of h is set. Throws
// Error(kEmptyText) if the text has no tokens or all buckets cancel.
EmbeddingVector embed_hashed(std::string_view text,
                             std::size_t dimension = kDefaultDimension);

struct RemoteEmbedderConfig {
  std::string endpoint;
  std::size_t dimension = kDefaultDimension;
  double timeout_seconds = 60.0;
  int max_retries = 2;
  int parallelism = 4;
  std::size_t batch_size = 64;
};

// POSTs {"texts": [...]} and expects {"vectors": [[...], ...]}; vectors are
// re-normalized locally. Throws Error(kBackendUnavailable) or
// Error(kDimensionMismatch).
std::vector<EmbeddingVector> embed_remote(const RemoteEmbedderConfig& config,
                                          std::span<const std::string> texts);

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<EmbeddingVector> embed(
      std::span<const std::string> texts) const = 0;
  virtual std::size_t dimension() const = 0;
  virtual EmbeddingSource source() const = 0;
};

class HashedEmbedder : public Embedder {
 public:
  explicit HashedEmbedder(std::size_t dimension = kDefaultDimension)
      : dimension_(dimension) {}
  std::vector<EmbeddingVector> embed(
      std::span<const std::string> texts) const override;
  std::size_t dimension() const override { return dimension_; }
  EmbeddingSource source() const override { return EmbeddingSource::kHashed; }

 private:
  std::size_t dimension_;
};

class RemoteEmbedder : public Embedder {
 public:
  explicit RemoteEmbedder(RemoteEmbedderConfig config)
      : config_(std::move(config)) {}
  std::vector<EmbeddingVector> embed(
      std::span<const std::string> texts) const override {
    return embed_remote(config_, texts);
  }
  std::size_t dimension() const override { return config_.dimension; }
  EmbeddingSource source() const override { return EmbeddingSource::kRemote; }

 private:
  RemoteEmbedderConfig config_;
};

double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace patchtriage

#endif  // PATCHTRIAGE_EMBEDDER_H_
