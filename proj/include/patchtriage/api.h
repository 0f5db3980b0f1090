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

// The labeling service behind the HTTP API: a file-backed dataset that
// annotators label one patch at a time, plus retraining and prediction on
// the current model.
//
// Readers take immutable snapshots. Label writes serialize through one
// mutex and are persisted (temp file + rename) before they become visible.

#ifndef PATCHTRIAGE_API_H_
#define PATCHTRIAGE_API_H_

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "patchtriage/augmentor.h"
#include "patchtriage/clusterer.h"
#include "patchtriage/dataset.h"
#include "patchtriage/embedder.h"
#include "patchtriage/pipeline.h"
#include "patchtriage/triage.h"

namespace httplib {
class Server;
}

namespace patchtriage {

struct LabelSubmission {
  std::string patch_id;
  int category = 0;  // validated by submit_label
  std::string annotator;
  std::string submitted_at;  // ISO-8601 UTC; filled in when empty
};

struct ServiceConfig {
  // Empty: no dataset; dataset operations fail with NotReady.
  std::filesystem::path dataset_path;
  RecordFormat format = RecordFormat::kJsonl;
  // Loaded at startup when the file exists; retrain() writes here.
  std::filesystem::path model_path;
  // Enables synthetic top-up of the labeled half during retrain().
  std::optional<TemplateSet> templates;
  TrainOptions train;
  // Defaults to a HashedEmbedder.
  std::shared_ptr<const Embedder> embedder;
};

class PatchService {
 public:
  // Throws whatever load_records / load_model throw.
  explicit PatchService(ServiceConfig config);

  // The first record without category_manual, in dataset order.
  std::optional<PatchRecord> next_unlabeled() const;
  // Throws Error(kNotFound).
  PatchRecord get(const std::string& patch_id) const;
  std::vector<PatchRecord> records() const;

  // Persists the dataset and appends an audit line before returning.
  // Throws Error(kNotFound) or Error(kInvalidCategory).
  PatchRecord submit_label(LabelSubmission submission);

  // Trains on the manually labeled summaries and swaps in the new model.
  // Returns {model_version, accuracy, nmi, n, ...}; accuracy and nmi are
  // null when nothing could be held out. Throws Error(kBusy) if another
  // retrain is running, Error(kDegenerateSeeding) with < 2 categories.
  nlohmann::json retrain();

  // Throws Error(kNotReady) without a model.
  Prediction predict(const std::string& summary) const;

  CategoryStats stats(CategoryField field) const;
  std::vector<MismatchEntry> mismatches() const;

  std::shared_ptr<const ClusterModel> model() const;
  // <dataset>.audit.jsonl
  std::filesystem::path audit_path() const;

 private:
  struct Snapshot {
    std::vector<PatchRecord> records;
    std::unordered_map<std::string, std::size_t> index;
  };

  std::shared_ptr<const Snapshot> snapshot() const;  // throws kNotReady

  ServiceConfig config_;
  mutable std::mutex read_mutex_;  // guards the two pointers below
  std::shared_ptr<const Snapshot> dataset_;
  std::shared_ptr<const ClusterModel> model_;
  std::mutex write_mutex_;
  std::atomic<bool> training_{false};
};

// HTTP status for a domain error.
int http_status(ErrorCode code);

// Registers the /api routes on `server`. The service must outlive it.
void register_routes(httplib::Server& server, PatchService& service);

// Blocks serving on host:port until the process is stopped.
void serve(PatchService& service, const std::string& host, int port);

}  // namespace patchtriage

#endif  // PATCHTRIAGE_API_H_
