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

// Training and classification glue shared by the command line and the
// HTTP service: split, augment, embed, fit, evaluate.

#ifndef PATCHTRIAGE_PIPELINE_H_
#define PATCHTRIAGE_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "patchtriage/augmentor.h"
#include "patchtriage/clusterer.h"
#include "patchtriage/dataset.h"
#include "patchtriage/embedder.h"
#include "patchtriage/error.h"
#include "patchtriage/summarizer.h"

namespace patchtriage {

struct TrainOptions {
  double split_ratio = kDefaultSplitRatio;
  std::uint64_t split_seed = kDefaultSplitSeed;
  // Synthetic top-up of the training half; 0 disables. Only categories
  // present in the training half are augmented.
  std::size_t augment_target = 0;
  std::uint64_t augment_seed = 42;
  FitOptions fit;
  std::string model_version = "1";
};

struct TrainResult {
  ClusterModel model;
  // Fixed-mapping metrics on the held-out half; empty when nothing was held
  // out.
  std::optional<MetricsReport> metrics;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

// Stratified split, optional augmentation of the training half, embedding,
// then seeded k-means with the held-out texts as unlabeled points. Held-out
// accuracy compares their cluster categories with their labels. Items the
// embedder rejects as empty are dropped with a warning. `templates` may be
// null when augment_target is 0.
TrainResult train_seeded(std::span<const LabeledSummary> labeled,
                         const TemplateSet* templates,
                         const Embedder& embedder,
                         const TrainOptions& options = {},
                         Warnings* warnings = nullptr);

// The synthetic corpus the demo model is trained on: every category topped
// up to `per_category_target` from the templates.
std::vector<LabeledSummary> synthetic_corpus(const TemplateSet& templates,
                                             std::size_t per_category_target = 40,
                                             std::uint64_t seed = 42);

// Synthetic corpus (40 per category, seed 42), hashed embeddings and the
// default 80/20 split.
TrainResult train_demo_model(const TemplateSet& templates);

std::filesystem::path default_model_path();

// Fixed-mapping metrics of `model` on already labeled summaries.
MetricsReport evaluate_model(const ClusterModel& model,
                             std::span<const LabeledSummary> labeled,
                             const Embedder& embedder,
                             Warnings* warnings = nullptr);

Prediction classify(const ClusterModel& model, const Embedder& embedder,
                    const std::string& summary);

// Manually labeled records as training items. The text is summary_clean,
// else the cleaned summary_raw; records without usable text are skipped
// with a warning.
std::vector<LabeledSummary> labeled_from_records(
    std::span<const PatchRecord> records, Warnings* warnings = nullptr);

struct SummarizeOptions {
  // An empty diff is a textual NoOp: no backend call, category_auto = 1.
  bool skip_empty_diff = true;
  int parallelism = 4;
  CleanupRules rules = CleanupRules::defaults();
};

// Fills summary_raw and summary_clean. Per-record failures leave the
// summary absent and add a warning naming the record and error code.
std::vector<PatchRecord> summarize_records(std::span<const PatchRecord> records,
                                           CompletionBackend& backend,
                                           const SummarizeOptions& options = {},
                                           Warnings* warnings = nullptr);

// Sets category_auto from each record's summary. Empty diffs get category 1;
// records with no summary keep their old value and add a warning.
std::vector<PatchRecord> categorize_records(std::span<const PatchRecord> records,
                                            const ClusterModel& model,
                                            const Embedder& embedder,
                                            Warnings* warnings = nullptr);

}  // namespace patchtriage

#endif  // PATCHTRIAGE_PIPELINE_H_
