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

#include "patchtriage/pipeline.h"

#include <set>

#include "patchtriage/io.h"

namespace patchtriage {
namespace {

std::vector<LabeledSummary> embeddable(std::span<const LabeledSummary> items,
                                       Warnings* warnings) {
  std::vector<LabeledSummary> out;
  out.reserve(items.size());
  for (const LabeledSummary& s : items) {
    if (tokenize(s.text).empty()) {
      warn(warnings, "EmptyText: skipping summary '" + s.text + "'");
      continue;
    }
    out.push_back(s);
  }
  return out;
}

Matrix embed_matrix(const Embedder& embedder,
                    std::span<const LabeledSummary> items) {
  std::vector<std::string> texts;
  texts.reserve(items.size());
  for (const LabeledSummary& s : items) texts.push_back(s.text);
  const std::vector<EmbeddingVector> vectors = embedder.embed(texts);
  Matrix m(vectors.size(), embedder.dimension());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].values.size() != embedder.dimension()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "embedder returned a vector of the wrong width");
    }
    std::copy(vectors[i].values.begin(), vectors[i].values.end(),
              m.row(i).begin());
  }
  return m;
}

std::optional<std::string> training_text(const PatchRecord& r,
                                        const CleanupRules& rules) {
  if (r.summary_clean && !r.summary_clean->empty()) return r.summary_clean;
  if (!r.summary_raw) return std::nullopt;
  try {
    return clean_summary(*r.summary_raw, rules);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string record_label(const PatchRecord& r, std::size_t i) {
  return "record " + std::to_string(i) + " (" + r.patch_id + ")";
}

std::string source_name(EmbeddingSource s) {
  return s == EmbeddingSource::kRemote ? "remote" : "hashed";
}

}  // namespace

TrainResult train_seeded(std::span<const LabeledSummary> labeled,
                         const TemplateSet* templates,
                         const Embedder& embedder, const TrainOptions& options,
                         Warnings* warnings) {
  const std::vector<LabeledSummary> usable = embeddable(labeled, warnings);
  TrainTestSplit split = split_train_test(usable, options.split_ratio,
                                          options.split_seed, warnings);
  if (options.augment_target > 0) {
    if (templates == nullptr) {
      throw Error(ErrorCode::kInvalidArgument,
                  "augmentation requested without templates");
    }
    std::set<CategoryId> present;
    for (const LabeledSummary& s : split.train) present.insert(s.category);
    std::vector<LabeledSummary> augmented =
        augment_dataset(split.train, *templates, options.augment_target,
                        options.augment_seed, warnings);
    // Held-out texts must stay unseen by the labeled half.
    std::set<std::string> held_out;
    for (const LabeledSummary& s : split.test) held_out.insert(s.text);
    split.train.clear();
    for (LabeledSummary& s : augmented) {
      if (present.contains(s.category) && !held_out.contains(s.text)) {
        split.train.push_back(std::move(s));
      }
    }
  }

  std::vector<CategoryId> labels;
  labels.reserve(split.train.size());
  for (const LabeledSummary& s : split.train) labels.push_back(s.category);
  const Matrix train = embed_matrix(embedder, split.train);
  const Matrix test = split.test.empty()
                          ? Matrix(0, embedder.dimension())
                          : embed_matrix(embedder, split.test);

  FitResult fit = seeded_fit(train, labels, test, options.fit);
  TrainResult result;
  result.model = std::move(fit.model);
  result.model.model_version = options.model_version;
  result.model.embedder = source_name(embedder.source());
  result.model.seed = options.split_seed;
  result.n_train = split.train.size();
  result.n_test = split.test.size();
  if (!split.test.empty()) {
    std::vector<CategoryId> predicted, truth;
    for (std::size_t i = 0; i < split.test.size(); ++i) {
      predicted.push_back(result.model.cluster_to_category.at(
          fit.assignment[split.train.size() + i]));
      truth.push_back(split.test[i].category);
    }
    result.metrics = evaluate_categories(predicted, truth);
  }
  return result;
}

std::vector<LabeledSummary> synthetic_corpus(const TemplateSet& templates,
                                             std::size_t per_category_target,
                                             std::uint64_t seed) {
  return augment_dataset({}, templates, per_category_target, seed);
}

TrainResult train_demo_model(const TemplateSet& templates) {
  const std::vector<LabeledSummary> corpus = synthetic_corpus(templates);
  return train_seeded(corpus, nullptr, HashedEmbedder());
}

std::filesystem::path default_model_path() {
  return data_dir() / "demo_model.json";
}

MetricsReport evaluate_model(const ClusterModel& model,
                             std::span<const LabeledSummary> labeled,
                             const Embedder& embedder, Warnings* warnings) {
  const std::vector<LabeledSummary> usable = embeddable(labeled, warnings);
  if (usable.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "nothing to evaluate");
  }
  const Matrix vectors = embed_matrix(embedder, usable);
  std::vector<CategoryId> predicted, truth;
  for (std::size_t i = 0; i < usable.size(); ++i) {
    predicted.push_back(predict_category(model, vectors.row(i)).category);
    truth.push_back(usable[i].category);
  }
  return evaluate_categories(predicted, truth);
}

Prediction classify(const ClusterModel& model, const Embedder& embedder,
                    const std::string& summary) {
  const std::vector<std::string> texts = {summary};
  const std::vector<EmbeddingVector> v = embedder.embed(texts);
  return predict_category(model, v.at(0).values);
}

std::vector<LabeledSummary> labeled_from_records(
    std::span<const PatchRecord> records, Warnings* warnings) {
  std::vector<LabeledSummary> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const PatchRecord& r = records[i];
    if (!r.category_manual) continue;
    std::optional<std::string> text = training_text(r, CleanupRules::defaults());
    if (!text) {
      warn(warnings, record_label(r, i) + " has a label but no usable summary");
      continue;
    }
    out.push_back({std::move(*text), *r.category_manual, false});
  }
  return out;
}

std::vector<PatchRecord> summarize_records(std::span<const PatchRecord> records,
                                           CompletionBackend& backend,
                                           const SummarizeOptions& options,
                                           Warnings* warnings) {
  std::vector<PatchRecord> out(records.begin(), records.end());
  std::vector<std::size_t> pending;
  std::vector<std::string> diffs;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].diff_raw.empty() && options.skip_empty_diff) {
      out[i].category_auto = CategoryId(1);
      warn(warnings, record_label(out[i], i) +
                         " has an empty diff: textual NoOp, category 1");
      continue;
    }
    pending.push_back(i);
    diffs.push_back(out[i].diff_raw);
  }
  const std::vector<SummaryOutcome> outcomes =
      summarize_batch(backend, diffs, options.parallelism);
  for (std::size_t k = 0; k < pending.size(); ++k) {
    PatchRecord& r = out[pending[k]];
    const SummaryOutcome& o = outcomes[k];
    if (!o.summary) {
      warn(warnings, record_label(r, pending[k]) + " " +
                         std::string(error_code_name(*o.error)) + ": " +
                         o.error_message);
      continue;
    }
    r.summary_raw = *o.summary;
    try {
      r.summary_clean = clean_summary(*o.summary, options.rules);
    } catch (const Error& e) {
      r.summary_clean.reset();
      warn(warnings, record_label(r, pending[k]) + " " +
                         std::string(error_code_name(e.code())) + ": " +
                         e.what());
    }
  }
  return out;
}

std::vector<PatchRecord> categorize_records(std::span<const PatchRecord> records,
                                            const ClusterModel& model,
                                            const Embedder& embedder,
                                            Warnings* warnings) {
  std::vector<PatchRecord> out(records.begin(), records.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    PatchRecord& r = out[i];
    if (r.diff_raw.empty()) {
      r.category_auto = CategoryId(1);
      continue;
    }
    const std::optional<std::string> text =
        training_text(r, CleanupRules::defaults());
    if (!text || tokenize(*text).empty()) {
      warn(warnings, record_label(r, i) + " has no usable summary");
      continue;
    }
    r.category_auto = classify(model, embedder, *text).category;
  }
  return out;
}

}  // namespace patchtriage
