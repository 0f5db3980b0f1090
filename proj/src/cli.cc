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

#include "patchtriage/cli.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "patchtriage/api.h"
#include "patchtriage/augmentor.h"
#include "patchtriage/dataset.h"
#include "patchtriage/diff.h"
#include "patchtriage/embedder.h"
#include "patchtriage/io.h"
#include "patchtriage/pipeline.h"
#include "patchtriage/summarizer.h"
#include "patchtriage/taxonomy.h"
#include "patchtriage/triage.h"

namespace patchtriage {
namespace {

using nlohmann::json;

struct Globals {
  std::string dataset;
  std::string model = default_model_path().string();
  std::string templates = default_templates_path().string();
  std::string endpoint;
  std::string embed_endpoint;
  std::uint64_t seed = 42;
  std::string format = "jsonl";
  double policy_tau = 0.10;
  std::size_t policy_min_samples = 20;
};

// "--embed-endpoint" -> "PATCHTRIAGE_EMBED_ENDPOINT".
std::string env_name(const std::string& flag) {
  std::string out = "PATCHTRIAGE_";
  for (char c : flag.substr(2)) {
    out += c == '-' ? '_' : static_cast<char>(std::toupper(c));
  }
  return out;
}

template <typename T>
CLI::Option* global_flag(CLI::App& app, const std::string& name, T& target,
                         const std::string& help) {
  return app.add_option(name, target, help)
      ->envname(env_name(name))
      ->capture_default_str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> lines;
  for (std::string& line : split_lines(read_text_file(path))) {
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

void print_warnings(std::ostream& err, const Warnings& warnings) {
  for (const std::string& w : warnings) err << "warning: " << w << "\n";
}

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args);

 private:
  RecordFormat format() const { return parse_record_format(g_.format); }

  std::vector<PatchRecord> dataset() const {
    if (g_.dataset.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--dataset is required");
    }
    return load_records(g_.dataset, format());
  }

  std::shared_ptr<const Embedder> embedder() const {
    if (g_.embed_endpoint.empty()) return std::make_shared<HashedEmbedder>();
    RemoteEmbedderConfig c;
    c.endpoint = g_.embed_endpoint;
    return std::make_shared<RemoteEmbedder>(c);
  }

  SummarizerConfig summarizer_config() const {
    SummarizerConfig c = apply_env_overrides(SummarizerConfig{});
    if (!g_.endpoint.empty()) c.endpoint = g_.endpoint;
    if (!model_name_.empty()) c.model_name = model_name_;
    c.parallelism = parallelism_;
    c.timeout_seconds = timeout_;
    c.max_retries = max_retries_;
    c.validate();
    return c;
  }

  TriagePolicy policy() const {
    TriagePolicy p;
    p.min_pass_rate = g_.policy_tau;
    p.min_samples = g_.policy_min_samples;
    p.skip_noop_categories = !keep_noop_;
    p.pass_rate_basis =
        basis_ == "compiled" ? PassRateBasis::kCompiled : PassRateBasis::kTotal;
    p.validate();
    return p;
  }

  void write_records(const std::vector<PatchRecord>& records) {
    out_ << serialize_records(records, format());
  }

  void add_commands(CLI::App& app);

  std::ostream& out_;
  std::ostream& err_;
  Globals g_;

  // Subcommand options.
  std::string original_, patched_, text_, input_, summary_, output_;
  std::string by_ = "auto";
  std::string basis_ = "total";
  std::string host_ = "127.0.0.1";
  std::string model_name_;
  std::string diff_file_;
  int port_ = 8080;
  int parallelism_ = 4;
  double timeout_ = 60.0;
  int max_retries_ = 2;
  std::size_t target_ = 40;
  std::size_t augment_target_ = 0;
  std::size_t serve_augment_target_ = 40;
  double split_ratio_ = kDefaultSplitRatio;
  bool skip_empty_diff_ = true;
  bool synthetic_ = false;
  bool csv_ = false;
  bool oracle_ = false;
  bool keep_noop_ = false;
  bool neutral_ = false;
};

void Cli::add_commands(CLI::App& app) {
  CLI::App* diff_cmd = app.add_subcommand("diff", "Normal-format diff of two files");
  diff_cmd->add_option("--original", original_)->required();
  diff_cmd->add_option("--patched", patched_)->required();
  diff_cmd->callback([this] {
    out_ << compute_diff(read_text_file(original_), read_text_file(patched_))
                .raw;
  });

  CLI::App* summarize_cmd =
      app.add_subcommand("summarize", "LLM summaries for dataset records");
  summarize_cmd->add_option("--diff", diff_file_,
                        "Summarize one diff file and print the raw summary");
  summarize_cmd->add_option("--model-name", model_name_)
      ->envname("PATCHTRIAGE_MODEL_NAME");
  summarize_cmd->add_option("--parallelism", parallelism_)->capture_default_str();
  summarize_cmd->add_option("--timeout", timeout_, "Seconds per request")
      ->capture_default_str();
  summarize_cmd->add_option("--max-retries", max_retries_)->capture_default_str();
  summarize_cmd->add_flag("--skip-empty-diff,!--no-skip-empty-diff",
                      skip_empty_diff_,
                      "Tag empty diffs as category 1 without calling the LLM")
      ->capture_default_str();
  summarize_cmd->callback([this] {
    const SummarizerConfig config = summarizer_config();
    if (!diff_file_.empty()) {
      out_ << summarize(config, read_text_file(diff_file_)) << "\n";
      return;
    }
    HttpCompletionBackend backend(config);
    SummarizeOptions options;
    options.skip_empty_diff = skip_empty_diff_;
    options.parallelism = parallelism_;
    Warnings w;
    const auto records = summarize_records(dataset(), backend, options, &w);
    print_warnings(err_, w);
    write_records(records);
  });

  CLI::App* clean_cmd = app.add_subcommand("clean", "Apply summary cleanup rules");
  auto* text_opt = clean_cmd->add_option("--text", text_);
  clean_cmd->add_option("--input", input_, "One summary per line")
      ->excludes(text_opt);
  clean_cmd->callback([this] {
    const std::vector<std::string> items =
        input_.empty() ? std::vector<std::string>{text_} : read_lines(input_);
    for (const std::string& s : items) out_ << clean_summary(s) << "\n";
  });

  CLI::App* embed_cmd = app.add_subcommand("embed", "Embedding vectors as JSONL");
  auto* embed_text = embed_cmd->add_option("--text", text_);
  embed_cmd->add_option("--input", input_, "One text per line")
      ->excludes(embed_text);
  embed_cmd->callback([this] {
    const std::vector<std::string> items =
        input_.empty() ? std::vector<std::string>{text_} : read_lines(input_);
    const auto e = embedder();
    for (const EmbeddingVector& v : e->embed(items)) {
      out_ << json{{"vector", v.values},
                   {"source", v.source == EmbeddingSource::kRemote ? "remote"
                                                                  : "hashed"}}
                  .dump()
           << "\n";
    }
  });

  CLI::App* augment_cmd =
      app.add_subcommand("augment", "Top up labeled summaries from templates");
  augment_cmd->add_option("--input", input_, "Seed summaries (JSONL)");
  augment_cmd->add_option("--target", target_)->capture_default_str();
  augment_cmd->callback([this] {
    const TemplateSet t = load_templates(g_.templates);
    const std::vector<LabeledSummary> seeds =
        input_.empty() ? std::vector<LabeledSummary>{}
                       : parse_summaries(read_text_file(input_));
    Warnings w;
    const auto out = augment_dataset(seeds, t, target_, g_.seed, &w);
    print_warnings(err_, w);
    out_ << serialize_summaries(out);
  });

  CLI::App* train_cmd = app.add_subcommand(
      "train", "Seeded k-means from labeled summaries; prints metrics");
  auto* synth = train_cmd->add_flag(
      "--synthetic", synthetic_,
      "Train on the bundled synthetic corpus (reproduces the demo model)");
  train_cmd->add_option("--input", input_, "Labeled summaries (JSONL)")
      ->excludes(synth);
  train_cmd->add_option("--output", output_, "Where to write the model");
  train_cmd->add_option("--augment-target", augment_target_,
                    "Synthetic top-up per category; 0 disables")
      ->capture_default_str();
  train_cmd->add_option("--split-ratio", split_ratio_)->capture_default_str();
  train_cmd->callback([this] {
    const TemplateSet t = load_templates(g_.templates);
    Warnings w;
    std::vector<LabeledSummary> labeled;
    TrainOptions options;
    options.split_ratio = split_ratio_;
    options.split_seed = g_.seed;
    options.augment_seed = g_.seed;
    options.augment_target = augment_target_;
    if (synthetic_) {
      labeled = synthetic_corpus(t, 40, g_.seed);
    } else if (!input_.empty()) {
      labeled = parse_summaries(read_text_file(input_));
    } else {
      labeled = labeled_from_records(dataset(), &w);
    }
    const TrainResult r = train_seeded(labeled, &t, *embedder(), options, &w);
    print_warnings(err_, w);
    if (!output_.empty()) save_model(r.model, output_);
    json report = r.metrics ? metrics_to_json(*r.metrics)
                            : json{{"accuracy", nullptr}, {"nmi", nullptr}};
    report["model_version"] = r.model.model_version;
    report["k"] = r.model.k();
    report["n_train"] = r.n_train;
    report["n_test"] = r.n_test;
    out_ << report.dump() << "\n";
  });

  CLI::App* predict_cmd = app.add_subcommand(
      "predict", "Category of one summary, or of every dataset record");
  predict_cmd->add_option("--summary", summary_);
  predict_cmd->callback([this] {
    const ClusterModel model = load_model(g_.model);
    const auto e = embedder();
    if (!summary_.empty()) {
      const Prediction p = classify(model, *e, clean_summary(summary_));
      out_ << json{{"category", p.category.value()},
                   {"description", describe(p.category)}}
                  .dump()
           << "\n";
      return;
    }
    Warnings w;
    const auto records = categorize_records(dataset(), model, *e, &w);
    print_warnings(err_, w);
    write_records(records);
  });

  CLI::App* evaluate_cmd = app.add_subcommand(
      "evaluate",
      "Per-category accuracy of category_auto against category_manual");
  evaluate_cmd->add_option("--input", input_,
                       "Labeled summaries (JSONL) to score with --model");
  evaluate_cmd->callback([this] {
    Warnings w;
    MetricsReport report;
    if (!input_.empty()) {
      report = evaluate_model(load_model(g_.model),
                              parse_summaries(read_text_file(input_)),
                              *embedder(), &w);
    } else {
      std::vector<CategoryId> predicted, truth;
      const auto records = dataset();
      for (std::size_t i = 0; i < records.size(); ++i) {
        const PatchRecord& r = records[i];
        if (r.category_auto && r.category_manual) {
          predicted.push_back(*r.category_auto);
          truth.push_back(*r.category_manual);
        } else {
          w.push_back("record " + std::to_string(i) + " (" + r.patch_id +
                      ") skipped: needs both categories");
        }
      }
      if (predicted.empty()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "no record has both category_auto and category_manual");
      }
      report = evaluate_categories(predicted, truth);
    }
    print_warnings(err_, w);
    out_ << metrics_to_json(report).dump() << "\n";
  });

  CLI::App* stats_cmd =
      app.add_subcommand("stats", "Per-category compile/pass/NoOp rates");
  stats_cmd->add_option("--by", by_)
      ->check(CLI::IsMember({"auto", "manual"}))
      ->capture_default_str();
  stats_cmd->callback([this] {
    Warnings w;
    const CategoryStats s =
        accumulate_stats(dataset(), parse_category_field(by_), &w);
    print_warnings(err_, w);
    out_ << stats_to_json(s).dump() << "\n";
  });

  CLI::App* mismatches_cmd =
      app.add_subcommand("mismatches", "Auto-vs-manual disagreement counts");
  mismatches_cmd->add_flag("--csv", csv_, "auto,manual,count rows instead of JSON");
  mismatches_cmd->callback([this] {
    Warnings w;
    const auto m = mismatch_matrix(dataset(), &w);
    print_warnings(err_, w);
    if (csv_) {
      out_ << mismatches_to_csv(m);
    } else {
      out_ << mismatches_to_json(m).dump() << "\n";
    }
  });

  CLI::App* replay_cmd = app.add_subcommand(
      "replay", "Simulate the triage filter over a recorded patch stream");
  replay_cmd->add_option("--basis", basis_, "Pass rate over total or compiled")
      ->check(CLI::IsMember({"total", "compiled"}))
      ->capture_default_str();
  replay_cmd->add_flag("--keep-noop", keep_noop_,
                       "Do not skip NoOp categories outright");
  replay_cmd->add_flag("--oracle", oracle_,
                       "Use whole-stream statistics instead of prequential");
  replay_cmd->add_flag("--neutral", neutral_, "Policy that skips nothing");
  replay_cmd->callback([this] {
    const TriagePolicy p = neutral_ ? TriagePolicy::neutral() : policy();
    const ReplayReport r =
        replay(dataset(), p,
               oracle_ ? ReplayMode::kOracle : ReplayMode::kPrequential);
    json j = replay_to_json(r);
    j["policy"] = policy_to_json(p);
    j["mode"] = oracle_ ? "oracle" : "prequential";
    out_ << j.dump() << "\n";
  });

  CLI::App* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  serve_cmd->add_option("--host", host_)->capture_default_str();
  serve_cmd->add_option("--port", port_)->capture_default_str();
  serve_cmd->add_option("--augment-target", serve_augment_target_,
                        "Synthetic top-up per category on retrain")
      ->capture_default_str();
  serve_cmd->callback([this] {
    ServiceConfig c;
    c.dataset_path = g_.dataset;
    c.format = format();
    c.model_path = g_.model;
    c.templates = load_templates(g_.templates);
    c.train.split_seed = g_.seed;
    c.train.augment_seed = g_.seed;
    c.train.augment_target = serve_augment_target_;
    c.embedder = embedder();
    PatchService service(std::move(c));
    err_ << "listening on " << host_ << ":" << port_ << std::endl;
    serve(service, host_, port_);
  });
}

int Cli::run(const std::vector<std::string>& args) {
  CLI::App app{"Semantic triage of generated patches"};
  app.name("patchtriage");
  app.require_subcommand(1, 1);
  app.fallthrough();
  global_flag(app, "--dataset", g_.dataset, "Patch records file");
  global_flag(app, "--model", g_.model, "Model JSON");
  global_flag(app, "--templates", g_.templates, "Augmentation templates");
  global_flag(app, "--endpoint", g_.endpoint, "LLM completion endpoint");
  global_flag(app, "--embed-endpoint", g_.embed_endpoint,
              "Embedding service; the hashed embedder when empty");
  global_flag(app, "--seed", g_.seed, "Split and augmentation seed");
  global_flag(app, "--format", g_.format, "Record format")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  global_flag(app, "--policy-tau", g_.policy_tau, "Minimum pass rate")
      ->check(CLI::Range(0.0, 1.0));
  global_flag(app, "--policy-min-samples", g_.policy_min_samples,
              "Samples needed before a pass-rate skip");
  add_commands(app);

  // CLI11 wants the arguments in reverse order.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out_ << app.help();
      return kExitOk;
    }
    err_ << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err_ << json{{"error", std::string(error_code_name(e.code()))},
                 {"message", e.what()}}
                .dump()
         << "\n";
    return kExitDomainError;
  }
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  try {
    return Cli(out, err).run(args);
  } catch (const Error& e) {
    err << json{{"error", std::string(error_code_name(e.code()))},
                {"message", e.what()}}
               .dump()
        << "\n";
    return kExitDomainError;
  } catch (const std::exception& e) {
    err << json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
    return kExitDomainError;
  }
}

}  // namespace patchtriage
