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

#include "patchtriage/api.h"

#include <chrono>
#include <ctime>

#include "httplib.h"
#include "patchtriage/io.h"
#include "patchtriage/taxonomy.h"

namespace patchtriage {
namespace {

std::string utc_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string next_version(const ClusterModel* current) {
  if (current == nullptr) return "1";
  try {
    return std::to_string(std::stoull(current->model_version) + 1);
  } catch (const std::exception&) {
    return current->model_version + ".1";
  }
}

}  // namespace

PatchService::PatchService(ServiceConfig config) : config_(std::move(config)) {
  if (!config_.embedder) config_.embedder = std::make_shared<HashedEmbedder>();
  if (!config_.dataset_path.empty()) {
    auto s = std::make_shared<Snapshot>();
    s->records = load_records(config_.dataset_path, config_.format);
    for (std::size_t i = 0; i < s->records.size(); ++i) {
      if (!s->index.emplace(s->records[i].patch_id, i).second) {
        throw Error(ErrorCode::kSchema,
                    "duplicate patch_id '" + s->records[i].patch_id + "'");
      }
    }
    dataset_ = std::move(s);
  }
  if (!config_.model_path.empty() && std::filesystem::exists(config_.model_path)) {
    model_ = std::make_shared<const ClusterModel>(
        load_model(config_.model_path.string()));
  }
}

std::shared_ptr<const PatchService::Snapshot> PatchService::snapshot() const {
  std::shared_ptr<const Snapshot> s;
  {
    std::lock_guard lock(read_mutex_);
    s = dataset_;
  }
  if (!s) throw Error(ErrorCode::kNotReady, "no dataset loaded");
  return s;
}

std::shared_ptr<const ClusterModel> PatchService::model() const {
  std::lock_guard lock(read_mutex_);
  return model_;
}

std::filesystem::path PatchService::audit_path() const {
  return config_.dataset_path.string() + ".audit.jsonl";
}

std::optional<PatchRecord> PatchService::next_unlabeled() const {
  const auto s = snapshot();
  for (const PatchRecord& r : s->records) {
    if (!r.category_manual) return r;
  }
  return std::nullopt;
}

PatchRecord PatchService::get(const std::string& patch_id) const {
  const auto s = snapshot();
  const auto it = s->index.find(patch_id);
  if (it == s->index.end()) {
    throw Error(ErrorCode::kNotFound, "no patch '" + patch_id + "'");
  }
  return s->records[it->second];
}

std::vector<PatchRecord> PatchService::records() const {
  return snapshot()->records;
}

PatchRecord PatchService::submit_label(LabelSubmission submission) {
  const CategoryId category(submission.category);
  std::lock_guard write_lock(write_mutex_);
  const auto current = snapshot();
  const auto it = current->index.find(submission.patch_id);
  if (it == current->index.end()) {
    throw Error(ErrorCode::kNotFound,
                "no patch '" + submission.patch_id + "'");
  }
  auto next = std::make_shared<Snapshot>(*current);
  PatchRecord& r = next->records[it->second];
  r.category_manual = category;
  save_records(next->records, config_.dataset_path, config_.format);
  if (submission.submitted_at.empty()) submission.submitted_at = utc_now();
  const nlohmann::json audit = {{"patch_id", submission.patch_id},
                                {"category", submission.category},
                                {"annotator", submission.annotator},
                                {"submitted_at", submission.submitted_at}};
  append_to_file(audit_path(), audit.dump() + "\n");
  PatchRecord updated = r;
  {
    std::lock_guard lock(read_mutex_);
    dataset_ = std::move(next);
  }
  return updated;
}

nlohmann::json PatchService::retrain() {
  if (training_.exchange(true)) {
    throw Error(ErrorCode::kBusy, "a retrain is already running");
  }
  struct Release {
    std::atomic<bool>& flag;
    ~Release() { flag = false; }
  } release{training_};

  Warnings warnings;
  const std::vector<LabeledSummary> labeled =
      labeled_from_records(snapshot()->records, &warnings);
  TrainOptions options = config_.train;
  const auto previous = model();
  options.model_version = next_version(previous.get());
  const TemplateSet* templates =
      config_.templates ? &*config_.templates : nullptr;
  if (templates == nullptr) options.augment_target = 0;
  TrainResult result =
      train_seeded(labeled, templates, *config_.embedder, options, &warnings);
  if (!config_.model_path.empty()) {
    save_model(result.model, config_.model_path.string());
  }
  auto model = std::make_shared<const ClusterModel>(std::move(result.model));
  nlohmann::json out;
  if (result.metrics) {
    out = metrics_to_json(*result.metrics);
  } else {
    out = {{"accuracy", nullptr}, {"nmi", nullptr}, {"n", 0}};
  }
  out["model_version"] = model->model_version;
  out["k"] = model->k();
  out["n_train"] = result.n_train;
  out["n_test"] = result.n_test;
  out["warnings"] = warnings;
  {
    std::lock_guard lock(read_mutex_);
    model_ = std::move(model);
  }
  return out;
}

Prediction PatchService::predict(const std::string& summary) const {
  const auto m = model();
  if (!m) throw Error(ErrorCode::kNotReady, "no model loaded");
  return classify(*m, *config_.embedder, summary);
}

CategoryStats PatchService::stats(CategoryField field) const {
  return accumulate_stats(snapshot()->records, field);
}

std::vector<MismatchEntry> PatchService::mismatches() const {
  return mismatch_matrix(snapshot()->records);
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kInvalidCategory:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kSchema:
    case ErrorCode::kEmptyText:
      return 400;
    case ErrorCode::kBusy:
      return 409;
    case ErrorCode::kDegenerateSeeding:
      return 422;
    case ErrorCode::kNotReady:
    case ErrorCode::kBackendUnavailable:
      return 503;
    default:
      return 500;
  }
}

namespace {

void send_json(httplib::Response& res, const nlohmann::json& body,
               int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code,
                const std::string& message) {
  send_json(res,
            {{"error", std::string(error_code_name(code))},
             {"message", message}},
            http_status(code));
}

nlohmann::json parse_body(const httplib::Request& req) {
  try {
    nlohmann::json j = nlohmann::json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::kSchema, "body must be an object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("bad JSON body: ") + e.what());
  }
}

// Wraps a handler so domain and JSON errors become status codes.
httplib::Server::Handler guarded(
    std::function<void(const httplib::Request&, httplib::Response&)> fn) {
  return [fn = std::move(fn)](const httplib::Request& req,
                              httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    } catch (const nlohmann::json::exception& e) {
      send_error(res, ErrorCode::kSchema, e.what());
    } catch (const std::exception& e) {
      send_json(res, {{"error", "Internal"}, {"message", e.what()}}, 500);
    }
  };
}

}  // namespace

void register_routes(httplib::Server& server, PatchService& service) {
  server.Get("/api/taxonomy",
             guarded([](const httplib::Request&, httplib::Response& res) {
               send_json(res, taxonomy_json());
             }));

  // Registered before the {id} route, which would otherwise match "next".
  server.Get(
      "/api/patches/next",
      guarded([&service](const httplib::Request& req, httplib::Response& res) {
        const std::string unlabeled = req.has_param("unlabeled")
                                          ? req.get_param_value("unlabeled")
                                          : "true";
        if (unlabeled == "false") {
          const auto all = service.records();
          if (all.empty()) {
            res.status = 204;
          } else {
            send_json(res, record_to_json(all.front()));
          }
          return;
        }
        if (unlabeled != "true") {
          throw Error(ErrorCode::kInvalidArgument,
                      "unlabeled must be true or false");
        }
        const std::optional<PatchRecord> r = service.next_unlabeled();
        if (r) {
          send_json(res, record_to_json(*r));
        } else {
          res.status = 204;
        }
      }));

  server.Get(
      R"(/api/patches/([^/]+))",
      guarded([&service](const httplib::Request& req, httplib::Response& res) {
        send_json(res, record_to_json(service.get(req.matches[1])));
      }));

  server.Post(
      R"(/api/patches/([^/]+)/label)",
      guarded([&service](const httplib::Request& req, httplib::Response& res) {
        const nlohmann::json body = parse_body(req);
        if (!body.contains("category") || !body["category"].is_number_integer()) {
          throw Error(ErrorCode::kInvalidCategory,
                      "category must be an integer");
        }
        LabelSubmission s;
        s.patch_id = req.matches[1];
        s.category = body["category"].get<int>();
        s.annotator = body.value("annotator", std::string());
        send_json(res, record_to_json(service.submit_label(std::move(s))));
      }));

  server.Post("/api/train", guarded([&service](const httplib::Request&,
                                               httplib::Response& res) {
                send_json(res, service.retrain());
              }));

  server.Post(
      "/api/predict",
      guarded([&service](const httplib::Request& req, httplib::Response& res) {
        const nlohmann::json body = parse_body(req);
        if (!body.contains("summary") || !body["summary"].is_string()) {
          throw Error(ErrorCode::kInvalidArgument, "summary must be a string");
        }
        const Prediction p = service.predict(body["summary"].get<std::string>());
        send_json(res, {{"category", p.category.value()},
                        {"distances", p.distances}});
      }));

  server.Get(
      "/api/stats",
      guarded([&service](const httplib::Request& req, httplib::Response& res) {
        const std::string by =
            req.has_param("by") ? req.get_param_value("by") : "auto";
        send_json(res, stats_to_json(service.stats(parse_category_field(by))));
      }));

  server.Get("/api/mismatches",
             guarded([&service](const httplib::Request&, httplib::Response& res) {
               send_json(res, mismatches_to_json(service.mismatches()));
             }));
}

void serve(PatchService& service, const std::string& host, int port) {
  httplib::Server server;
  register_routes(server, service);
  if (!server.listen(host, port)) {
    throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" +
                                    std::to_string(port));
  }
}

}  // namespace patchtriage
