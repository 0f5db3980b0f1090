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

#include "patchtriage/clusterer.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>

#include "patchtriage/error.h"
#include "patchtriage/io.h"
#include "patchtriage/random.h"

namespace patchtriage {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix();
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "row " + std::to_string(i) + " has " +
                      std::to_string(rows[i].size()) + " columns, expected " +
                      std::to_string(m.cols()));
    }
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
  std::vector<std::vector<double>> out;
  out.reserve(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    out.emplace_back(row(i).begin(), row(i).end());
  }
  return out;
}

double squared_distance(std::span<const double> a,
                        std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::size_t nearest_centroid(const Matrix& centroids,
                             std::span<const double> v) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < centroids.rows(); ++j) {
    const double d = squared_distance(v, centroids.row(j));
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

double wcss(const Matrix& points, const Matrix& centroids,
            const Assignment& assignment) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    s += squared_distance(points.row(i), centroids.row(assignment[i]));
  }
  return s;
}

namespace {

constexpr std::size_t kUnpinned = std::numeric_limits<std::size_t>::max();

void check_options(const FitOptions& options) {
  if (options.max_iter < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_iter must be >= 1");
  }
  if (!(options.tol >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tol must be >= 0");
  }
}

// Means in point-index order. Clusters with no members keep their centroid.
Matrix cluster_means(const Matrix& points, const Assignment& assignment,
                     const Matrix& previous) {
  Matrix sums(previous.rows(), previous.cols());
  std::vector<std::size_t> counts(previous.rows(), 0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    std::span<double> s = sums.row(assignment[i]);
    std::span<const double> p = points.row(i);
    for (std::size_t d = 0; d < p.size(); ++d) s[d] += p[d];
    ++counts[assignment[i]];
  }
  for (std::size_t j = 0; j < sums.rows(); ++j) {
    std::span<double> s = sums.row(j);
    if (counts[j] == 0) {
      std::span<const double> prev = previous.row(j);
      std::copy(prev.begin(), prev.end(), s.begin());
      continue;
    }
    const double n = static_cast<double>(counts[j]);
    for (double& x : s) x /= n;
  }
  return sums;
}

// Gives each empty cluster the movable point farthest from its own
// centroid, taken only from clusters that keep at least one member.
void repair_empty_clusters(const Matrix& points, const Matrix& centroids,
                           const std::vector<std::size_t>& pinned,
                           Assignment& assignment) {
  std::vector<std::size_t> counts(centroids.rows(), 0);
  for (std::size_t c : assignment) ++counts[c];
  std::vector<bool> moved(points.rows(), false);
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] != 0) continue;
    std::size_t best = kUnpinned;
    double best_d = -1.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
      if (moved[i] || pinned[i] != kUnpinned || counts[assignment[i]] < 2) {
        continue;
      }
      const double d =
          squared_distance(points.row(i), centroids.row(assignment[i]));
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    if (best == kUnpinned) continue;
    --counts[assignment[best]];
    assignment[best] = j;
    counts[j] = 1;
    moved[best] = true;
  }
}

FitResult run_lloyd(const Matrix& points, Matrix centroids,
                    const std::vector<std::size_t>& pinned,
                    const FitOptions& options) {
  check_options(options);
  FitResult result;
  Assignment assignment(points.rows(), 0);
  ClusterModel& model = result.model;
  model.max_iter = options.max_iter;
  model.tol = options.tol;

  for (int it = 1; it <= options.max_iter; ++it) {
    for (std::size_t i = 0; i < points.rows(); ++i) {
      assignment[i] = pinned[i] != kUnpinned
                          ? pinned[i]
                          : nearest_centroid(centroids, points.row(i));
    }
    repair_empty_clusters(points, centroids, pinned, assignment);
    Matrix updated = cluster_means(points, assignment, centroids);
    double shift = 0.0;
    for (std::size_t j = 0; j < updated.rows(); ++j) {
      shift = std::max(shift, std::sqrt(squared_distance(updated.row(j),
                                                         centroids.row(j))));
    }
    centroids = std::move(updated);
    const double w = wcss(points, centroids, assignment);
    assert(model.wcss_history.empty() ||
           w <= model.wcss_history.back() * (1 + 1e-12) + 1e-12);
    model.wcss_history.push_back(w);
    model.iterations_run = it;
    if (options.observer) {
      options.observer(IterationState{it, &centroids, &assignment, shift, w});
    }
    if (shift < options.tol) {
      model.converged = true;
      break;
    }
  }
  for (std::size_t i = 0; i < points.rows(); ++i) {
    assignment[i] = pinned[i] != kUnpinned
                        ? pinned[i]
                        : nearest_centroid(centroids, points.row(i));
  }
  model.centroids = std::move(centroids);
  result.assignment = std::move(assignment);
  return result;
}

}  // namespace

Matrix kmeans_plus_plus(const Matrix& points, std::size_t k,
                        std::uint64_t seed) {
  if (k == 0 || points.rows() < k) {
    throw Error(ErrorCode::kTooFewPoints,
                std::to_string(points.rows()) + " points for k=" +
                    std::to_string(k));
  }
  Rng rng = make_rng(seed);
  const std::size_t n = points.rows();
  Matrix centres(k, points.cols());
  auto take = [&](std::size_t c, std::size_t i) {
    std::span<const double> p = points.row(i);
    std::copy(p.begin(), p.end(), centres.row(c).begin());
  };
  take(0, uniform_index(rng, n));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    d2[i] = squared_distance(points.row(i), centres.row(0));
  }
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t chosen = 0;
    if (total > 0.0) {
      const double r = uniform_unit(rng) * total;
      double cumulative = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        chosen = i;
        cumulative += d2[i];
        if (r < cumulative) break;
      }
    } else {
      chosen = uniform_index(rng, n);
    }
    take(c, chosen);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points.row(i), centres.row(c)));
    }
  }
  return centres;
}

FitResult lloyd(const Matrix& points, Matrix initial,
                const FitOptions& options) {
  if (initial.rows() == 0 || points.rows() < initial.rows()) {
    throw Error(ErrorCode::kTooFewPoints,
                std::to_string(points.rows()) + " points for k=" +
                    std::to_string(initial.rows()));
  }
  if (initial.cols() != points.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "centroid width differs from point width");
  }
  const std::vector<std::size_t> pinned(points.rows(), kUnpinned);
  return run_lloyd(points, std::move(initial), pinned, options);
}

FitResult kmeans_fit(const Matrix& points, std::size_t k, std::uint64_t seed,
                     const FitOptions& options) {
  if (k == 0 || k > static_cast<std::size_t>(kNumCategories)) {
    throw Error(ErrorCode::kInvalidArgument,
                "k must be in [1, " + std::to_string(kNumCategories) + "]");
  }
  if (points.rows() < k) {
    throw Error(ErrorCode::kTooFewPoints,
                std::to_string(points.rows()) + " points for k=" +
                    std::to_string(k));
  }
  check_options(options);
  FitResult result =
      lloyd(points, kmeans_plus_plus(points, k, seed), options);
  ClusterModel& m = result.model;
  m.method = "kmeans";
  m.seed = seed;
  m.trained_on = {0, points.rows()};
  for (std::size_t j = 0; j < k; ++j) {
    m.cluster_to_category.emplace_back(static_cast<int>(j));
  }
  return result;
}

FitResult seeded_fit(const Matrix& labeled,
                     std::span<const CategoryId> labels,
                     const Matrix& unlabeled, const FitOptions& options) {
  if (labels.size() != labeled.rows()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(labels.size()) + " labels for " +
                    std::to_string(labeled.rows()) + " labeled vectors");
  }
  std::vector<CategoryId> categories(labels.begin(), labels.end());
  std::sort(categories.begin(), categories.end());
  categories.erase(std::unique(categories.begin(), categories.end()),
                   categories.end());
  if (categories.size() < 2) {
    throw Error(ErrorCode::kDegenerateSeeding,
                "seeding needs at least two labeled categories, got " +
                    std::to_string(categories.size()));
  }
  if (unlabeled.rows() > 0 && unlabeled.cols() != labeled.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "labeled and unlabeled vectors differ in width");
  }
  const std::size_t dim = labeled.cols();
  Matrix points(labeled.rows() + unlabeled.rows(), dim);
  std::vector<std::size_t> pinned(points.rows(), kUnpinned);
  for (std::size_t i = 0; i < labeled.rows(); ++i) {
    std::copy(labeled.row(i).begin(), labeled.row(i).end(),
              points.row(i).begin());
    pinned[i] = static_cast<std::size_t>(
        std::lower_bound(categories.begin(), categories.end(), labels[i]) -
        categories.begin());
  }
  for (std::size_t i = 0; i < unlabeled.rows(); ++i) {
    std::copy(unlabeled.row(i).begin(), unlabeled.row(i).end(),
              points.row(labeled.rows() + i).begin());
  }

  Assignment seeds(pinned.begin(), pinned.begin() + labeled.rows());
  Matrix initial = cluster_means(labeled, seeds, Matrix(categories.size(), dim));
  FitResult result = run_lloyd(points, std::move(initial), pinned, options);
  ClusterModel& m = result.model;
  m.method = "seeded";
  m.seed = 0;
  m.trained_on = {labeled.rows(), unlabeled.rows()};
  m.cluster_to_category = std::move(categories);
  return result;
}

Prediction predict_category(const ClusterModel& model,
                            std::span<const double> v) {
  if (v.size() != model.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vector has " + std::to_string(v.size()) +
                    " dimensions, model expects " +
                    std::to_string(model.dimension()));
  }
  if (model.k() == 0) {
    throw Error(ErrorCode::kNotReady, "model has no centroids");
  }
  Prediction p;
  p.distances.reserve(model.k());
  for (std::size_t j = 0; j < model.k(); ++j) {
    p.distances.push_back(squared_distance(v, model.centroids.row(j)));
  }
  p.cluster = static_cast<std::size_t>(
      std::min_element(p.distances.begin(), p.distances.end()) -
      p.distances.begin());
  p.category = model.cluster_to_category.at(p.cluster);
  return p;
}

std::vector<std::size_t> max_weight_assignment(
    const std::vector<std::vector<double>>& weights) {
  const std::size_t n = weights.size();
  if (n == 0) return {};
  const std::size_t m = weights[0].size();
  if (m < n) {
    throw Error(ErrorCode::kInvalidArgument,
                "assignment needs rows <= columns");
  }
  double top = 0.0;
  for (const auto& row : weights) {
    if (row.size() != m) {
      throw Error(ErrorCode::kDimensionMismatch, "ragged weight matrix");
    }
    for (double w : row) top = std::max(top, w);
  }
  // Shortest augmenting path Hungarian on costs top - w, 1-based with a
  // virtual column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = (top - weights[i0 - 1][j - 1]) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kLengthMismatch,
                "lengths differ: " + std::to_string(a) + " vs " +
                    std::to_string(b));
  }
  if (a == 0) throw Error(ErrorCode::kInvalidArgument, "no points");
}

std::vector<int> distinct_values(std::span<const int> xs) {
  std::vector<int> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::size_t index_of(const std::vector<int>& sorted, int x) {
  return static_cast<std::size_t>(
      std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
}

// Sums in ascending order so the total does not depend on iteration order.
double sorted_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

}  // namespace

double clustering_accuracy(std::span<const int> predicted,
                           std::span<const int> truth) {
  check_lengths(predicted.size(), truth.size());
  const std::vector<int> clusters = distinct_values(predicted);
  const std::vector<int> labels = distinct_values(truth);
  const bool transpose = clusters.size() > labels.size();
  const std::size_t rows = transpose ? labels.size() : clusters.size();
  const std::size_t cols = transpose ? clusters.size() : labels.size();
  std::vector<std::vector<double>> counts(rows, std::vector<double>(cols, 0));
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const std::size_t c = index_of(clusters, predicted[i]);
    const std::size_t l = index_of(labels, truth[i]);
    if (transpose) {
      counts[l][c] += 1;
    } else {
      counts[c][l] += 1;
    }
  }
  const std::vector<std::size_t> match = max_weight_assignment(counts);
  double agree = 0.0;
  for (std::size_t r = 0; r < rows; ++r) agree += counts[r][match[r]];
  return agree / static_cast<double>(predicted.size());
}

double clustering_accuracy(std::span<const int> predicted,
                           std::span<const int> truth,
                           std::span<const int> mapping) {
  check_lengths(predicted.size(), truth.size());
  std::size_t agree = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] < 0 ||
        static_cast<std::size_t>(predicted[i]) >= mapping.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "cluster " + std::to_string(predicted[i]) +
                      " has no mapping");
    }
    if (mapping[predicted[i]] == truth[i]) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(predicted.size());
}

double nmi(std::span<const int> a, std::span<const int> b) {
  check_lengths(a.size(), b.size());
  const double n = static_cast<double>(a.size());
  std::map<int, std::size_t> ca, cb;
  std::map<std::pair<int, int>, std::size_t> joint;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++ca[a[i]];
    ++cb[b[i]];
    ++joint[{a[i], b[i]}];
  }
  auto entropy = [n](const std::map<int, std::size_t>& counts) {
    std::vector<double> terms;
    for (const auto& [label, c] : counts) {
      const double p = static_cast<double>(c) / n;
      terms.push_back(-p * std::log(p));
    }
    return sorted_sum(std::move(terms));
  };
  const double ha = entropy(ca);
  const double hb = entropy(cb);
  if (ha == 0.0 && hb == 0.0) return 1.0;
  if (ha == 0.0 || hb == 0.0) return 0.0;
  std::vector<double> terms;
  for (const auto& [key, c] : joint) {
    const double nab = static_cast<double>(c);
    const double na = static_cast<double>(ca[key.first]);
    const double nb = static_cast<double>(cb[key.second]);
    terms.push_back(nab / n * std::log(n * nab / (na * nb)));
  }
  const double mi = sorted_sum(std::move(terms));
  return std::clamp(2.0 * mi / (ha + hb), 0.0, 1.0);
}

void align_to_labels(ClusterModel& model, const Assignment& assignment,
                     std::span<const CategoryId> labels) {
  check_lengths(assignment.size(), labels.size());
  const std::size_t k = model.k();
  std::vector<std::vector<double>> counts(
      k, std::vector<double>(kNumCategories, 0.0));
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    counts.at(assignment[i])[labels[i].value()] += 1;
  }
  const std::vector<std::size_t> match = max_weight_assignment(counts);
  model.cluster_to_category.clear();
  for (std::size_t j = 0; j < k; ++j) {
    model.cluster_to_category.emplace_back(static_cast<int>(match[j]));
  }
}

nlohmann::json model_to_json(const ClusterModel& model) {
  nlohmann::json mapping = nlohmann::json::array();
  for (CategoryId c : model.cluster_to_category) mapping.push_back(c.value());
  return {
      {"model_version", model.model_version},
      {"k", model.k()},
      {"D", model.dimension()},
      {"seed", model.seed},
      {"centroids", model.centroids.data()},
      {"cluster_to_category", mapping},
      {"training",
       {{"method", model.method},
        {"embedder", model.embedder},
        {"iterations_run", model.iterations_run},
        {"converged", model.converged},
        {"max_iter", model.max_iter},
        {"tol", model.tol},
        {"trained_on",
         {{"labeled", model.trained_on.labeled},
          {"unlabeled", model.trained_on.unlabeled}}},
        {"wcss_history", model.wcss_history}}},
  };
}

ClusterModel model_from_json(const nlohmann::json& j) {
  try {
    ClusterModel m;
    m.model_version = j.at("model_version").get<std::string>();
    const auto k = j.at("k").get<std::size_t>();
    const auto dim = j.at("D").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto flat = j.at("centroids").get<std::vector<double>>();
    if (k == 0 || dim == 0 || flat.size() != k * dim) {
      throw Error(ErrorCode::kSchema,
                  "centroids must hold k*D = " + std::to_string(k * dim) +
                      " values, got " + std::to_string(flat.size()));
    }
    m.centroids = Matrix(k, dim);
    for (std::size_t r = 0; r < k; ++r) {
      std::copy(flat.begin() + r * dim, flat.begin() + (r + 1) * dim,
                m.centroids.row(r).begin());
    }
    const auto mapping = j.at("cluster_to_category").get<std::vector<int>>();
    if (mapping.size() != k) {
      throw Error(ErrorCode::kSchema,
                  "cluster_to_category must have k entries");
    }
    for (int c : mapping) m.cluster_to_category.emplace_back(c);
    if (j.contains("training")) {
      const nlohmann::json& t = j["training"];
      m.method = t.value("method", "");
      m.embedder = t.value("embedder", "hashed");
      m.iterations_run = t.value("iterations_run", 0);
      m.converged = t.value("converged", false);
      m.max_iter = t.value("max_iter", 300);
      m.tol = t.value("tol", 1e-4);
      if (t.contains("trained_on")) {
        m.trained_on.labeled = t["trained_on"].value("labeled", 0);
        m.trained_on.unlabeled = t["trained_on"].value("unlabeled", 0);
      }
      m.wcss_history =
          t.value("wcss_history", std::vector<double>{});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("bad model: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidCategory) {
      throw Error(ErrorCode::kSchema, std::string("bad model: ") + e.what());
    }
    throw;
  }
}

ClusterModel load_model(const std::string& path) {
  const std::string text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, path + ": " + e.what());
  }
  return model_from_json(j);
}

void save_model(const ClusterModel& model, const std::string& path) {
  write_file_atomically(path, model_to_json(model).dump(1) + "\n");
}

MetricsReport evaluate_categories(std::span<const CategoryId> predicted,
                                  std::span<const CategoryId> truth) {
  check_lengths(predicted.size(), truth.size());
  std::vector<int> p, t;
  for (CategoryId c : predicted) p.push_back(c.value());
  for (CategoryId c : truth) t.push_back(c.value());
  MetricsReport r;
  r.accuracy_mode = "fixed";
  r.n = p.size();
  r.nmi = nmi(p, t);
  std::vector<std::size_t> size(kNumCategories, 0), hit(kNumCategories, 0);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    ++size[t[i]];
    if (p[i] == t[i]) {
      ++hit[t[i]];
      ++agree;
    }
  }
  r.accuracy = static_cast<double>(agree) / static_cast<double>(r.n);
  for (int c = 0; c < kNumCategories; ++c) {
    CategoryMetrics m;
    m.id = c;
    m.size = size[c];
    if (size[c] > 0) {
      m.accuracy = static_cast<double>(hit[c]) / static_cast<double>(size[c]);
    }
    r.per_category.push_back(m);
  }
  return r;
}

nlohmann::json metrics_to_json(const MetricsReport& report) {
  nlohmann::json per = nlohmann::json::array();
  for (const CategoryMetrics& m : report.per_category) {
    per.push_back({{"id", m.id},
                   {"size", m.size},
                   {"accuracy", m.accuracy ? nlohmann::json(*m.accuracy)
                                           : nlohmann::json(nullptr)}});
  }
  return {{"accuracy", report.accuracy},
          {"accuracy_mode", report.accuracy_mode},
          {"nmi", report.nmi},
          {"n", report.n},
          {"per_category", per}};
}

}  // namespace patchtriage
