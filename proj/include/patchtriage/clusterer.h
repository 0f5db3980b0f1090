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

// Baseline k-means, seeded (constrained) k-means, nearest-centroid
// prediction and the clustering metrics used to evaluate them.
//
// All reductions run in a fixed order, so a fit is a deterministic function
// of its inputs and seed.

#ifndef PATCHTRIAGE_CLUSTERER_H_
#define PATCHTRIAGE_CLUSTERER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "patchtriage/taxonomy.h"

namespace patchtriage {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  // Throws Error(kDimensionMismatch) on ragged input.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  const std::vector<double>& data() const { return data_; }
  std::vector<std::vector<double>> to_rows() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Per-point cluster index in [0, k).
using Assignment = std::vector<std::size_t>;

double squared_distance(std::span<const double> a, std::span<const double> b);

// Index of the nearest row of `centroids`; ties go to the lowest index.
std::size_t nearest_centroid(const Matrix& centroids,
                             std::span<const double> v);

double wcss(const Matrix& points, const Matrix& centroids,
            const Assignment& assignment);

struct IterationState {
  int iteration = 0;  // 1-based
  const Matrix* centroids = nullptr;  // after the update step
  const Assignment* assignment = nullptr;
  double shift = 0.0;
  double wcss = 0.0;
};
using IterationObserver = std::function<void(const IterationState&)>;

struct FitOptions {
  int max_iter = 300;
  double tol = 1e-4;  // on the largest centroid L2 shift
  IterationObserver observer;
};

struct TrainedOn {
  std::size_t labeled = 0;
  std::size_t unlabeled = 0;
};

struct ClusterModel {
  Matrix centroids;
  std::vector<CategoryId> cluster_to_category;
  std::uint64_t seed = 0;
  int iterations_run = 0;
  bool converged = false;
  TrainedOn trained_on;
  std::string model_version = "1";
  std::string method;  // "kmeans" or "seeded"
  std::string embedder = "hashed";
  int max_iter = 300;
  double tol = 1e-4;
  std::vector<double> wcss_history;

  std::size_t k() const { return centroids.rows(); }
  std::size_t dimension() const { return centroids.cols(); }
};

struct FitResult {
  ClusterModel model;
  Assignment assignment;
};

// D^2-weighted seeding. The first centre is uniform; each further centre is
// drawn with probability proportional to the squared distance to the nearest
// chosen centre.
Matrix kmeans_plus_plus(const Matrix& points, std::size_t k,
                        std::uint64_t seed);

// Lloyd iterations from explicit starting centroids. An empty cluster takes
// the point farthest from its own centroid.
FitResult lloyd(const Matrix& points, Matrix initial,
                const FitOptions& options = {});

// Throws Error(kTooFewPoints) if points < k, Error(kInvalidArgument) if k is
// 0 or exceeds the taxonomy size. Cluster i is provisionally mapped to
// category i; see align_to_labels.
FitResult kmeans_fit(const Matrix& points, std::size_t k, std::uint64_t seed,
                     const FitOptions& options = {});

// Seeded constrained k-means: one cluster per labeled category in ascending
// id order, centroids start at the class means, labeled points stay pinned.
// The assignment covers labeled points first, then unlabeled ones. Throws
// Error(kDegenerateSeeding) for fewer than two categories.
FitResult seeded_fit(const Matrix& labeled,
                     std::span<const CategoryId> labels,
                     const Matrix& unlabeled, const FitOptions& options = {});

struct Prediction {
  CategoryId category{0};
  std::size_t cluster = 0;
  std::vector<double> distances;  // squared, per cluster
};

// Throws Error(kDimensionMismatch) on a width mismatch.
Prediction predict_category(const ClusterModel& model,
                            std::span<const double> v);

// Max over injective cluster-to-label mappings of the fraction of agreeing
// points (Hungarian method). Throws Error(kLengthMismatch) or
// Error(kInvalidArgument) for empty input.
double clustering_accuracy(std::span<const int> predicted,
                           std::span<const int> truth);
// Plain agreement after mapping predicted clusters through `mapping`.
double clustering_accuracy(std::span<const int> predicted,
                           std::span<const int> truth,
                           std::span<const int> mapping);

// Maximum-weight perfect matching on a rows x cols weight matrix (rows <=
// cols). Returns the column chosen for each row.
std::vector<std::size_t> max_weight_assignment(
    const std::vector<std::vector<double>>& weights);

// Normalized mutual information with arithmetic-mean normalization.
double nmi(std::span<const int> a, std::span<const int> b);

// Rewrites cluster_to_category to the accuracy-maximizing injective mapping
// for the given assignment and labels.
void align_to_labels(ClusterModel& model, const Assignment& assignment,
                     std::span<const CategoryId> labels);

nlohmann::json model_to_json(const ClusterModel& model);
// Throws Error(kSchema) on a malformed document.
ClusterModel model_from_json(const nlohmann::json& j);
ClusterModel load_model(const std::string& path);
void save_model(const ClusterModel& model, const std::string& path);

struct CategoryMetrics {
  int id = 0;
  std::size_t size = 0;
  std::optional<double> accuracy;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::string accuracy_mode;  // "fixed" or "optimal"
  double nmi = 0.0;
  std::size_t n = 0;
  std::vector<CategoryMetrics> per_category;
};

// Fixed-mapping report over predicted and true category ids. Per-category
// accuracy is the fraction of each true category predicted correctly; all
// 18 categories are listed, with null accuracy when absent.
MetricsReport evaluate_categories(std::span<const CategoryId> predicted,
                                  std::span<const CategoryId> truth);
nlohmann::json metrics_to_json(const MetricsReport& report);

}  // namespace patchtriage

#endif  // PATCHTRIAGE_CLUSTERER_H_
