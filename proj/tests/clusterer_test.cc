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

#include <random>

#include "cluster_oracles.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace patchtriage {
namespace {

using testing::oracle_accuracy;
using testing::oracle_kmeans_plus_plus;
using testing::oracle_lloyd;
using testing::oracle_nmi;
using testing::OracleStep;
using testing::Points;

std::vector<CategoryId> cats(std::initializer_list<int> ids) {
  std::vector<CategoryId> out;
  for (int id : ids) out.emplace_back(id);
  return out;
}

// Runs the library and the oracle from the same start and compares every
// iteration bit for bit.
void expect_same_trajectory(const Points& pts, const Points& init) {
  std::vector<OracleStep> seen;
  FitOptions options;
  options.observer = [&](const IterationState& s) {
    seen.push_back({s.centroids->to_rows(), *s.assignment});
  };
  const FitResult fit =
      lloyd(Matrix::from_rows(pts), Matrix::from_rows(init), options);
  const std::vector<OracleStep> expected =
      oracle_lloyd(pts, init, options.max_iter, options.tol);
  ASSERT_EQ(seen.size(), expected.size());
  for (std::size_t it = 0; it < seen.size(); ++it) {
    EXPECT_EQ(seen[it].centroids, expected[it].centroids) << "iteration " << it;
    EXPECT_EQ(seen[it].assignment, expected[it].assignment)
        << "iteration " << it;
  }
  EXPECT_EQ(fit.model.centroids.to_rows(), expected.back().centroids);
  EXPECT_EQ(fit.model.iterations_run, static_cast<int>(expected.size()));
}

TEST(LloydTest, SixPointFixtureMatchesOracle) {
  const Points& pts = testing::six_point_fixture();
  expect_same_trajectory(pts, {pts[0], pts[1]});
  expect_same_trajectory(pts, {pts[2], pts[5]});
  const FitResult fit = lloyd(Matrix::from_rows(pts),
                              Matrix::from_rows({pts[0], pts[1]}));
  // Converges to the two triad means.
  EXPECT_EQ(fit.model.centroids.to_rows(),
            (Points{{1.0 / 3, 1.0 / 3}, {31.0 / 3, 31.0 / 3}}));
}

TEST(LloydTest, TenPointFixtureMatchesOracle) {
  const Points& pts = testing::ten_point_fixture();
  expect_same_trajectory(pts, {pts[0], pts[1], pts[2]});
  expect_same_trajectory(pts, {pts[9], pts[3], pts[4]});
  expect_same_trajectory(pts, {pts[6], pts[7], pts[8]});
}

TEST(LloydTest, EmptyClusterRepairMatchesOracle) {
  const Points pts = {{0, 0}, {1, 0}, {0, 1}, {5, 5}};
  // The third centroid is far from everything and starts empty.
  expect_same_trajectory(pts, {{0, 0}, {5, 5}, {100, 100}});
  const FitResult fit = lloyd(Matrix::from_rows(pts),
                              Matrix::from_rows({{0, 0}, {5, 5}, {100, 100}}));
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_NE(std::count(fit.assignment.begin(), fit.assignment.end(), j), 0);
  }
}

TEST(KMeansPlusPlusTest, MatchesOracle) {
  for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 977ULL}) {
    for (std::size_t k : {1u, 2u, 3u, 5u}) {
      const Points& pts = testing::ten_point_fixture();
      EXPECT_EQ(kmeans_plus_plus(Matrix::from_rows(pts), k, seed).to_rows(),
                oracle_kmeans_plus_plus(pts, k, seed))
          << "seed " << seed << " k " << k;
    }
  }
}

TEST(KMeansFitTest, FollowsOracleFromSeededStart) {
  for (std::uint64_t seed : {1ULL, 7ULL, 42ULL}) {
    const Points& pts = testing::ten_point_fixture();
    const FitResult fit = kmeans_fit(Matrix::from_rows(pts), 3, seed);
    const auto steps =
        oracle_lloyd(pts, oracle_kmeans_plus_plus(pts, 3, seed), 300, 1e-4);
    EXPECT_EQ(fit.model.centroids.to_rows(), steps.back().centroids);
    EXPECT_EQ(fit.model.seed, seed);
    EXPECT_EQ(fit.model.method, "kmeans");
    EXPECT_TRUE(fit.model.converged);
  }
}

TEST(KMeansFitTest, Trivial) {
  const FitResult fit =
      kmeans_fit(Matrix::from_rows({{2.5, -1.0}, {2.5, -1.0}}), 1, 3);
  EXPECT_EQ(fit.model.centroids.to_rows(), (Points{{2.5, -1.0}}));
  EXPECT_EQ(fit.model.wcss_history.back(), 0.0);
}

TEST(KMeansFitTest, Errors) {
  const Matrix five = Matrix::from_rows({{0}, {1}, {2}, {3}, {4}});
  EXPECT_ERROR_CODE(kmeans_fit(five, 7, 0), ErrorCode::kTooFewPoints);
  EXPECT_ERROR_CODE(kmeans_fit(five, 0, 0), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(kmeans_fit(five, 19, 0), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(Matrix::from_rows({{0, 1}, {2}}),
                    ErrorCode::kDimensionMismatch);
}

TEST(KMeansFitTest, WcssNonIncreasingAndDeterministic) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 60; ++i) {
      rows.push_back({noise(gen) + (i % 4) * 3.0, noise(gen), noise(gen)});
    }
    const Matrix pts = Matrix::from_rows(rows);
    const FitResult a = kmeans_fit(pts, 4, trial);
    const FitResult b = kmeans_fit(pts, 4, trial);
    EXPECT_EQ(a.model.centroids, b.model.centroids);
    EXPECT_EQ(a.assignment, b.assignment);
    for (std::size_t i = 1; i < a.model.wcss_history.size(); ++i) {
      EXPECT_LE(a.model.wcss_history[i],
                a.model.wcss_history[i - 1] * (1 + 1e-12));
    }
  }
}

TEST(SeededFitTest, TenPointFixtureFrozen) {
  // Values from tests/oracles/seeded_kmeans.py.
  const Points& p = testing::ten_point_fixture();
  const Matrix labeled = Matrix::from_rows({p[0], p[3], p[6]});
  const Matrix unlabeled =
      Matrix::from_rows({p[1], p[2], p[4], p[5], p[7], p[8], p[9]});
  const auto labels = cats({4, 7, 11});
  const FitResult fit = seeded_fit(labeled, labels, unlabeled);
  EXPECT_EQ(fit.assignment, (Assignment{0, 1, 2, 0, 0, 1, 1, 2, 2, 2}));
  EXPECT_EQ(fit.model.centroids.to_rows(),
            (Points{{0.25, 0.3333333333333333},
                    {6.083333333333333, 0.5},
                    {3.0, 4.75}}));
  EXPECT_EQ(fit.model.iterations_run, 2);
  EXPECT_EQ(fit.model.cluster_to_category, cats({4, 7, 11}));
  EXPECT_EQ(fit.model.trained_on.labeled, 3u);
  EXPECT_EQ(fit.model.trained_on.unlabeled, 7u);
  EXPECT_EQ(fit.model.method, "seeded");
}

TEST(SeededFitTest, FullyLabeledGivesClassMeans) {
  const Matrix labeled =
      Matrix::from_rows({{0, 0}, {2, 0}, {10, 10}, {10, 12}, {0, 2}});
  const auto labels = cats({9, 9, 1, 1, 9});
  const FitResult fit = seeded_fit(labeled, labels, Matrix());
  EXPECT_EQ(fit.model.cluster_to_category, cats({1, 9}));
  EXPECT_EQ(fit.model.centroids.to_rows(),
            (Points{{10, 11}, {2.0 / 3, 2.0 / 3}}));
  EXPECT_EQ(fit.assignment, (Assignment{1, 1, 0, 0, 1}));
  EXPECT_EQ(fit.model.iterations_run, 1);
}

TEST(SeededFitTest, UnlabeledJoinsNearestAnchor) {
  const Matrix labeled = Matrix::from_rows({{0, 0}, {10, 0}});
  const FitResult fit = seeded_fit(labeled, cats({5, 2}),
                                   Matrix::from_rows({{9, 1}}));
  EXPECT_EQ(fit.model.cluster_to_category[fit.assignment[2]].value(), 2);
}

TEST(SeededFitTest, PinnedPointsNeverMove) {
  // A labeled point sitting on the other class stays with its own label.
  const Matrix labeled = Matrix::from_rows({{0, 0}, {10, 0}, {10, 0.5}});
  const FitResult fit =
      seeded_fit(labeled, cats({0, 3, 0}), Matrix::from_rows({{1, 1}}));
  EXPECT_EQ(fit.assignment, (Assignment{0, 1, 0, 0}));
}

TEST(SeededFitTest, Errors) {
  const Matrix labeled = Matrix::from_rows({{0, 0}, {1, 1}});
  EXPECT_ERROR_CODE(seeded_fit(labeled, cats({3, 3}), Matrix()),
                    ErrorCode::kDegenerateSeeding);
  EXPECT_ERROR_CODE(seeded_fit(labeled, cats({3}), Matrix()),
                    ErrorCode::kLengthMismatch);
  EXPECT_ERROR_CODE(
      seeded_fit(labeled, cats({3, 4}), Matrix::from_rows({{1, 2, 3}})),
      ErrorCode::kDimensionMismatch);
}

ClusterModel toy_model() {
  ClusterModel m;
  m.centroids = Matrix::from_rows({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 2},
                                   {-1, 0}});
  m.cluster_to_category = cats({3, 9, 2, 4, 5, 1});
  return m;
}

TEST(PredictTest, NearestAndTies) {
  const ClusterModel m = toy_model();
  const std::vector<double> on9 = {1, 0};
  EXPECT_EQ(predict_category(m, on9).category.value(), 9);
  // Equidistant to clusters 1 and 2: the lower index wins.
  const std::vector<double> tie = {0.5, 0.5};
  const Prediction p = predict_category(m, tie);
  EXPECT_EQ(p.cluster, 0u);  // (0,0),(1,0),(0,1),(1,1) all tie; 0 wins
  EXPECT_EQ(p.distances.size(), 6u);
  const std::vector<double> between = {0.5, 0.75};
  EXPECT_EQ(predict_category(m, between).cluster, 2u);
  const std::vector<double> wide = {1, 2, 3};
  EXPECT_ERROR_CODE(predict_category(m, wide), ErrorCode::kDimensionMismatch);
}

TEST(AccuracyTest, Basics) {
  const std::vector<int> labels = {0, 0, 1, 1};
  const std::vector<int> swapped = {1, 1, 0, 0};
  const std::vector<int> identity = {0, 1};
  EXPECT_EQ(clustering_accuracy(labels, labels, identity), 1.0);
  EXPECT_EQ(clustering_accuracy(swapped, labels), 1.0);
  EXPECT_EQ(clustering_accuracy(swapped, labels, identity), 0.0);
  const std::vector<int> three = {0, 1, 2};
  EXPECT_ERROR_CODE(clustering_accuracy(three, labels),
                    ErrorCode::kLengthMismatch);
}

TEST(AccuracyTest, UnseenDataAgreement) {
  // 143 of 218 summaries assigned the manually chosen category.
  std::vector<int> predicted(218, 0), truth(218, 0), identity(18);
  for (int c = 0; c < 18; ++c) identity[c] = c;
  for (int i = 143; i < 218; ++i) truth[i] = 1;
  const double acc = clustering_accuracy(predicted, truth, identity);
  EXPECT_EQ(acc, 143.0 / 218.0);
  EXPECT_EQ(std::round(acc * 100) / 100, 0.66);
}

TEST(AccuracyTest, MatchesExhaustiveSearch) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int kc = 1 + gen() % 6, kl = 1 + gen() % 6;
    const int n = 1 + gen() % 40;
    std::vector<int> predicted(n), truth(n);
    for (int i = 0; i < n; ++i) {
      predicted[i] = static_cast<int>(gen() % kc) * 3;
      truth[i] = static_cast<int>(gen() % kl) + 100;
    }
    const double expected = oracle_accuracy(predicted, truth);
    EXPECT_EQ(clustering_accuracy(predicted, truth), expected);
    // Any injective fixed mapping scores no higher.
    std::vector<int> targets(std::max(kc, kl));
    for (std::size_t t = 0; t < targets.size(); ++t) {
      targets[t] = static_cast<int>(t) + 100;
    }
    std::shuffle(targets.begin(), targets.end(), gen);
    std::vector<int> mapping(3 * kc, -1);
    for (int c = 0; c < kc; ++c) mapping[3 * c] = targets[c];
    EXPECT_GE(clustering_accuracy(predicted, truth),
              clustering_accuracy(predicted, truth, mapping));
  }
}

TEST(MaxWeightAssignmentTest, Rectangular) {
  const std::vector<std::vector<double>> w = {{1, 5, 0}, {4, 6, 0}};
  const auto m = max_weight_assignment(w);
  EXPECT_EQ(m, (std::vector<std::size_t>{1, 0}));
}

TEST(NmiTest, Basics) {
  const std::vector<int> a = {0, 0, 1, 1}, constant = {3, 3, 3, 3};
  EXPECT_EQ(nmi(a, a), 1.0);
  EXPECT_EQ(nmi(a, constant), 0.0);
  EXPECT_EQ(nmi(constant, constant), 1.0);
  const std::vector<int> b = {0, 1};
  EXPECT_ERROR_CODE(nmi(a, b), ErrorCode::kLengthMismatch);
}

TEST(NmiTest, SmallExampleByHand) {
  // Contingency [[1,1],[0,2]]: H(A)=ln 2, H(B)=-(1/4)ln(1/4)-(3/4)ln(3/4),
  // I = (1/4)ln(2/3) + (1/4)ln 2 + (1/2)ln(4/3).
  const double ha = std::log(2.0);
  const double hb = -(0.25 * std::log(0.25) + 0.75 * std::log(0.75));
  const double mi = 0.25 * std::log(2.0 / 3.0) + 0.25 * std::log(2.0) +
                    0.5 * std::log(4.0 / 3.0);
  const std::vector<int> a = {0, 0, 1, 1}, b = {0, 1, 1, 1};
  EXPECT_NEAR(nmi(a, b), 2 * mi / (ha + hb), 1e-12);
  EXPECT_NEAR(nmi(a, b), 0.3437110184854508, 1e-12);
}

TEST(NmiTest, MatchesOracleSymmetricAndRelabelInvariant) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 200; ++trial) {
    const int r = 1 + gen() % 6, c = 1 + gen() % 6;
    std::vector<std::vector<double>> table(r, std::vector<double>(c, 0));
    std::vector<int> a, b;
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) {
        const int count = gen() % 4 == 0 ? 0 : static_cast<int>(gen() % 7);
        table[i][j] = count;
        for (int t = 0; t < count; ++t) {
          a.push_back(i);
          b.push_back(j);
        }
      }
    }
    if (a.empty()) continue;
    const double v = nmi(a, b);
    EXPECT_NEAR(v, oracle_nmi(table), 1e-9);
    EXPECT_EQ(v, nmi(b, a));
    std::vector<int> relabeled = a;
    for (int& x : relabeled) x = 50 - 7 * x;
    EXPECT_EQ(v, nmi(relabeled, b));
  }
}

TEST(AlignToLabelsTest, MapsClustersToMajorityCategories) {
  const Matrix pts = Matrix::from_rows({{0, 0}, {0, 0.1}, {9, 9}, {9, 9.1}});
  FitResult fit = kmeans_fit(pts, 2, 1);
  const auto labels = cats({6, 6, 13, 13});
  align_to_labels(fit.model, fit.assignment, labels);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(fit.model.cluster_to_category[fit.assignment[i]], labels[i]);
  }
}

TEST(ModelJsonTest, RoundTripIsExact) {
  const Points& p = testing::ten_point_fixture();
  const FitResult fit = seeded_fit(Matrix::from_rows({p[0], p[3], p[6]}),
                                   cats({4, 7, 11}),
                                   Matrix::from_rows({p[1], p[9]}));
  const nlohmann::json j = model_to_json(fit.model);
  EXPECT_EQ(j["k"], 3);
  EXPECT_EQ(j["D"], 2);
  EXPECT_EQ(j["centroids"].size(), 6u);
  EXPECT_EQ(j["cluster_to_category"], nlohmann::json({4, 7, 11}));
  const ClusterModel back =
      model_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.centroids, fit.model.centroids);
  EXPECT_EQ(back.cluster_to_category, fit.model.cluster_to_category);
  EXPECT_EQ(model_to_json(back), j);

  const std::string path = ::testing::TempDir() + "/model.json";
  save_model(fit.model, path);
  EXPECT_EQ(model_to_json(load_model(path)), j);
}

TEST(ModelJsonTest, SchemaErrors) {
  nlohmann::json j = model_to_json(toy_model());
  j["centroids"].erase(0);
  EXPECT_ERROR_CODE(model_from_json(j), ErrorCode::kSchema);
  j = model_to_json(toy_model());
  j["cluster_to_category"][0] = 18;
  EXPECT_ERROR_CODE(model_from_json(j), ErrorCode::kSchema);
  j = model_to_json(toy_model());
  j.erase("k");
  EXPECT_ERROR_CODE(model_from_json(j), ErrorCode::kSchema);
}

TEST(MetricsReportTest, Shape) {
  const auto pred = cats({1, 1, 2, 9});
  const auto truth = cats({1, 2, 2, 9});
  const MetricsReport r = evaluate_categories(pred, truth);
  EXPECT_EQ(r.accuracy, 0.75);
  EXPECT_EQ(r.n, 4u);
  const nlohmann::json j = metrics_to_json(r);
  EXPECT_EQ(j["accuracy_mode"], "fixed");
  ASSERT_EQ(j["per_category"].size(), 18u);
  EXPECT_EQ(j["per_category"][2]["size"], 2);
  EXPECT_EQ(j["per_category"][2]["accuracy"], 0.5);
  EXPECT_TRUE(j["per_category"][0]["accuracy"].is_null());
  EXPECT_GT(j["nmi"].get<double>(), 0.0);
}

}  // namespace
}  // namespace patchtriage
