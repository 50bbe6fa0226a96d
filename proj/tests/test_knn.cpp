#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "kdml/errors.hpp"
#include "kdml/knn.hpp"
#include "oracles.hpp"

namespace kdml {
namespace {

TEST(KnnVote, TieRules) {
  // Equal distances: the first k indices win.
  const std::vector<double> flat(4, 1.0);
  EXPECT_EQ(knn_vote(flat, std::vector<int>{2, 1, 1, 2}, 1), 2);
  // Vote tie between classes 2 and 1 goes to class 1.
  EXPECT_EQ(knn_vote(std::vector<double>{0.1, 0.2, 0.3}, std::vector<int>{2, 1, 2}, 2), 1);
  // k = n on a balanced two-class set.
  EXPECT_EQ(knn_vote(std::vector<double>{3, 1, 4, 1, 5, 9}, std::vector<int>{2, 2, 2, 1, 1, 1}, 6), 1);
}

TEST(KnnVote, RejectsBadK) {
  const std::vector<double> d{1, 2};
  const std::vector<int> l{1, 2};
  EXPECT_THROW(knn_vote(d, l, 0), ConfigError);
  EXPECT_THROW(knn_vote(d, l, 3), ConfigError);
  EXPECT_THROW(knn_vote(d, std::vector<int>{1}, 1), ConfigError);
}

TEST(KnnVote, MatchesBruteForceWithManyTies) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> coarse(0, 3);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 50;
    std::vector<double> dist(static_cast<std::size_t>(n));
    for (auto& d : dist) d = coarse(rng);
    const auto labels = oracle::random_labels(rng, n, 1 + trial % 4);
    const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
    EXPECT_EQ(knn_vote(dist, labels, k), oracle::brute_force_knn(dist, labels, k)) << "trial " << trial;
  }
}

TEST(KnnIndex, SelfNearestAndDimensionCheck) {
  std::mt19937_64 rng(2);
  const RowMatrix x = oracle::random_points(rng, 20, 3);
  const auto labels = oracle::random_labels(rng, 20, 3);
  const KnnIndex index(x, labels);
  EXPECT_EQ(index.predict_all(x, 1), labels);
  EXPECT_THROW(index.predict(row_view(oracle::random_points(rng, 1, 2), 0), 1), DataError);
  EXPECT_THROW(KnnIndex(x, {1, 2}), DataError);
}

TEST(KnnPredict, EuclideanMatchesBruteForceOnIntegerGrid) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> cell(-2, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 49;
    Dataset train;
    train.features.resize(n, 2);
    for (int i = 0; i < n; ++i) train.features.row(i) << cell(rng), cell(rng);
    train.labels = oracle::random_labels(rng, n, 3);
    train.class_names = {"a", "b", "c"};
    RowMatrix q(1, 2);
    q << cell(rng), cell(rng);
    std::vector<double> dist;
    for (int i = 0; i < n; ++i) dist.push_back((train.features.row(i) - q.row(0)).norm());
    const int k = 1 + trial % n;
    EXPECT_EQ(knn::knn_predict_euclidean(train, row_view(q, 0), k), oracle::brute_force_knn(dist, train.labels, k));
  }
}

TEST(KnnPredict, LearnedMetricsMatchBruteForce) {
  const Dataset blobs = data::standardize(fixture::blobs(30, 4, 1.5));
  const TrainingData t = data::make_training_data(blobs, data::make_prototypes(2, 2));
  FixedConfig fc;
  fc.lambda = 1.0;
  fc.rho = 0.5;
  const FixedModel fixed_model = fixed::fit(t, MatrixKernelSpec::diagonal_bank(2, 1.0), fc);
  ParamConfig pc;
  pc.lambda = 1.0;
  const ParamModel param_model = param::fit(t, ScalarKernelSpec::gaussian(1.0), pc);

  std::mt19937_64 rng(5);
  const RowMatrix queries = oracle::random_points(rng, 40, 2, 1.5);
  for (Eigen::Index qi = 0; qi < queries.rows(); ++qi) {
    const auto q = row_view(queries, qi);
    std::vector<double> df, dp;
    for (Eigen::Index i = 0; i < blobs.size(); ++i) {
      df.push_back(fixed::distance(fixed_model, q, row_view(blobs.features, i)));
      dp.push_back(param::distance(param_model, q, row_view(blobs.features, i)));
    }
    for (int k : {1, 3, 7, 30}) {
      EXPECT_EQ(knn::knn_predict(fixed_model, blobs, q, k), oracle::brute_force_knn(df, blobs.labels, k));
      EXPECT_EQ(knn::knn_predict(param_model, blobs, q, k), oracle::brute_force_knn(dp, blobs.labels, k));
    }
  }
}

TEST(KnnPredict, TrainingPointUnderLearnedMetricGetsItsLabel) {
  const Dataset blobs = data::standardize(fixture::blobs(20, 6));
  const TrainingData t = data::make_training_data(blobs, data::make_prototypes(2, 2));
  const ParamModel model = param::fit(t, ScalarKernelSpec::gaussian(1.0), ParamConfig{});
  for (Eigen::Index i = 0; i < blobs.size(); ++i) {
    EXPECT_EQ(knn::knn_predict(model, blobs, row_view(blobs.features, i), 1), blobs.labels[i]);
  }
}

}  // namespace
}  // namespace kdml
