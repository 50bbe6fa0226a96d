#pragma once

#include <random>

#include "kdml/data.hpp"
#include "oracles.hpp"

namespace kdml::fixture {

// Random labelled inputs with one-hot (or heuristic) prototype targets.
inline TrainingData random_training(std::mt19937_64& rng, Eigen::Index n, int m, int classes, Eigen::Index d = 2) {
  TrainingData t;
  t.inputs = oracle::random_points(rng, n, d);
  std::vector<int> labels = oracle::random_labels(rng, n, classes);
  t.similarity = data::similarity(labels);
  t.targets = data::make_prototypes(classes, m).targets_for(labels);
  return t;
}

// Two Gaussian blobs in the plane, alternating labels.
inline Dataset blobs(Eigen::Index n, std::uint64_t seed, double separation = 3.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset d;
  d.features.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int label = 1 + static_cast<int>(i % 2);
    d.features(i, 0) = normal(rng) + (label == 2 ? separation : 0.0);
    d.features(i, 1) = normal(rng);
    d.labels.push_back(label);
  }
  d.class_names = {"a", "b"};
  d.feature_names = {"x1", "x2"};
  d.label_column = "label";
  return d;
}

}  // namespace kdml::fixture
