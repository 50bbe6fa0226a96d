#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kdml/numerics.hpp"
#include "kdml/training_data.hpp"

namespace kdml {

struct Standardization {
  Vector mean;
  Vector stddev;  // 0 marks a constant feature, mapped to 0

  RowMatrix apply(const RowMatrix& features) const;
};

struct Dataset {
  RowMatrix features;                   // n x d
  std::vector<int> labels;              // 1..c
  std::vector<std::string> class_names; // class_names[k - 1] names label k
  std::vector<std::string> feature_names;
  std::string label_column;
  Standardization standardization;      // empty until standardize()

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  int classes() const { return static_cast<int>(class_names.size()); }

  // Rows in `indices`, in that order; keeps class naming and standardization.
  Dataset subset(const std::vector<std::size_t>& indices) const;
  void validate() const;
};

struct TargetSpec {
  std::vector<Vector> prototypes;  // one per class, in R^m
  int dim = 0;

  // m x n matrix whose column i is the prototype of labels[i].
  Matrix targets_for(const std::vector<int>& labels) const;
};

namespace data {

/// Reads a comma-separated file with a header row. `label_column` names the
/// label column (or gives its zero-based index when no header matches).
/// Labels are re-indexed 1..c in order of first appearance.
Dataset load_csv(const std::string& path, const std::string& label_column);
Dataset parse_csv(const std::string& text, const std::string& label_column);

// Z-scores every feature with statistics from `dataset` itself.
Dataset standardize(const Dataset& dataset);
Standardization fit_standardization(const RowMatrix& features);

/// Class prototypes in R^m. For m >= c the one-hot vectors e_1..e_c; for
/// m < c the normalized rows of an orthonormalized, column-centred c x m
/// matrix drawn from a generator seeded with `seed`. m = 1 allows at most two classes.
TargetSpec make_prototypes(int classes, int m, std::uint64_t seed = 1);

// s_ij = [label_i == label_j]
Matrix similarity(const std::vector<int>& labels);

TrainingData make_training_data(const Dataset& dataset, const TargetSpec& targets);

// Seeded stratified split; every class keeps round(fraction * count) samples
// in the training part, clamped to [1, count - 1] when count >= 2.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
Split stratified_split(const std::vector<int>& labels, double train_fraction, std::uint64_t seed);

// Seeded stratified assignment of samples to `folds` folds. Throws DataError
// when a class has fewer samples than folds.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, int folds,
                                                       std::uint64_t seed);

/// Two concentric noisy rings in the plane: class 1 at radius `inner`, class 2
/// at radius `outer`, radial noise with standard deviation `noise`, and
/// `nuisance` extra pure-noise features.
Dataset make_circles(int n, std::uint64_t seed, double inner = 1.0, double outer = 2.0, double noise = 0.15,
                     int nuisance = 2);

void write_csv(const Dataset& dataset, const std::string& path);

}  // namespace data
}  // namespace kdml
