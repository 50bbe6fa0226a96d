#pragma once

#include <span>
#include <vector>

#include "kdml/data.hpp"
#include "kdml/dml_fixed.hpp"
#include "kdml/dml_param.hpp"

namespace kdml {

/// Majority vote among the k smallest distances. Distance ties go to the
/// smaller training index, vote ties to the smaller class label.
int knn_vote(std::span<const double> distances, std::span<const int> labels, int k);

// Brute-force k-NN over points already mapped into a space where the learned
// metric is Euclidean (identity for the baseline).
class KnnIndex {
 public:
  KnnIndex(RowMatrix coords, std::vector<int> labels);

  int predict(FeatureView query, int k) const;
  std::vector<int> predict_all(const RowMatrix& queries, int k) const;

  Eigen::Index size() const { return coords_.rows(); }
  Eigen::Index dim() const { return coords_.cols(); }

 private:
  RowMatrix coords_;
  std::vector<int> labels_;
};

namespace knn {

// Rows mapped into the model's metric space.
RowMatrix metric_coords(const FixedModel& model, const RowMatrix& x);
RowMatrix metric_coords(const ParamModel& model, const RowMatrix& x);

// k-NN label of `query` among `train` under the model's learned distance.
int knn_predict(const FixedModel& model, const Dataset& train, FeatureView query, int k);
int knn_predict(const ParamModel& model, const Dataset& train, FeatureView query, int k);
// Euclidean baseline on the features as given.
int knn_predict_euclidean(const Dataset& train, FeatureView query, int k);

}  // namespace knn
}  // namespace kdml
