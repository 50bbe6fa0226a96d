#pragma once

#include "kdml/numerics.hpp"

namespace kdml {

// Everything a model fit consumes: inputs x_i (rows), targets y_i (columns of
// an m x n matrix) and the pairwise similarity matrix S.
struct TrainingData {
  RowMatrix inputs;
  Matrix targets;
  Matrix similarity;

  Eigen::Index samples() const { return inputs.rows(); }
  int output_dim() const { return static_cast<int>(targets.rows()); }
  void validate() const;
};

}  // namespace kdml
