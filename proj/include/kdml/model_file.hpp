#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "kdml/data.hpp"
#include "kdml/dml_fixed.hpp"
#include "kdml/dml_param.hpp"
#include "kdml/evaluation.hpp"

namespace kdml {

// Everything needed to apply a trained model to new raw data. Persisted as
// indented JSON; learned numbers are written with round-trip precision.
struct ModelFile {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  Method method = Method::fixed;
  HyperParams params;
  std::uint64_t seed = 1;
  std::string label_column;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  Standardization standardization;
  std::vector<int> train_labels;
  std::variant<FixedModel, ParamModel> model;

  int output_dim() const;
  Eigen::Index feature_dim() const { return standardization.mean.size(); }
  const RowMatrix& train_inputs() const;  // standardized

  // f(x) for standardized rows.
  RowMatrix map_points(const RowMatrix& standardized) const;
  // Coordinates in which the learned distance is Euclidean.
  RowMatrix metric_coords(const RowMatrix& standardized) const;
  double distance(FeatureView x, FeatureView y) const;

  std::string to_json() const;
  // The "parameters" section alone (learned c/L or C/B), as written in to_json().
  std::string parameters_json() const;
  static ModelFile from_json(const std::string& text);

  void save(const std::string& path) const;
  static ModelFile load(const std::string& path);
};

// Fits `method` (fixed or param) on a raw dataset: standardizes it, builds
// prototype targets from `seed`, and packages the result.
ModelFile train_model_file(Method method, const Dataset& raw, const HyperParams& params, std::uint64_t seed);

}  // namespace kdml
