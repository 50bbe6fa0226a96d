#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kdml/data.hpp"
#include "kdml/dml_fixed.hpp"
#include "kdml/dml_param.hpp"
#include "kdml/knn.hpp"

namespace kdml {

enum class Method { fixed, param, baseline };

std::string method_name(Method method);
Method parse_method(const std::string& name);

struct HyperParams {
  double gamma = 1.0;
  double lambda = 1.0;
  double rho = 0.0;
  int dim = 2;
  double sigma = 1.0;
  double sigma_ladder = 1.2;
  int k = 1;

  FixedConfig fixed_config() const;
  ParamConfig param_config() const;
  std::string describe() const;
};

// Cartesian product over per-parameter value lists.
struct HyperGrid {
  std::vector<double> gamma{1.0};
  std::vector<double> lambda{1.0};
  std::vector<double> rho{0.0};
  std::vector<int> dim{2};
  std::vector<double> sigma{1.0};
  std::vector<int> k{1};
  double sigma_ladder = 1.2;

  // Row-major enumeration: gamma outermost, k innermost.
  std::vector<HyperParams> points() const;
};

struct EvalReport {
  std::vector<double> per_run_accuracy;
  double mean = 0.0;
  double ci95_halfwidth = 0.0;
  HyperParams chosen;
  std::vector<double> grid_scores;  // mean CV accuracy per grid point, -1 when its fit failed
  std::string notes;

  // mean and 1.96 * sample standard error of per_run_accuracy
  void summarize();
};

/// A model trained on raw (unstandardized) features: standardization stats,
/// the fitted model (if any) and a k-NN index over training metric coords.
class TrainedClassifier {
 public:
  static TrainedClassifier train(Method method, const Dataset& raw_train, const HyperParams& params);

  RowMatrix metric_coords(const RowMatrix& raw_features) const;
  std::vector<int> predict(const RowMatrix& raw_features) const;
  double accuracy(const Dataset& raw_test) const;

  Method method() const { return method_; }
  const Standardization& standardization() const { return standardization_; }
  const std::variant<std::monostate, FixedModel, ParamModel>& model() const { return model_; }

 private:
  Method method_ = Method::baseline;
  HyperParams params_;
  Standardization standardization_;
  std::variant<std::monostate, FixedModel, ParamModel> model_;
  std::optional<KnnIndex> index_;
};

/// Stratified k-fold selection: the grid point with the highest mean
/// validation accuracy wins, ties to the earlier point. per_run_accuracy holds
/// the winner's per-fold accuracies.
EvalReport cross_validate(const Dataset& raw, Method method, const HyperGrid& grid, int folds, std::uint64_t seed);

// `runs` seeded stratified splits; fit on the training part, score the rest.
EvalReport repeated_eval(const Dataset& raw, Method method, const HyperParams& params, int runs,
                         double train_fraction, std::uint64_t seed);

/// Hyperparameters are chosen once by cross-validation on the training part
/// of the first run's split, then reused for all `runs` splits.
EvalReport grid_eval(const Dataset& raw, Method method, const HyperGrid& grid, int runs, double train_fraction,
                     int folds, std::uint64_t seed);

std::uint64_t run_seed(std::uint64_t seed, int run);

}  // namespace kdml
