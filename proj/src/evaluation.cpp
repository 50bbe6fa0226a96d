#include "kdml/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "kdml/errors.hpp"

namespace kdml {

std::string method_name(Method method) {
  switch (method) {
    case Method::fixed:
      return "fixed";
    case Method::param:
      return "param";
    case Method::baseline:
      return "baseline";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "fixed") return Method::fixed;
  if (name == "param") return Method::param;
  if (name == "baseline") return Method::baseline;
  throw ConfigError("unknown method '" + name + "' (expected fixed, param or baseline)");
}

FixedConfig HyperParams::fixed_config() const {
  FixedConfig c;
  c.gamma = gamma;
  c.lambda = lambda;
  c.rho = rho;
  return c;
}

ParamConfig HyperParams::param_config() const {
  ParamConfig c;
  c.gamma = gamma;
  c.lambda = lambda;
  c.rho = rho;
  return c;
}

std::string HyperParams::describe() const {
  using numerics::format_double;
  std::ostringstream out;
  out << "gamma=" << format_double(gamma) << " lambda=" << format_double(lambda) << " rho=" << format_double(rho)
      << " dim=" << dim << " sigma=" << format_double(sigma) << " sigma_ladder=" << format_double(sigma_ladder)
      << " k=" << k;
  return out.str();
}

std::vector<HyperParams> HyperGrid::points() const {
  std::vector<HyperParams> out;
  for (double g : gamma)
    for (double l : lambda)
      for (double r : rho)
        for (int m : dim)
          for (double s : sigma)
            for (int kk : k) out.push_back({g, l, r, m, s, sigma_ladder, kk});
  if (out.empty()) throw ConfigError("hyperparameter grid is empty");
  return out;
}

void EvalReport::summarize() {
  const auto runs = per_run_accuracy.size();
  if (runs == 0) {
    mean = 0.0;
    ci95_halfwidth = 0.0;
    return;
  }
  double sum = 0.0;
  for (double a : per_run_accuracy) sum += a;
  mean = sum / static_cast<double>(runs);
  if (runs < 2) {
    ci95_halfwidth = 0.0;
    return;
  }
  double ss = 0.0;
  for (double a : per_run_accuracy) ss += (a - mean) * (a - mean);
  const double sd = std::sqrt(ss / static_cast<double>(runs - 1));
  ci95_halfwidth = 1.96 * sd / std::sqrt(static_cast<double>(runs));
}

TrainedClassifier TrainedClassifier::train(Method method, const Dataset& raw_train, const HyperParams& params) {
  raw_train.validate();
  TrainedClassifier out;
  out.method_ = method;
  out.params_ = params;
  const Dataset train = data::standardize(raw_train);
  out.standardization_ = train.standardization;
  RowMatrix coords;
  switch (method) {
    case Method::baseline:
      coords = train.features;
      break;
    case Method::fixed: {
      const TargetSpec targets = data::make_prototypes(train.classes(), params.dim);
      const auto kernel = MatrixKernelSpec::diagonal_bank(params.dim, params.sigma, params.sigma_ladder);
      FixedModel model = fixed::fit(data::make_training_data(train, targets), kernel, params.fixed_config());
      coords = knn::metric_coords(model, train.features);
      out.model_ = std::move(model);
      break;
    }
    case Method::param: {
      const TargetSpec targets = data::make_prototypes(train.classes(), params.dim);
      ParamModel model = param::fit(data::make_training_data(train, targets), ScalarKernelSpec::gaussian(params.sigma),
                                    params.param_config());
      coords = knn::metric_coords(model, train.features);
      out.model_ = std::move(model);
      break;
    }
  }
  if (params.k < 1 || params.k > train.size()) {
    throw ConfigError("k = " + std::to_string(params.k) + " outside 1.." + std::to_string(train.size()));
  }
  out.index_.emplace(std::move(coords), train.labels);
  return out;
}

RowMatrix TrainedClassifier::metric_coords(const RowMatrix& raw_features) const {
  const RowMatrix x = standardization_.apply(raw_features);
  if (const auto* m = std::get_if<FixedModel>(&model_)) return knn::metric_coords(*m, x);
  if (const auto* m = std::get_if<ParamModel>(&model_)) return knn::metric_coords(*m, x);
  return x;
}

std::vector<int> TrainedClassifier::predict(const RowMatrix& raw_features) const {
  return index_->predict_all(metric_coords(raw_features), params_.k);
}

double TrainedClassifier::accuracy(const Dataset& raw_test) const {
  if (raw_test.size() == 0) throw DataError("empty evaluation set");
  const auto predicted = predict(raw_test.features);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == raw_test.labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

namespace {

// Runs body(i) for i in [0, count) on up to hardware_concurrency threads.
// Each index writes only its own slot, so results are order-independent.
template <typename Body>
void parallel_for(std::size_t count, Body body) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

std::uint64_t run_seed(std::uint64_t seed, int run) {
  return seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(run) + 1;
}

EvalReport cross_validate(const Dataset& raw, Method method, const HyperGrid& grid, int folds, std::uint64_t seed) {
  raw.validate();
  const auto points = grid.points();
  const auto fold_sets = data::stratified_folds(raw.labels, folds, seed);

  std::vector<Dataset> train_parts;
  std::vector<Dataset> valid_parts;
  for (std::size_t f = 0; f < fold_sets.size(); ++f) {
    std::vector<std::size_t> train_idx;
    for (std::size_t g = 0; g < fold_sets.size(); ++g) {
      if (g != f) train_idx.insert(train_idx.end(), fold_sets[g].begin(), fold_sets[g].end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    train_parts.push_back(raw.subset(train_idx));
    valid_parts.push_back(raw.subset(fold_sets[f]));
  }

  std::vector<std::vector<double>> fold_scores(points.size());
  parallel_for(points.size(), [&](std::size_t p) {
    std::vector<double> scores;
    try {
      for (std::size_t f = 0; f < train_parts.size(); ++f) {
        scores.push_back(TrainedClassifier::train(method, train_parts[f], points[p]).accuracy(valid_parts[f]));
      }
    } catch (const NumericalError&) {
      scores.clear();
    } catch (const ConfigError&) {
      scores.clear();
    }
    fold_scores[p] = std::move(scores);
  });

  EvalReport report;
  std::size_t best = points.size();
  double best_score = -1.0;
  for (std::size_t p = 0; p < points.size(); ++p) {
    double score = -1.0;
    if (!fold_scores[p].empty()) {
      double sum = 0.0;
      for (double s : fold_scores[p]) sum += s;
      score = sum / static_cast<double>(fold_scores[p].size());
    }
    report.grid_scores.push_back(score);
    if (score > best_score) {
      best_score = score;
      best = p;
    }
  }
  if (best == points.size()) throw NumericalError("cross-validation: every grid point failed to fit");
  report.chosen = points[best];
  report.per_run_accuracy = fold_scores[best];
  report.summarize();
  return report;
}

EvalReport repeated_eval(const Dataset& raw, Method method, const HyperParams& params, int runs,
                         double train_fraction, std::uint64_t seed) {
  raw.validate();
  if (runs < 1) throw ConfigError("runs must be >= 1");
  EvalReport report;
  report.chosen = params;
  report.per_run_accuracy.assign(static_cast<std::size_t>(runs), 0.0);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(runs));
  parallel_for(static_cast<std::size_t>(runs), [&](std::size_t r) {
    try {
      const auto split = data::stratified_split(raw.labels, train_fraction, run_seed(seed, static_cast<int>(r)));
      const Dataset train = raw.subset(split.train);
      if (split.test.empty()) throw DataError("split left no test samples");
      report.per_run_accuracy[r] =
          TrainedClassifier::train(method, train, params).accuracy(raw.subset(split.test));
    } catch (...) {
      errors[r] = std::current_exception();
    }
  });
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  report.summarize();
  return report;
}

EvalReport grid_eval(const Dataset& raw, Method method, const HyperGrid& grid, int runs, double train_fraction,
                     int folds, std::uint64_t seed) {
  raw.validate();
  const auto first = data::stratified_split(raw.labels, train_fraction, run_seed(seed, 0));
  const EvalReport cv = cross_validate(raw.subset(first.train), method, grid, folds, seed);
  EvalReport report = repeated_eval(raw, method, cv.chosen, runs, train_fraction, seed);
  report.grid_scores = cv.grid_scores;
  report.notes = "hyperparameters selected once by " + std::to_string(folds) +
                 "-fold cross-validation on the first run's training split";
  return report;
}

}  // namespace kdml
