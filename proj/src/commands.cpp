#include "kdml/commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "kdml/data.hpp"
#include "kdml/errors.hpp"
#include "kdml/knn.hpp"
#include "kdml/model_file.hpp"
#include "kdml/svg.hpp"

namespace kdml::cli {
namespace {

std::string num(double v) { return numerics::format_double(v); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Loads `path` against the class naming and feature layout of `model`.
Dataset load_for_model(const ModelFile& model, const std::string& path) {
  Dataset raw = data::load_csv(path, model.label_column);
  if (raw.dim() != model.feature_dim()) {
    throw DataError("data has " + std::to_string(raw.dim()) + " features but the model expects " +
                    std::to_string(model.feature_dim()));
  }
  std::vector<int> remapped;
  remapped.reserve(raw.labels.size());
  for (int label : raw.labels) {
    const std::string& name = raw.class_names[static_cast<std::size_t>(label - 1)];
    const auto it = std::find(model.class_names.begin(), model.class_names.end(), name);
    if (it == model.class_names.end()) throw DataError("label '" + name + "' is not a class known to the model");
    remapped.push_back(static_cast<int>(it - model.class_names.begin()) + 1);
  }
  raw.labels = std::move(remapped);
  raw.class_names = model.class_names;
  raw.features = model.standardization.apply(raw.features);
  raw.standardization = model.standardization;
  return raw;
}

struct TrainArgs {
  std::string method;
  std::string data;
  std::string label;
  std::string out;
  HyperParams params;
  std::uint64_t seed = 1;
  int max_iters = 0;
};

struct EvalArgs {
  std::string model;
  std::string data;
  int k = 1;
  bool baseline = false;
};

struct EmbedArgs {
  std::string model;
  std::string data;
  std::string out;
  std::string svg;
};

struct CirclesArgs {
  int n = 100;
  std::uint64_t seed = 1;
  double noise = 0.15;
  int nuisance = 2;
  std::string out;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const Method method = parse_method(a.method);
  if (method == Method::baseline) throw ConfigError("--method must be fixed or param");
  HyperParams params = a.params;
  if (method == Method::fixed) {
    params.fixed_config().validate();
  } else {
    params.param_config().validate();
  }
  if (params.dim < 1) throw ConfigError("--dim must be >= 1");
  ScalarKernelSpec::gaussian(params.sigma);

  const Dataset raw = data::load_csv(a.data, a.label);
  raw.validate();
  ModelFile file;
  if (a.max_iters > 0) {
    // Same path as train_model_file with a custom iteration cap.
    const Dataset train = data::standardize(raw);
    const TrainingData td =
        data::make_training_data(train, data::make_prototypes(train.classes(), params.dim, a.seed));
    file.method = method;
    file.params = params;
    file.seed = a.seed;
    file.label_column = raw.label_column;
    file.feature_names = raw.feature_names;
    file.class_names = raw.class_names;
    file.standardization = train.standardization;
    file.train_labels = train.labels;
    if (method == Method::fixed) {
      FixedConfig config = params.fixed_config();
      config.max_outer_iters = a.max_iters;
      file.model = fixed::fit(td, MatrixKernelSpec::diagonal_bank(params.dim, params.sigma, params.sigma_ladder), config);
    } else {
      ParamConfig config = params.param_config();
      config.max_outer_iters = a.max_iters;
      file.model = param::fit(td, ScalarKernelSpec::gaussian(params.sigma), config);
    }
  } else {
    file = train_model_file(method, raw, params, a.seed);
  }
  file.save(a.out);

  std::visit(
      [&](const auto& m) {
        out << "trained " << method_name(method) << " model on " << raw.size() << " samples, " << raw.classes()
            << " classes, output dimension " << params.dim << "\n";
        out << "objective=" << num(m.objective_trace.back()) << " iterations=" << m.outer_iterations
            << " converged=" << (m.converged ? "true" : "false") << "\n";
      },
      file.model);
  out << "model written to " << a.out << "\n";
  return kOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const ModelFile model = ModelFile::load(a.model);
  const Dataset test = load_for_model(model, a.data);
  const RowMatrix& train = model.train_inputs();
  if (a.k < 1 || a.k > train.rows()) {
    throw ConfigError("--k must lie in 1.." + std::to_string(train.rows()));
  }

  std::vector<int> predicted;
  if (a.baseline) {
    predicted = KnnIndex(train, model.train_labels).predict_all(test.features, a.k);
  } else {
    predicted = KnnIndex(model.metric_coords(train), model.train_labels).predict_all(model.metric_coords(test.features), a.k);
  }

  const int classes = static_cast<int>(model.class_names.size());
  std::vector<int> hits(static_cast<std::size_t>(classes), 0);
  std::vector<int> totals(static_cast<std::size_t>(classes), 0);
  int correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const auto c = static_cast<std::size_t>(test.labels[i] - 1);
    ++totals[c];
    if (predicted[i] == test.labels[i]) {
      ++hits[c];
      ++correct;
    }
  }
  const double accuracy = static_cast<double>(correct) / static_cast<double>(predicted.size());
  out << (a.baseline ? "Euclidean k-NN baseline" : "learned-metric k-NN (" + method_name(model.method) + " model)")
      << ", k=" << a.k << ", " << predicted.size() << " samples\n";
  for (int c = 0; c < classes; ++c) {
    const auto idx = static_cast<std::size_t>(c);
    if (totals[idx] == 0) continue;
    out << "  class " << model.class_names[idx] << ": " << hits[idx] << "/" << totals[idx] << " correct ("
        << num(static_cast<double>(hits[idx]) / totals[idx]) << ")\n";
  }
  out << "accuracy=" << num(accuracy) << "\n";
  return kOk;
}

int cmd_grid(const std::string& config_path, std::ostream& out) {
  std::string text;
  try {
    text = read_file(config_path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  const GridConfig config = parse_grid_config(text);
  const Dataset raw = data::load_csv(config.data, config.label);
  const EvalReport report =
      grid_eval(raw, config.method, config.grid, config.runs, config.train_fraction, config.folds, config.seed);
  out << format_report(report, config.method);
  return kOk;
}

int cmd_embed(const EmbedArgs& a, std::ostream& out) {
  const ModelFile model = ModelFile::load(a.model);
  if (!a.svg.empty() && model.output_dim() != 2) {
    throw ConfigError("--svg needs a model with output dimension 2 (this one has " +
                      std::to_string(model.output_dim()) + ")");
  }
  const Dataset points = load_for_model(model, a.data);
  const RowMatrix mapped = model.map_points(points.features);

  std::ofstream csv(a.out);
  if (!csv) throw DataError("cannot write '" + a.out + "'");
  csv << "index";
  for (int j = 0; j < model.output_dim(); ++j) csv << ",y" << (j + 1);
  csv << ",label\n";
  for (Eigen::Index i = 0; i < mapped.rows(); ++i) {
    csv << i;
    for (Eigen::Index j = 0; j < mapped.cols(); ++j) csv << ',' << num(mapped(i, j));
    csv << ',' << model.class_names[static_cast<std::size_t>(points.labels[static_cast<std::size_t>(i)] - 1)] << '\n';
  }
  out << "wrote " << mapped.rows() << " embedded points to " << a.out << "\n";

  if (!a.svg.empty()) {
    svg::ScatterOptions options;
    options.title = "embedding (" + method_name(model.method) + " model)";
    std::ofstream file(a.svg);
    if (!file) throw DataError("cannot write '" + a.svg + "'");
    file << svg::scatter(mapped, points.labels, model.class_names, options);
    out << "wrote scatter plot to " << a.svg << "\n";
  }
  return kOk;
}

int cmd_circles(const CirclesArgs& a, std::ostream& out) {
  const Dataset d = data::make_circles(a.n, a.seed, 1.0, 2.0, a.noise, a.nuisance);
  data::write_csv(d, a.out);
  out << "wrote " << a.n << " points to " << a.out << "\n";
  return kOk;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw ConfigError("empty entry in list '" + value + "'");
    out.push_back(item.substr(first, last - first + 1));
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + s + "' is not a number");
  }
}

long long to_int(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + s + "' is not an integer");
  }
}

}  // namespace

GridConfig parse_grid_config(const std::string& text) {
  std::map<std::string, std::string> values;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + " has no '='");
    auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = strip(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '-', '_');
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError("config line " + std::to_string(line_no) + " is incomplete");
    if (!values.emplace(key, value).second) throw ConfigError("config key '" + key + "' given twice");
  }

  GridConfig config;
  for (const char* required : {"data", "label", "method", "runs"}) {
    if (!values.count(required)) throw ConfigError(std::string("config is missing required key '") + required + "'");
  }
  auto doubles = [&](const std::string& key, std::vector<double>& dst) {
    if (const auto it = values.find(key); it != values.end()) {
      dst.clear();
      for (const auto& s : split_list(it->second)) dst.push_back(to_double(key, s));
    }
  };
  auto ints = [&](const std::string& key, std::vector<int>& dst) {
    if (const auto it = values.find(key); it != values.end()) {
      dst.clear();
      for (const auto& s : split_list(it->second)) dst.push_back(static_cast<int>(to_int(key, s)));
    }
  };
  for (const auto& [key, value] : values) {
    static const char* known[] = {"data",   "label", "method", "runs", "train_fraction", "folds", "seed",
                                  "gamma",  "lambda", "rho",   "dim",  "sigma",          "k",     "sigma_ladder"};
    if (std::none_of(std::begin(known), std::end(known), [&](const char* k) { return key == k; })) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  config.data = values["data"];
  config.label = values["label"];
  config.method = parse_method(values["method"]);
  config.runs = static_cast<int>(to_int("runs", values["runs"]));
  if (config.runs < 1) throw ConfigError("runs must be >= 1");
  if (values.count("train_fraction")) config.train_fraction = to_double("train_fraction", values["train_fraction"]);
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
  if (values.count("folds")) config.folds = static_cast<int>(to_int("folds", values["folds"]));
  if (config.folds < 2) throw ConfigError("folds must be >= 2");
  if (values.count("seed")) {
    const long long seed = to_int("seed", values["seed"]);
    if (seed < 0) throw ConfigError("seed must be >= 0");
    config.seed = static_cast<std::uint64_t>(seed);
  }
  doubles("gamma", config.grid.gamma);
  doubles("lambda", config.grid.lambda);
  doubles("rho", config.grid.rho);
  doubles("sigma", config.grid.sigma);
  ints("dim", config.grid.dim);
  ints("k", config.grid.k);
  if (values.count("sigma_ladder")) config.grid.sigma_ladder = to_double("sigma_ladder", values["sigma_ladder"]);
  return config;
}

std::string format_report(const EvalReport& report, Method method) {
  std::ostringstream out;
  out << "method=" << method_name(method) << "\n";
  out << "chosen: " << report.chosen.describe() << "\n";
  for (std::size_t i = 0; i < report.grid_scores.size(); ++i) {
    out << "cv_score[" << i << "]=" << num(report.grid_scores[i]) << "\n";
  }
  for (std::size_t r = 0; r < report.per_run_accuracy.size(); ++r) {
    out << "run " << (r + 1) << " accuracy=" << num(report.per_run_accuracy[r]) << "\n";
  }
  out << "accuracy: " << num(report.mean) << " +/- " << num(report.ci95_halfwidth) << " (95% CI over "
      << report.per_run_accuracy.size() << " runs)\n";
  if (!report.notes.empty()) out << "note: " << report.notes << "\n";
  out << "mean=" << num(report.mean) << "\n";
  out << "halfwidth=" << num(report.ci95_halfwidth) << "\n";
  return out.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel distance metric learning: train, evaluate, grid-search and embed"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Fit a model on a CSV file and write a model file");
  train_cmd->add_option("--method", train.method, "fixed | param")->required();
  train_cmd->add_option("--data", train.data, "CSV with a header row")->required();
  train_cmd->add_option("--label", train.label, "label column name")->required();
  train_cmd->add_option("--gamma", train.params.gamma, "collocation weight")->required();
  train_cmd->add_option("--lambda", train.params.lambda, "regression weight (> 0)")->required();
  train_cmd->add_option("--rho", train.params.rho, "metric regularization")->required();
  train_cmd->add_option("--dim", train.params.dim, "output dimension m")->required();
  train_cmd->add_option("--sigma", train.params.sigma, "Gaussian spread")->required();
  train_cmd->add_option("--sigma-ladder", train.params.sigma_ladder, "spread ratio between bank kernels (fixed)");
  train_cmd->add_option("--out", train.out, "model file to write")->required();
  train_cmd->add_option("--seed", train.seed, "seed for prototype construction");
  train_cmd->add_option("--max-iters", train.max_iters, "cap on outer iterations");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "k-NN accuracy of a trained model on a CSV file");
  eval_cmd->add_option("--model", eval.model)->required();
  eval_cmd->add_option("--data", eval.data)->required();
  eval_cmd->add_option("--k", eval.k, "neighbours")->required();
  eval_cmd->add_flag("--baseline", eval.baseline, "Euclidean k-NN on standardized features instead");

  std::string grid_config;
  auto* grid_cmd = app.add_subcommand("grid", "Cross-validated hyperparameters, repeated evaluation");
  grid_cmd->add_option("--config", grid_config, "key=value config file")->required();

  EmbedArgs embed;
  auto* embed_cmd = app.add_subcommand("embed", "Map points into the output space (CSV, optional SVG)");
  embed_cmd->add_option("--model", embed.model)->required();
  embed_cmd->add_option("--data", embed.data)->required();
  embed_cmd->add_option("--out", embed.out, "CSV to write")->required();
  embed_cmd->add_option("--svg", embed.svg, "SVG scatter plot (output dimension 2 only)");

  CirclesArgs circles;
  auto* circles_cmd = app.add_subcommand("gen-circles", "Write a two-ring toy dataset");
  circles_cmd->add_option("--n", circles.n);
  circles_cmd->add_option("--seed", circles.seed);
  circles_cmd->add_option("--noise", circles.noise);
  circles_cmd->add_option("--nuisance", circles.nuisance, "extra pure-noise features");
  circles_cmd->add_option("--out", circles.out)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train, out);
    if (*eval_cmd) return cmd_eval(eval, out);
    if (*grid_cmd) return cmd_grid(grid_config, out);
    if (*embed_cmd) return cmd_embed(embed, out);
    if (*circles_cmd) return cmd_circles(circles, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

}  // namespace kdml::cli
