#include "kdml/model_file.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kdml/errors.hpp"
#include "kdml/knn.hpp"

namespace kdml {
namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Matrix matrix_from_json(const json& rows, Eigen::Index cols_if_empty = 0) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : cols_if_empty;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != c) throw DataError("model file: ragged matrix");
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

Vector vector_from_json(const json& values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = values[i].get<double>();
  return v;
}

json parameters_section(const ModelFile& file) {
  if (const auto* m = std::get_if<FixedModel>(&file.model)) {
    return {{"c", vector_to_json(m->c)}, {"L", matrix_to_json(m->L)}};
  }
  const auto& m = std::get<ParamModel>(file.model);
  return {{"C", matrix_to_json(m.C)}, {"B", matrix_to_json(m.B)}};
}

}  // namespace

int ModelFile::output_dim() const {
  return std::visit([](const auto& m) { return m.output_dim(); }, model);
}

const RowMatrix& ModelFile::train_inputs() const {
  return std::visit([](const auto& m) -> const RowMatrix& { return m.train_inputs; }, model);
}

RowMatrix ModelFile::map_points(const RowMatrix& standardized) const {
  RowMatrix out(standardized.rows(), output_dim());
  for (Eigen::Index i = 0; i < standardized.rows(); ++i) {
    const FeatureView x = row_view(standardized, i);
    if (const auto* m = std::get_if<FixedModel>(&model)) {
      out.row(i) = fixed::map_point(*m, x).transpose();
    } else {
      out.row(i) = param::map_point(std::get<ParamModel>(model), x).transpose();
    }
  }
  return out;
}

RowMatrix ModelFile::metric_coords(const RowMatrix& standardized) const {
  return std::visit([&](const auto& m) { return knn::metric_coords(m, standardized); }, model);
}

double ModelFile::distance(FeatureView x, FeatureView y) const {
  if (const auto* m = std::get_if<FixedModel>(&model)) return fixed::distance(*m, x, y);
  return param::distance(std::get<ParamModel>(model), x, y);
}

std::string ModelFile::parameters_json() const { return parameters_section(*this).dump(2); }

std::string ModelFile::to_json() const {
  json doc;
  doc["format_version"] = format_version;
  doc["method"] = method_name(method);
  doc["seed"] = seed;
  doc["hyperparameters"] = {{"gamma", params.gamma}, {"lambda", params.lambda}, {"rho", params.rho},
                            {"dim", params.dim},     {"sigma", params.sigma},   {"sigma_ladder", params.sigma_ladder},
                            {"k", params.k}};
  json kernel;
  if (const auto* m = std::get_if<FixedModel>(&model)) {
    kernel["kind"] = "diagonal_bank";
    json sigmas = json::array();
    for (const auto& k : m->kernel.bank) sigmas.push_back(k.sigma);
    kernel["sigmas"] = sigmas;
  } else {
    kernel["kind"] = "scaled_identity";
    kernel["sigma"] = std::get<ParamModel>(model).kernel.sigma;
    kernel["output_dim"] = output_dim();
  }
  doc["kernel"] = kernel;
  doc["data"] = {{"label_column", label_column},
                 {"feature_names", feature_names},
                 {"class_names", class_names},
                 {"standardization",
                  {{"mean", vector_to_json(standardization.mean)}, {"stddev", vector_to_json(standardization.stddev)}}},
                 {"train_inputs", matrix_to_json(train_inputs())},
                 {"train_labels", train_labels}};
  doc["parameters"] = parameters_section(*this);
  json fit;
  std::visit(
      [&](const auto& m) {
        fit["objective_trace"] = m.objective_trace;
        fit["outer_iterations"] = m.outer_iterations;
        fit["converged"] = m.converged;
      },
      model);
  doc["fit"] = fit;
  return doc.dump(2) + "\n";
}

ModelFile ModelFile::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    ModelFile file;
    file.format_version = doc.at("format_version").get<int>();
    if (file.format_version != kFormatVersion) {
      throw DataError("model file format_version " + std::to_string(file.format_version) + " is not supported (expected " +
                      std::to_string(kFormatVersion) + ")");
    }
    file.method = parse_method(doc.at("method").get<std::string>());
    file.seed = doc.at("seed").get<std::uint64_t>();
    const json& hp = doc.at("hyperparameters");
    file.params = {hp.at("gamma").get<double>(), hp.at("lambda").get<double>(), hp.at("rho").get<double>(),
                   hp.at("dim").get<int>(),      hp.at("sigma").get<double>(),  hp.at("sigma_ladder").get<double>(),
                   hp.at("k").get<int>()};
    const json& d = doc.at("data");
    file.label_column = d.at("label_column").get<std::string>();
    file.feature_names = d.at("feature_names").get<std::vector<std::string>>();
    file.class_names = d.at("class_names").get<std::vector<std::string>>();
    file.standardization.mean = vector_from_json(d.at("standardization").at("mean"));
    file.standardization.stddev = vector_from_json(d.at("standardization").at("stddev"));
    file.train_labels = d.at("train_labels").get<std::vector<int>>();
    const Matrix inputs = matrix_from_json(d.at("train_inputs"), file.standardization.mean.size());
    const RowMatrix train_inputs = inputs;
    if (train_inputs.cols() != file.standardization.mean.size() ||
        static_cast<std::size_t>(train_inputs.rows()) != file.train_labels.size()) {
      throw DataError("model file: training inputs do not match standardization or labels");
    }

    const json& kernel = doc.at("kernel");
    const json& p = doc.at("parameters");
    const json& fit = doc.at("fit");
    if (file.method == Method::fixed) {
      FixedModel m;
      std::vector<ScalarKernelSpec> bank;
      for (const auto& s : kernel.at("sigmas")) bank.push_back(ScalarKernelSpec::gaussian(s.get<double>()));
      m.kernel = MatrixKernelSpec::diagonal_bank(std::move(bank));
      m.c = vector_from_json(p.at("c"));
      m.L = matrix_from_json(p.at("L"));
      m.train_inputs = train_inputs;
      m.objective_trace = fit.at("objective_trace").get<std::vector<double>>();
      m.outer_iterations = fit.at("outer_iterations").get<int>();
      m.converged = fit.at("converged").get<bool>();
      if (m.c.size() != m.kernel.output_dim * train_inputs.rows()) throw DataError("model file: c has wrong length");
      file.model = std::move(m);
    } else if (file.method == Method::param) {
      ParamModel m;
      m.kernel = ScalarKernelSpec::gaussian(kernel.at("sigma").get<double>());
      m.C = matrix_from_json(p.at("C"));
      m.B = matrix_from_json(p.at("B"));
      m.train_inputs = train_inputs;
      m.objective_trace = fit.at("objective_trace").get<std::vector<double>>();
      m.outer_iterations = fit.at("outer_iterations").get<int>();
      m.converged = fit.at("converged").get<bool>();
      if (m.C.cols() != train_inputs.rows() || m.C.rows() != m.B.rows()) throw DataError("model file: C/B shape mismatch");
      file.model = std::move(m);
    } else {
      throw DataError("model file: method must be fixed or param");
    }
    return file;
  } catch (const json::exception& e) {
    throw DataError(std::string("model file is missing or has malformed fields: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
}

void ModelFile::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file '" + path + "'");
  out << to_json();
}

ModelFile ModelFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

ModelFile train_model_file(Method method, const Dataset& raw, const HyperParams& params, std::uint64_t seed) {
  if (method == Method::baseline) throw ConfigError("the baseline has no trainable model; use --method fixed or param");
  raw.validate();
  const Dataset train = data::standardize(raw);
  const TargetSpec targets = data::make_prototypes(train.classes(), params.dim, seed);
  const TrainingData td = data::make_training_data(train, targets);

  ModelFile file;
  file.method = method;
  file.params = params;
  file.seed = seed;
  file.label_column = raw.label_column;
  file.feature_names = raw.feature_names;
  file.class_names = raw.class_names;
  file.standardization = train.standardization;
  file.train_labels = train.labels;
  if (method == Method::fixed) {
    file.model = fixed::fit(td, MatrixKernelSpec::diagonal_bank(params.dim, params.sigma, params.sigma_ladder),
                            params.fixed_config());
  } else {
    file.model = param::fit(td, ScalarKernelSpec::gaussian(params.sigma), params.param_config());
  }
  return file;
}

}  // namespace kdml
