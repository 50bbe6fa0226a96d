#include "kdml/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "kdml/errors.hpp"

namespace kdml {

void TrainingData::validate() const {
  const Eigen::Index n = inputs.rows();
  if (n < 1) throw DataError("training set is empty");
  if (targets.cols() != n) throw DataError("targets must have one column per sample");
  if (targets.rows() < 1) throw DataError("targets must have at least one row");
  if (similarity.rows() != n || similarity.cols() != n) throw DataError("similarity must be n x n");
  if (!inputs.allFinite() || !targets.allFinite() || !similarity.allFinite()) {
    throw DataError("training data contains non-finite values");
  }
}

RowMatrix Standardization::apply(const RowMatrix& features) const {
  if (mean.size() != features.cols()) {
    throw DataError("standardization expects " + std::to_string(mean.size()) + " features, got " +
                    std::to_string(features.cols()));
  }
  RowMatrix out(features.rows(), features.cols());
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    if (stddev(j) > 0.0) {
      out.col(j) = (features.col(j).array() - mean(j)) / stddev(j);
    } else {
      out.col(j).setZero();
    }
  }
  return out;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
  out.labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    out.features.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(indices[r]));
    out.labels.push_back(labels[indices[r]]);
  }
  out.class_names = class_names;
  out.feature_names = feature_names;
  out.label_column = label_column;
  out.standardization = standardization;
  return out;
}

void Dataset::validate() const {
  if (features.rows() == 0) throw DataError("dataset is empty");
  if (static_cast<Eigen::Index>(labels.size()) != features.rows()) throw DataError("label count mismatch");
  if (!features.allFinite()) throw DataError("dataset contains non-finite features");
  std::vector<bool> seen(class_names.size(), false);
  for (int label : labels) {
    if (label < 1 || label > classes()) throw DataError("label out of range 1..c");
    seen[static_cast<std::size_t>(label - 1)] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw DataError("every class must occur at least once");
  }
}

Matrix TargetSpec::targets_for(const std::vector<int>& labels) const {
  Matrix out(dim, static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    if (label < 1 || label > static_cast<int>(prototypes.size())) {
      throw DataError("label " + std::to_string(label) + " has no prototype");
    }
    out.col(static_cast<Eigen::Index>(i)) = prototypes[static_cast<std::size_t>(label - 1)];
  }
  return out;
}

namespace data {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(ch);
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  char* end = nullptr;
  const double value = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(value)) {
    throw DataError("non-numeric feature value '" + cell + "' in row " + std::to_string(row) + ", column '" +
                    column + "'");
  }
  return value;
}

// Deterministic across standard libraries: only raw mt19937_64 output is used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::size_t below(std::size_t bound) { return static_cast<std::size_t>(uniform() * static_cast<double>(bound)); }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

std::vector<std::vector<std::size_t>> indices_by_class(const std::vector<int>& labels) {
  int classes = 0;
  for (int label : labels) classes = std::max(classes, label);
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < labels.size(); ++i) out[static_cast<std::size_t>(labels[i] - 1)].push_back(i);
  return out;
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& label_column) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) {
      header = split_row(line);
      break;
    }
  }
  if (header.empty()) throw DataError("empty file");

  std::size_t label_index = header.size();
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == label_column) {
      label_index = j;
      break;
    }
  }
  if (label_index == header.size()) {
    char* end = nullptr;
    const long idx = std::strtol(label_column.c_str(), &end, 10);
    if (!label_column.empty() && end == label_column.c_str() + label_column.size() && idx >= 0 &&
        static_cast<std::size_t>(idx) < header.size()) {
      label_index = static_cast<std::size_t>(idx);
    } else {
      throw DataError("missing label column '" + label_column + "'");
    }
  }
  if (header.size() < 2) throw DataError("no feature columns");

  Dataset out;
  out.label_column = header[label_index];
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j != label_index) out.feature_names.push_back(header[j]);
  }

  std::map<std::string, int> class_ids;
  std::vector<std::vector<double>> rows;
  std::size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw DataError("row " + std::to_string(row_number) + " has " + std::to_string(cells.size()) +
                      " cells, expected " + std::to_string(header.size()));
    }
    std::vector<double> row;
    row.reserve(header.size() - 1);
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j == label_index) continue;
      row.push_back(parse_number(cells[j], row_number, header[j]));
    }
    const std::string& name = cells[label_index];
    auto [it, inserted] = class_ids.emplace(name, static_cast<int>(out.class_names.size()) + 1);
    if (inserted) out.class_names.push_back(name);
    out.labels.push_back(it->second);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("empty file: no data rows");

  out.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size() - 1));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      out.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return out;
}

Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream file(path);
  if (!file) throw DataError("cannot open data file '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_csv(buffer.str(), label_column);
}

Standardization fit_standardization(const RowMatrix& features) {
  Standardization s;
  const auto n = static_cast<double>(features.rows());
  s.mean = features.colwise().mean().transpose();
  s.stddev = Vector::Zero(features.cols());
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    const double var = (features.col(j).array() - s.mean(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    // Relative cutoff so round-off in a constant column is not amplified.
    s.stddev(j) = sd > 1e-12 * (1.0 + std::abs(s.mean(j))) ? sd : 0.0;
  }
  return s;
}

Dataset standardize(const Dataset& dataset) {
  Dataset out = dataset;
  out.standardization = fit_standardization(dataset.features);
  out.features = out.standardization.apply(dataset.features);
  return out;
}

TargetSpec make_prototypes(int classes, int m, std::uint64_t seed) {
  if (m < 1) throw ConfigError("output dimension must be >= 1");
  if (classes < 1) throw ConfigError("need at least one class");
  TargetSpec spec;
  spec.dim = m;
  if (m >= classes) {
    for (int k = 0; k < classes; ++k) spec.prototypes.push_back(Vector::Unit(m, k));
    return spec;
  }
  if (m == 1 && classes > 2) throw ConfigError("output dimension 1 holds at most 2 distinct unit prototypes");
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    Rng rng(seed + attempt);
    Matrix draw(classes, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < classes; ++i) draw(i, j) = rng.normal();
    }
    draw.rowwise() -= draw.colwise().mean();
    const Matrix q = Eigen::HouseholderQR<Matrix>(draw).householderQ() * Matrix::Identity(classes, m);
    std::vector<Vector> rows;
    bool ok = true;
    for (Eigen::Index i = 0; i < classes && ok; ++i) {
      const double norm = q.row(i).norm();
      ok = norm > 1e-8;
      if (ok) rows.emplace_back(q.row(i).transpose() / norm);
    }
    for (std::size_t a = 0; ok && a < rows.size(); ++a) {
      for (std::size_t b = a + 1; ok && b < rows.size(); ++b) ok = (rows[a] - rows[b]).norm() > 1e-6;
    }
    if (ok) {
      spec.prototypes = std::move(rows);
      return spec;
    }
  }
  throw NumericalError("could not draw distinct prototypes");
}

Matrix similarity(const std::vector<int>& labels) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  Matrix s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) s(i, j) = labels[i] == labels[j] ? 1.0 : 0.0;
  }
  return s;
}

TrainingData make_training_data(const Dataset& dataset, const TargetSpec& targets) {
  dataset.validate();
  return {dataset.features, targets.targets_for(dataset.labels), similarity(dataset.labels)};
}

Split stratified_split(const std::vector<int>& labels, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train fraction must lie in (0, 1)");
  Rng rng(seed);
  Split split;
  for (auto members : indices_by_class(labels)) {
    if (members.empty()) continue;
    rng.shuffle(members);
    const auto count = members.size();
    auto take = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(count)));
    take = std::clamp<std::size_t>(take, 1, count >= 2 ? count - 1 : 1);
    split.train.insert(split.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
    split.test.insert(split.test.end(), members.begin() + static_cast<std::ptrdiff_t>(take), members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, int folds,
                                                       std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(folds));
  std::size_t next = 0;
  for (auto members : indices_by_class(labels)) {
    if (members.empty()) continue;
    if (members.size() < static_cast<std::size_t>(folds)) {
      throw DataError("a class has fewer samples (" + std::to_string(members.size()) + ") than folds (" +
                      std::to_string(folds) + ")");
    }
    rng.shuffle(members);
    for (std::size_t idx : members) {
      out[next].push_back(idx);
      next = (next + 1) % out.size();
    }
  }
  for (auto& fold : out) std::sort(fold.begin(), fold.end());
  return out;
}

Dataset make_circles(int n, std::uint64_t seed, double inner, double outer, double noise, int nuisance) {
  if (n < 2) throw ConfigError("circles dataset needs at least 2 points");
  Rng rng(seed);
  Dataset out;
  out.class_names = {"inner", "outer"};
  out.label_column = "label";
  out.feature_names = {"x", "y"};
  for (int j = 0; j < nuisance; ++j) out.feature_names.push_back("noise" + std::to_string(j + 1));
  out.features.resize(n, 2 + nuisance);
  for (int i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? 1 : 2;
    const double radius = (label == 1 ? inner : outer) + noise * rng.normal();
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    out.features(i, 0) = radius * std::cos(angle);
    out.features(i, 1) = radius * std::sin(angle);
    for (int j = 0; j < nuisance; ++j) out.features(i, 2 + j) = rng.normal();
    out.labels.push_back(label);
  }
  return out;
}

void write_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw DataError("cannot write '" + path + "'");
  for (const auto& name : dataset.feature_names) file << name << ',';
  file << dataset.label_column << '\n';
  for (Eigen::Index i = 0; i < dataset.size(); ++i) {
    for (Eigen::Index j = 0; j < dataset.dim(); ++j) file << numerics::format_double(dataset.features(i, j)) << ',';
    file << dataset.class_names[static_cast<std::size_t>(dataset.labels[static_cast<std::size_t>(i)] - 1)] << '\n';
  }
}

}  // namespace data
}  // namespace kdml
