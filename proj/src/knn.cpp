#include "kdml/knn.hpp"

#include <algorithm>
#include <numeric>

#include "kdml/errors.hpp"
#include "kdml/simd.hpp"

namespace kdml {

int knn_vote(std::span<const double> distances, std::span<const int> labels, int k) {
  const std::size_t n = distances.size();
  if (labels.size() != n) throw ConfigError("knn: distance and label counts differ");
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw ConfigError("knn: k = " + std::to_string(k) + " outside 1.." + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto by_distance = [&](std::size_t a, std::size_t b) {
    return distances[a] < distances[b] || (distances[a] == distances[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), by_distance);

  int max_label = 0;
  for (int i = 0; i < k; ++i) max_label = std::max(max_label, labels[order[static_cast<std::size_t>(i)]]);
  std::vector<int> votes(static_cast<std::size_t>(max_label) + 1, 0);
  for (int i = 0; i < k; ++i) ++votes[static_cast<std::size_t>(labels[order[static_cast<std::size_t>(i)]])];
  // max_element returns the first maximum, i.e. the smallest label.
  return static_cast<int>(std::max_element(votes.begin() + 1, votes.end()) - votes.begin());
}

KnnIndex::KnnIndex(RowMatrix coords, std::vector<int> labels) : coords_(std::move(coords)), labels_(std::move(labels)) {
  if (static_cast<Eigen::Index>(labels_.size()) != coords_.rows()) throw DataError("knn: label count mismatch");
}

int KnnIndex::predict(FeatureView query, int k) const {
  if (static_cast<Eigen::Index>(query.size()) != coords_.cols()) throw DataError("knn: query dimension mismatch");
  std::vector<double> dist(static_cast<std::size_t>(coords_.rows()));
  for (Eigen::Index i = 0; i < coords_.rows(); ++i) {
    dist[static_cast<std::size_t>(i)] = simd::squared_l2(row_view(coords_, i), query);
  }
  return knn_vote(dist, labels_, k);
}

std::vector<int> KnnIndex::predict_all(const RowMatrix& queries, int k) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(queries.rows()));
  for (Eigen::Index i = 0; i < queries.rows(); ++i) out.push_back(predict(row_view(queries, i), k));
  return out;
}

namespace knn {

RowMatrix metric_coords(const FixedModel& model, const RowMatrix& x) {
  RowMatrix out(x.rows(), model.output_dim());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.row(i) = fixed::metric_coords(model, row_view(x, i)).transpose();
  return out;
}

RowMatrix metric_coords(const ParamModel& model, const RowMatrix& x) {
  RowMatrix out(x.rows(), model.output_dim());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.row(i) = param::metric_coords(model, row_view(x, i)).transpose();
  return out;
}

int knn_predict(const FixedModel& model, const Dataset& train, FeatureView query, int k) {
  const KnnIndex index(metric_coords(model, train.features), train.labels);
  const Vector q = fixed::metric_coords(model, query);
  return index.predict({q.data(), static_cast<std::size_t>(q.size())}, k);
}

int knn_predict(const ParamModel& model, const Dataset& train, FeatureView query, int k) {
  const KnnIndex index(metric_coords(model, train.features), train.labels);
  const Vector q = param::metric_coords(model, query);
  return index.predict({q.data(), static_cast<std::size_t>(q.size())}, k);
}

int knn_predict_euclidean(const Dataset& train, FeatureView query, int k) {
  return KnnIndex(train.features, train.labels).predict(query, k);
}

}  // namespace knn
}  // namespace kdml
