#include "kdml/kernels.hpp"

#include <cmath>
#include <string>

#include "kdml/errors.hpp"
#include "kdml/simd.hpp"

namespace kdml {

ScalarKernelSpec ScalarKernelSpec::gaussian(double sigma) {
  ScalarKernelSpec spec{ScalarKernelKind::gaussian, sigma};
  spec.validate();
  return spec;
}

void ScalarKernelSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("kernel spread sigma must be positive and finite, got " + std::to_string(sigma));
  }
}

MatrixKernelSpec MatrixKernelSpec::diagonal_bank(int m, double sigma, double ladder) {
  if (m < 1) throw ConfigError("output dimension must be >= 1");
  if (!(ladder > 0.0)) throw ConfigError("sigma ladder factor must be positive");
  std::vector<ScalarKernelSpec> bank;
  bank.reserve(static_cast<std::size_t>(m));
  double s = sigma;
  for (int j = 0; j < m; ++j) {
    bank.push_back(ScalarKernelSpec::gaussian(s));
    s *= ladder;
  }
  return diagonal_bank(std::move(bank));
}

MatrixKernelSpec MatrixKernelSpec::diagonal_bank(std::vector<ScalarKernelSpec> bank) {
  MatrixKernelSpec spec;
  spec.kind = MatrixKernelKind::diagonal_bank;
  spec.output_dim = static_cast<int>(bank.size());
  spec.bank = std::move(bank);
  spec.validate();
  return spec;
}

MatrixKernelSpec MatrixKernelSpec::scaled_identity(ScalarKernelSpec base, int m) {
  MatrixKernelSpec spec;
  spec.kind = MatrixKernelKind::scaled_identity;
  spec.base = base;
  spec.output_dim = m;
  spec.validate();
  return spec;
}

void MatrixKernelSpec::validate() const {
  if (output_dim < 1) throw ConfigError("output dimension must be >= 1");
  if (kind == MatrixKernelKind::diagonal_bank) {
    if (static_cast<int>(bank.size()) != output_dim) {
      throw ConfigError("diagonal bank needs exactly output_dim scalar kernels");
    }
    for (const auto& k : bank) k.validate();
  } else {
    base.validate();
  }
}

namespace kernels {
namespace {

void check_dims(FeatureView x, FeatureView y) {
  if (x.size() != y.size()) {
    throw DataError("kernel: feature dimension mismatch (" + std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()) + ")");
  }
}

double gaussian_from_sq(double sq, double sigma) { return std::exp(-sq / (2.0 * sigma * sigma)); }

// Writes diag entries of K(x, y) into out(0..m-1).
void diagonal_entries(const MatrixKernelSpec& spec, FeatureView x, FeatureView y, double* out) {
  const double sq = simd::squared_l2(x, y);
  if (spec.kind == MatrixKernelKind::diagonal_bank) {
    for (int j = 0; j < spec.output_dim; ++j) out[j] = gaussian_from_sq(sq, spec.bank[j].sigma);
  } else {
    const double k = gaussian_from_sq(sq, spec.base.sigma);
    for (int j = 0; j < spec.output_dim; ++j) out[j] = k;
  }
}

}  // namespace

double scalar_eval(const ScalarKernelSpec& spec, FeatureView x, FeatureView y) {
  check_dims(x, y);
  return gaussian_from_sq(simd::squared_l2(x, y), spec.sigma);
}

Matrix matrix_eval(const MatrixKernelSpec& spec, FeatureView x, FeatureView y) {
  check_dims(x, y);
  Vector diag(spec.output_dim);
  diagonal_entries(spec, x, y, diag.data());
  return diag.asDiagonal();
}

Matrix block_gram(const MatrixKernelSpec& spec, const RowMatrix& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index m = spec.output_dim;
  if (n < 1) throw DataError("block_gram: empty training set");
  Matrix out = Matrix::Zero(m * n, m * n);
  Vector diag(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      diagonal_entries(spec, row_view(x, i), row_view(x, j), diag.data());
      for (Eigen::Index a = 0; a < m; ++a) {
        out(i * m + a, j * m + a) = diag(a);
        out(j * m + a, i * m + a) = diag(a);
      }
    }
  }
  return out;
}

Matrix gram_row(const MatrixKernelSpec& spec, FeatureView x, const RowMatrix& train) {
  const Eigen::Index n = train.rows();
  const Eigen::Index m = spec.output_dim;
  if (n > 0) check_dims(x, row_view(train, 0));
  Matrix out = Matrix::Zero(m, m * n);
  Vector diag(m);
  for (Eigen::Index j = 0; j < n; ++j) {
    diagonal_entries(spec, x, row_view(train, j), diag.data());
    for (Eigen::Index a = 0; a < m; ++a) out(a, j * m + a) = diag(a);
  }
  return out;
}

Matrix gamma(const MatrixKernelSpec& spec, FeatureView xi, FeatureView xj, const RowMatrix& train) {
  return gram_row(spec, xi, train) - gram_row(spec, xj, train);
}

Matrix scalar_gram(const ScalarKernelSpec& spec, const RowMatrix& x) {
  const Eigen::Index n = x.rows();
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double k = gaussian_from_sq(simd::squared_l2(row_view(x, i), row_view(x, j)), spec.sigma);
      out(i, j) = k;
      out(j, i) = k;
    }
  }
  return out;
}

Vector k_vec(const ScalarKernelSpec& spec, FeatureView x, const RowMatrix& train) {
  const Eigen::Index n = train.rows();
  if (n > 0) check_dims(x, row_view(train, 0));
  Vector out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out(j) = gaussian_from_sq(simd::squared_l2(x, row_view(train, j)), spec.sigma);
  }
  return out;
}

Matrix similarity_laplacian(const Matrix& similarity) {
  if (similarity.rows() != similarity.cols()) throw ConfigError("similarity matrix must be square");
  if ((similarity - similarity.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw ConfigError("similarity matrix must be symmetric");
  }
  Matrix lap = -similarity;
  lap.diagonal() += similarity.rowwise().sum();
  return lap;
}

Matrix graph_gram(const Matrix& scalar_gram, const Matrix& similarity) {
  if (scalar_gram.rows() != similarity.rows()) throw ConfigError("graph_gram: shape mismatch");
  const Matrix lap = similarity_laplacian(similarity);
  return numerics::symmetrize(scalar_gram * lap * scalar_gram);
}

}  // namespace kernels

GramCache GramCache::for_matrix_kernel(const MatrixKernelSpec& spec, const RowMatrix& x,
                                       const Matrix& similarity) {
  spec.validate();
  if (similarity.rows() != x.rows()) throw ConfigError("similarity matrix does not match sample count");
  GramCache cache;
  cache.output_dim = spec.output_dim;
  cache.block_gram = kernels::block_gram(spec, x);
  const Eigen::Index m = spec.output_dim;
  cache.gram_rows.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    cache.gram_rows.push_back(cache.block_gram.middleRows(i * m, m));
  }
  cache.laplacian = kernels::similarity_laplacian(similarity);
  return cache;
}

GramCache GramCache::for_scalar_kernel(const ScalarKernelSpec& spec, int output_dim, const RowMatrix& x,
                                       const Matrix& similarity) {
  spec.validate();
  if (output_dim < 1) throw ConfigError("output dimension must be >= 1");
  if (similarity.rows() != x.rows()) throw ConfigError("similarity matrix does not match sample count");
  GramCache cache;
  cache.output_dim = output_dim;
  cache.scalar_gram = kernels::scalar_gram(spec, x);
  cache.graph_gram = kernels::graph_gram(cache.scalar_gram, similarity);
  cache.laplacian = kernels::similarity_laplacian(similarity);
  return cache;
}

}  // namespace kdml
