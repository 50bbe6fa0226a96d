#pragma once

#include <span>
#include <vector>

#include "kdml/numerics.hpp"

namespace kdml {

using FeatureView = std::span<const double>;

inline FeatureView row_view(const RowMatrix& x, Eigen::Index i) {
  return {x.data() + i * x.cols(), static_cast<std::size_t>(x.cols())};
}

enum class ScalarKernelKind { gaussian };

// k(x, x') = exp(-|x - x'|^2 / (2 sigma^2))
struct ScalarKernelSpec {
  ScalarKernelKind kind = ScalarKernelKind::gaussian;
  double sigma = 1.0;

  static ScalarKernelSpec gaussian(double sigma);
  void validate() const;
};

enum class MatrixKernelKind { diagonal_bank, scaled_identity };

// K(x, x') as an m x m matrix: either diag(k_1, ..., k_m) over a bank of
// scalar kernels, or k(x, x') I. The learned B factor of the parameterized
// model is applied by that model, never here.
struct MatrixKernelSpec {
  MatrixKernelKind kind = MatrixKernelKind::diagonal_bank;
  std::vector<ScalarKernelSpec> bank;
  ScalarKernelSpec base;
  int output_dim = 1;

  // Gaussian bank with spreads sigma * ladder^(j-1), j = 1..m.
  static MatrixKernelSpec diagonal_bank(int m, double sigma, double ladder = 1.2);
  static MatrixKernelSpec diagonal_bank(std::vector<ScalarKernelSpec> bank);
  static MatrixKernelSpec scaled_identity(ScalarKernelSpec base, int m);
  void validate() const;
};

namespace kernels {

double scalar_eval(const ScalarKernelSpec& spec, FeatureView x, FeatureView y);
Matrix matrix_eval(const MatrixKernelSpec& spec, FeatureView x, FeatureView y);

// mn x mn; block (i, j) is matrix_eval(x_i, x_j).
Matrix block_gram(const MatrixKernelSpec& spec, const RowMatrix& x);
// m x mn; [K(x, x_1), ..., K(x, x_n)].
Matrix gram_row(const MatrixKernelSpec& spec, FeatureView x, const RowMatrix& train);
// gram_row(x_i) - gram_row(x_j)
Matrix gamma(const MatrixKernelSpec& spec, FeatureView xi, FeatureView xj, const RowMatrix& train);

Matrix scalar_gram(const ScalarKernelSpec& spec, const RowMatrix& x);
Vector k_vec(const ScalarKernelSpec& spec, FeatureView x, const RowMatrix& train);

// diag(S 1) - S; throws ConfigError when S is not symmetric.
Matrix similarity_laplacian(const Matrix& similarity);
// K (diag(S 1) - S) K
Matrix graph_gram(const Matrix& scalar_gram, const Matrix& similarity);

}  // namespace kernels

// Precomputed Gram quantities for one training set. Immutable once built.
struct GramCache {
  Matrix block_gram;              // mn x mn
  std::vector<Matrix> gram_rows;  // n blocks of m x mn
  Matrix scalar_gram;             // n x n
  Matrix graph_gram;              // n x n
  Matrix laplacian;               // n x n, diag(S 1) - S
  int output_dim = 0;

  Eigen::Index samples() const { return laplacian.rows(); }

  // Block quantities for a matrix kernel (fixed-kernel model).
  static GramCache for_matrix_kernel(const MatrixKernelSpec& spec, const RowMatrix& x,
                                     const Matrix& similarity);
  // Scalar quantities for K = k B (parameterized model).
  static GramCache for_scalar_kernel(const ScalarKernelSpec& spec, int output_dim,
                                     const RowMatrix& x, const Matrix& similarity);
};

}  // namespace kdml
