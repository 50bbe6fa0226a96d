#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace kdml {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
// Sample-per-row storage so every feature vector is contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace kdml

namespace kdml::numerics {

struct SvdResult {
  Vector singular_values;  // descending, nonnegative
  Matrix left;             // p x r, orthonormal columns
  Matrix right;            // q x r, orthonormal columns
};

struct SymEig {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, vectors.col(i) pairs with values(i)
};

// Thin SVD. Throws NumericalError on non-finite input.
SvdResult svd(const Matrix& m);

/// Moore-Penrose pseudo-inverse. Singular values below rtol * sigma_max are
/// treated as zero. Throws NumericalError on non-finite input.
Matrix pinv(const Matrix& m, double rtol = 1e-10);

/// Symmetric eigendecomposition, eigenvalues ascending. Input must be
/// symmetric to 1e-10 relative to its largest entry (ConfigError otherwise).
SymEig sym_eig(const Matrix& m);

// Column-stacking vectorization and its inverse.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);

Matrix kron(const Matrix& a, const Matrix& b);

/// Central-difference gradient of a scalar function of a matrix, one entry at
/// a time. Throws NumericalError if fn returns a non-finite value.
Matrix fd_grad(const std::function<double(const Matrix&)>& fn, const Matrix& at, double eps);

Matrix symmetrize(const Matrix& m);
double min_eigenvalue(const Matrix& symmetric);
double spectral_norm(const Matrix& m);
bool all_finite(const Matrix& m);

// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

// Smallest eigenvalue measured relative to the spectral norm; 0 for a zero matrix.
double relative_min_eigenvalue(const Matrix& symmetric);

}  // namespace kdml::numerics
