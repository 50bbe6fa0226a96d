#include "kdml/numerics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "kdml/errors.hpp"

namespace kdml::numerics {

SvdResult svd(const Matrix& m) {
  if (!all_finite(m)) throw NumericalError("svd: non-finite input");
  Eigen::BDCSVD<Matrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {solver.singularValues(), solver.matrixU(), solver.matrixV()};
}

Matrix pinv(const Matrix& m, double rtol) {
  if (!all_finite(m)) throw NumericalError("pinv: non-finite input");
  if (m.size() == 0) return Matrix(m.cols(), m.rows());
  const SvdResult s = svd(m);
  const double sigma_max = s.singular_values.size() > 0 ? s.singular_values(0) : 0.0;
  Vector inv = Vector::Zero(s.singular_values.size());
  if (sigma_max > 0.0) {
    const double cutoff = rtol * sigma_max;
    for (Eigen::Index i = 0; i < inv.size(); ++i) {
      if (s.singular_values(i) >= cutoff && s.singular_values(i) > 0.0) inv(i) = 1.0 / s.singular_values(i);
    }
  }
  return s.right * inv.asDiagonal() * s.left.transpose();
}

SymEig sym_eig(const Matrix& m) {
  if (m.rows() != m.cols()) throw ConfigError("sym_eig: matrix is not square");
  if (!all_finite(m)) throw NumericalError("sym_eig: non-finite input");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ConfigError("sym_eig: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw NumericalError("sym_eig: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Vector vec(const Matrix& m) {
  // Eigen's default storage is column-major, so the raw buffer is vec(m).
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (rows < 0 || cols < 0 || v.size() != rows * cols) {
    throw ConfigError("unvec: length " + std::to_string(v.size()) + " does not match " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix fd_grad(const std::function<double(const Matrix&)>& fn, const Matrix& at, double eps) {
  Matrix grad(at.rows(), at.cols());
  Matrix probe = at;
  for (Eigen::Index j = 0; j < at.cols(); ++j) {
    for (Eigen::Index i = 0; i < at.rows(); ++i) {
      probe(i, j) = at(i, j) + eps;
      const double up = fn(probe);
      probe(i, j) = at(i, j) - eps;
      const double down = fn(probe);
      probe(i, j) = at(i, j);
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NumericalError("fd_grad: function returned a non-finite value");
      }
      grad(i, j) = (up - down) / (2.0 * eps);
    }
  }
  return grad;
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double min_eigenvalue(const Matrix& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> solver(m);
  return solver.singularValues()(0);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

double relative_min_eigenvalue(const Matrix& symmetric) {
  const double norm = spectral_norm(symmetric);
  if (norm == 0.0) return 0.0;
  return min_eigenvalue(symmetric) / norm;
}

std::string format_double(double v) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, result.ptr);
}

}  // namespace kdml::numerics
