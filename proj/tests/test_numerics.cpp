#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "kdml/errors.hpp"
#include "kdml/numerics.hpp"
#include "oracles.hpp"

namespace kdml {
namespace {

using namespace numerics;

double rel_err(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

TEST(Pinv, WorkedExamples) {
  EXPECT_LT((pinv(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm(), 1e-15);
  EXPECT_EQ(pinv(Matrix::Zero(2, 3)), Matrix::Zero(3, 2));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 0.5;
  EXPECT_LT((pinv(d) - expected).norm(), 1e-15);
}

TEST(Pinv, PenroseConditionsOnRankDeficientMatrices) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index rows = 2 + trial % 5, cols = 1 + (trial * 3) % 6, rank = 1 + trial % 3;
    const Matrix a = oracle::random_matrix(rng, rows, rank) * oracle::random_matrix(rng, rank, cols);
    const Matrix p = pinv(a);
    ASSERT_EQ(p.rows(), cols);
    ASSERT_EQ(p.cols(), rows);
    EXPECT_LT(rel_err(a * p * a, a), 1e-8);
    EXPECT_LT(rel_err(p * a * p, p), 1e-8);
    EXPECT_LT(rel_err((a * p).transpose(), a * p), 1e-8);
    EXPECT_LT(rel_err((p * a).transpose(), p * a), 1e-8);
  }
}

TEST(Pinv, CutoffDropsTinySingularValues) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 1e-12;
  EXPECT_EQ(pinv(d, 1e-10)(1, 1), 0.0);
  EXPECT_NEAR(pinv(d, 1e-14)(1, 1), 1e12, 1.0);
}

TEST(Pinv, RejectsNonFinite) {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(pinv(m), NumericalError);
}

TEST(Svd, DescendingValuesAndReconstruction) {
  std::mt19937_64 rng(4);
  const Matrix a = oracle::random_matrix(rng, 5, 3);
  const SvdResult s = svd(a);
  for (Eigen::Index i = 1; i < s.singular_values.size(); ++i) {
    EXPECT_GE(s.singular_values(i - 1), s.singular_values(i));
  }
  EXPECT_LT(rel_err(s.left * s.singular_values.asDiagonal() * s.right.transpose(), a), 1e-10);
  EXPECT_LT((s.left.transpose() * s.left - Matrix::Identity(3, 3)).norm(), 1e-12);
}

TEST(Vec, ColumnMajorConvention) {
  Matrix m(2, 2);
  m << 1, 3, 2, 4;
  Vector expected(4);
  expected << 1, 2, 3, 4;
  EXPECT_EQ(vec(m), expected);
}

TEST(Vec, RoundTripAndLengthCheck) {
  std::mt19937_64 rng(8);
  const Matrix m = oracle::random_matrix(rng, 3, 4);
  EXPECT_EQ(unvec(vec(m), 3, 4), m);
  EXPECT_THROW(unvec(vec(m), 4, 4), ConfigError);
}

TEST(Kron, VectorizationIdentity) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index p = 1 + trial % 3, q = 1 + trial % 4, r = 2 + trial % 2;
    const Matrix x = oracle::random_matrix(rng, r, q);
    const Matrix b = oracle::random_matrix(rng, p, p);
    const Matrix c = oracle::random_matrix(rng, p, q);
    const Vector lhs = kron(x, b) * vec(c);
    const Vector rhs = vec(b * c * x.transpose());
    EXPECT_LT((lhs - rhs).norm(), 1e-12 * (1.0 + rhs.norm()));
  }
}

TEST(Kron, IdentityFactorIsBlockDiagonal) {
  std::mt19937_64 rng(10);
  const Matrix b = oracle::random_matrix(rng, 2, 3);
  const Matrix k = kron(Matrix::Identity(2, 2), b);
  ASSERT_EQ(k.rows(), 4);
  ASSERT_EQ(k.cols(), 6);
  EXPECT_EQ(k.block(0, 0, 2, 3), b);
  EXPECT_EQ(k.block(2, 3, 2, 3), b);
  EXPECT_EQ(k.block(0, 3, 2, 3), Matrix::Zero(2, 3));
  EXPECT_EQ(k.block(2, 0, 2, 3), Matrix::Zero(2, 3));
}

TEST(Kron, MixedProduct) {
  std::mt19937_64 rng(12);
  const Matrix a = oracle::random_matrix(rng, 2, 3), c = oracle::random_matrix(rng, 3, 2);
  const Matrix b = oracle::random_matrix(rng, 3, 2), d = oracle::random_matrix(rng, 2, 4);
  const Matrix lhs = kron(a, b) * kron(c, d);
  const Matrix rhs = kron(a * c, b * d);
  EXPECT_EQ(lhs.rows(), 6);
  EXPECT_EQ(lhs.cols(), 8);
  EXPECT_LT((lhs - rhs).norm(), 1e-12 * (1.0 + rhs.norm()));
}

TEST(FdGrad, HalfSquaredFrobenius) {
  std::mt19937_64 rng(13);
  const Matrix m = oracle::random_matrix(rng, 3, 2);
  const Matrix g = fd_grad([](const Matrix& x) { return 0.5 * x.squaredNorm(); }, m, 1e-5);
  EXPECT_LT((g - m).norm(), 1e-8);
}

TEST(FdGrad, LinearTrace) {
  std::mt19937_64 rng(14);
  const Matrix w = oracle::random_matrix(rng, 3, 3);
  const Matrix m = oracle::random_matrix(rng, 3, 3);
  const Matrix g = fd_grad([&](const Matrix& x) { return (w * x).trace(); }, m, 1e-5);
  EXPECT_LT((g - w.transpose()).norm(), 1e-8);
}

TEST(FdGrad, RejectsNonFiniteValues) {
  EXPECT_THROW(fd_grad([](const Matrix& x) { return std::log(x(0, 0)); }, Matrix::Zero(1, 1), 1e-3), NumericalError);
}

TEST(SymEig, DiagonalInput) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 1.0;
  const SymEig e = sym_eig(d);
  EXPECT_DOUBLE_EQ(e.values(0), 1.0);
  EXPECT_DOUBLE_EQ(e.values(1), 2.0);
}

TEST(SymEig, RecoversConjugatedSpectrum) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::HouseholderQR<Matrix> qr(oracle::random_matrix(rng, 4, 4));
    const Matrix q = qr.householderQ();
    Vector values(4);
    values << -1.5, 0.25, 2.0, 7.0;
    const Matrix m = symmetrize(q * values.asDiagonal() * q.transpose());
    const SymEig e = sym_eig(m);
    EXPECT_LT((e.values - values).norm(), 1e-10);
    EXPECT_LT((e.vectors.transpose() * e.vectors - Matrix::Identity(4, 4)).norm(), 1e-10);
    EXPECT_LT(rel_err(e.vectors * e.values.asDiagonal() * e.vectors.transpose(), m), 1e-10);
  }
}

TEST(SymEig, RejectsAsymmetricInput) {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = 1e-6;
  EXPECT_THROW(sym_eig(m), ConfigError);
}

TEST(Helpers, MinEigenvalueAndSpectralNorm) {
  Matrix m(2, 2);
  m << 2, 1, 1, 2;
  EXPECT_NEAR(min_eigenvalue(m), 1.0, 1e-14);
  EXPECT_NEAR(spectral_norm(m), 3.0, 1e-14);
  EXPECT_NEAR(relative_min_eigenvalue(m), 1.0 / 3.0, 1e-14);
  EXPECT_EQ(relative_min_eigenvalue(Matrix::Zero(2, 2)), 0.0);
}

TEST(Helpers, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(16);
  std::normal_distribution<double> normal(0.0, 1e3);
  for (int i = 0; i < 200; ++i) {
    const double v = normal(rng);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
}

}  // namespace
}  // namespace kdml
