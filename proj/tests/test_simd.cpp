#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "kdml/simd.hpp"

namespace kdml::simd {
namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double naive_squared_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

TEST(Simd, ScalarMatchesSequentialLoopExactly) {
  std::mt19937_64 rng(3);
  for (std::size_t n = 0; n < 40; ++n) {
    const auto a = random_vector(rng, n);
    const auto b = random_vector(rng, n);
    EXPECT_EQ(squared_l2(Isa::scalar, a.data(), b.data(), n), naive_squared_l2(a, b));
    EXPECT_EQ(dot(Isa::scalar, a.data(), b.data(), n), naive_dot(a, b));
  }
}

// Wide variants reassociate the sum, so agreement is to round-off, scaled by
// the sum of absolute terms.
TEST(Simd, EveryAvailableIsaAgreesWithScalar) {
  std::mt19937_64 rng(11);
  for (Isa isa : available_isas()) {
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 67u, 1000u}) {
      const auto a = random_vector(rng, n);
      const auto b = random_vector(rng, n);
      double abs_dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) abs_dot += std::abs(a[i] * b[i]);
      const double l2 = squared_l2(Isa::scalar, a.data(), b.data(), n);
      EXPECT_NEAR(squared_l2(isa, a.data(), b.data(), n), l2, 1e-12 * (1.0 + l2)) << isa_name(isa) << " n=" << n;
      EXPECT_NEAR(dot(isa, a.data(), b.data(), n), dot(Isa::scalar, a.data(), b.data(), n), 1e-12 * (1.0 + abs_dot))
          << isa_name(isa) << " n=" << n;
    }
  }
}

TEST(Simd, SquaredDistanceIsSymmetricBitForBit) {
  std::mt19937_64 rng(5);
  for (Isa isa : available_isas()) {
    const auto a = random_vector(rng, 23);
    const auto b = random_vector(rng, 23);
    EXPECT_EQ(squared_l2(isa, a.data(), b.data(), 23), squared_l2(isa, b.data(), a.data(), 23));
  }
}

TEST(Simd, DispatchUsesAnAvailableIsa) {
  const auto isas = available_isas();
  EXPECT_EQ(isas.front(), Isa::scalar);
  EXPECT_NE(std::find(isas.begin(), isas.end(), active_isa()), isas.end());
  const std::vector<double> a{1.0, 2.0, 3.0};
  const std::vector<double> b{0.0, 2.0, 5.0};
  EXPECT_DOUBLE_EQ(squared_l2(a, b), 5.0);
  EXPECT_DOUBLE_EQ(dot(a, b), 19.0);
}

TEST(Simd, UnavailableIsaIsRejected) {
  const auto isas = available_isas();
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (std::find(isas.begin(), isas.end(), isa) != isas.end()) continue;
    const double x = 1.0;
    EXPECT_THROW(squared_l2(isa, &x, &x, 1), std::invalid_argument);
  }
}

TEST(Simd, IsaNames) {
  EXPECT_EQ(isa_name(Isa::scalar), "scalar");
  EXPECT_EQ(isa_name(Isa::avx2), "avx2");
  EXPECT_EQ(isa_name(Isa::neon), "neon");
}

}  // namespace
}  // namespace kdml::simd
