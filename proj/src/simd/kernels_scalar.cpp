#include "kdml/simd.hpp"

namespace kdml::simd::detail {
namespace {

double squared_l2_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{&squared_l2_scalar, &dot_scalar};
  return table;
}

}  // namespace kdml::simd::detail
