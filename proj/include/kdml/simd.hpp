#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace kdml::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

// Instruction sets compiled into this build AND supported by the running CPU.
// Always contains Isa::scalar.
std::vector<Isa> available_isas();

// Isa picked for the dispatched entry points below. Chosen once, at first use:
// the widest available ISA unless the KDML_SIMD environment variable names
// another available one ("scalar", "avx2", "neon").
Isa active_isa();

double squared_l2(const double* a, const double* b, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);

inline double squared_l2(std::span<const double> a, std::span<const double> b) {
  return squared_l2(a.data(), b.data(), a.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  return dot(a.data(), b.data(), a.size());
}

// Explicit-variant entry points, used by equivalence tests and benchmarks.
// Throws std::invalid_argument when `isa` is not available.
double squared_l2(Isa isa, const double* a, const double* b, std::size_t n);
double dot(Isa isa, const double* a, const double* b, std::size_t n);

namespace detail {
using BinaryReduce = double (*)(const double*, const double*, std::size_t);

struct KernelTable {
  BinaryReduce squared_l2;
  BinaryReduce dot;
};

const KernelTable& scalar_table();
#if defined(KDML_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(KDML_HAVE_NEON)
const KernelTable& neon_table();
#endif
}  // namespace detail

}  // namespace kdml::simd
