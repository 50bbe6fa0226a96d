#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kdml/simd.hpp"

namespace kdml::simd {
namespace {

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(KDML_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(KDML_HAVE_NEON)
      return true;  // mandatory on aarch64
#else
      return false;
#endif
  }
  return false;
}

const detail::KernelTable& table_for(Isa isa) {
  switch (isa) {
#if defined(KDML_HAVE_AVX2)
    case Isa::avx2:
      if (cpu_supports(isa)) return detail::avx2_table();
      break;
#endif
#if defined(KDML_HAVE_NEON)
    case Isa::neon:
      return detail::neon_table();
#endif
    case Isa::scalar:
      return detail::scalar_table();
    default:
      break;
  }
  throw std::invalid_argument("simd: instruction set '" + std::string(isa_name(isa)) +
                              "' is not available");
}

Isa choose_isa() {
  const auto isas = available_isas();
  if (const char* forced = std::getenv("KDML_SIMD")) {
    for (Isa isa : isas) {
      if (isa_name(isa) == forced) return isa;
    }
  }
  return isas.back();
}

const detail::KernelTable& active_table() {
  static const detail::KernelTable& table = table_for(active_isa());
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out{Isa::scalar};
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (cpu_supports(isa)) out.push_back(isa);
  }
  return out;
}

Isa active_isa() {
  static const Isa isa = choose_isa();
  return isa;
}

double squared_l2(const double* a, const double* b, std::size_t n) {
  return active_table().squared_l2(a, b, n);
}

double dot(const double* a, const double* b, std::size_t n) {
  return active_table().dot(a, b, n);
}

double squared_l2(Isa isa, const double* a, const double* b, std::size_t n) {
  return table_for(isa).squared_l2(a, b, n);
}

double dot(Isa isa, const double* a, const double* b, std::size_t n) {
  return table_for(isa).dot(a, b, n);
}

}  // namespace kdml::simd
