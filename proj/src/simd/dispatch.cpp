#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "mcfcnf/simd/kernels.hpp"

namespace mcfcnf::simd {

#ifndef MCFCNF_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(MCFCNF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

const KernelTable& select() {
  const char* forced = std::getenv("MCFCNF_SIMD");
  if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_kernels();
  if (const KernelTable* avx2 = avx2_kernels(); avx2 != nullptr && cpu_has_avx2()) {
    return *avx2;
  }
  return scalar_kernels();
}

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("simd kernel: span length mismatch");
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

void scaled_unit_costs(std::span<const double> fixed, std::span<const double> variable,
                       std::span<const double> scale, std::span<double> out) {
  require_same_size(fixed.size(), variable.size());
  require_same_size(fixed.size(), scale.size());
  require_same_size(fixed.size(), out.size());
  active().scaled_unit_costs(fixed.data(), variable.data(), scale.data(), out.data(),
                             out.size());
}

double true_cost(std::span<const double> fixed, std::span<const double> variable,
                 std::span<const double> flow, double tol, std::span<std::uint8_t> z) {
  require_same_size(fixed.size(), variable.size());
  require_same_size(fixed.size(), flow.size());
  require_same_size(fixed.size(), z.size());
  return active().true_cost(fixed.data(), variable.data(), flow.data(), tol, z.data(),
                            z.size());
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_same_size(x.size(), y.size());
  return active().dot(x.data(), y.data(), x.size());
}

}  // namespace mcfcnf::simd
