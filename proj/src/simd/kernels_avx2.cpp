#include "mcfcnf/simd/kernels.hpp"

#include <immintrin.h>

namespace mcfcnf::simd {
namespace {

void scaled_unit_costs_avx2(const double* fixed, const double* variable,
                            const double* scale, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(fixed + i);
    const __m256d b = _mm256_loadu_pd(variable + i);
    const __m256d d = _mm256_loadu_pd(scale + i);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_div_pd(a, d), b));
  }
  for (; i < n; ++i) out[i] = fixed[i] / scale[i] + variable[i];
}

double reduce(__m256d acc) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double true_cost_avx2(const double* fixed, const double* variable,
                      const double* flow, double tol, std::uint8_t* z,
                      std::size_t n) {
  const __m256d threshold = _mm256_set1_pd(tol);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(flow + i);
    const __m256d used = _mm256_cmp_pd(g, threshold, _CMP_GT_OQ);
    const __m256d charged = _mm256_and_pd(used, _mm256_loadu_pd(fixed + i));
    const __m256d term =
        _mm256_add_pd(charged, _mm256_mul_pd(_mm256_loadu_pd(variable + i), g));
    acc = _mm256_add_pd(acc, term);
    const int mask = _mm256_movemask_pd(used);
    z[i] = mask & 1;
    z[i + 1] = (mask >> 1) & 1;
    z[i + 2] = (mask >> 2) & 1;
    z[i + 3] = (mask >> 3) & 1;
  }
  double sum = reduce(acc);
  for (; i < n; ++i) {
    const bool used = flow[i] > tol;
    z[i] = used ? 1 : 0;
    sum += (used ? fixed[i] : 0.0) + variable[i] * flow[i];
  }
  return sum;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  double sum = reduce(acc);
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{Isa::kAvx2, "avx2", &scaled_unit_costs_avx2,
                                 &true_cost_avx2, &dot_avx2};
  return &table;
}

}  // namespace mcfcnf::simd
