#pragma once

// Dense per-(edge, capacity) arithmetic used on every fitness evaluation.
//
// Each kernel has a scalar reference and, where the build and CPU allow, an
// AVX2 variant chosen once at runtime. Reductions accumulate in four
// interleaved partial sums (lane i takes elements i, i+4, ...) combined as
// (s0 + s1) + (s2 + s3), followed by a sequential tail. The scalar reference
// follows the same order, so all variants return bit-identical results.

#include <cstddef>
#include <cstdint>
#include <span>

namespace mcfcnf::simd {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  const char* name;
  // out[i] = fixed[i] / scale[i] + variable[i]. An infinite scale gives
  // exactly variable[i].
  void (*scaled_unit_costs)(const double* fixed, const double* variable,
                            const double* scale, double* out, std::size_t n);
  // z[i] = flow[i] > tol; returns sum of fixed[i] * z[i] + variable[i] * flow[i].
  double (*true_cost)(const double* fixed, const double* variable,
                      const double* flow, double tol, std::uint8_t* z,
                      std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_kernels();

bool cpu_has_avx2();

// Best table for this CPU, resolved on first use. Setting the environment
// variable MCFCNF_SIMD=scalar pins the reference kernels.
const KernelTable& active();

void scaled_unit_costs(std::span<const double> fixed,
                       std::span<const double> variable,
                       std::span<const double> scale, std::span<double> out);

double true_cost(std::span<const double> fixed, std::span<const double> variable,
                 std::span<const double> flow, double tol,
                 std::span<std::uint8_t> z);

double dot(std::span<const double> x, std::span<const double> y);

}  // namespace mcfcnf::simd
