#include "mcfcnf/simd/kernels.hpp"

namespace mcfcnf::simd {
namespace {

void scaled_unit_costs_scalar(const double* fixed, const double* variable,
                              const double* scale, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = fixed[i] / scale[i] + variable[i];
}

double true_cost_scalar(const double* fixed, const double* variable,
                        const double* flow, double tol, std::uint8_t* z,
                        std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const bool used = flow[i + l] > tol;
      z[i + l] = used ? 1 : 0;
      lane[l] += (used ? fixed[i + l] : 0.0) + variable[i + l] * flow[i + l];
    }
  }
  double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) {
    const bool used = flow[i] > tol;
    z[i] = used ? 1 : 0;
    sum += (used ? fixed[i] : 0.0) + variable[i] * flow[i];
  }
  return sum;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) lane[l] += x[i + l] * y[i + l];
  }
  double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::kScalar, "scalar", &scaled_unit_costs_scalar,
                                 &true_cost_scalar, &dot_scalar};
  return table;
}

}  // namespace mcfcnf::simd
