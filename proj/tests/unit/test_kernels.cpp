#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <vector>

#include "doctest.h"
#include "mcfcnf/common.hpp"
#include "mcfcnf/simd/kernels.hpp"

using namespace mcfcnf;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

struct Arrays {
  std::vector<double> fixed, variable, scale, flow;
};

Arrays random_arrays(Rng& rng, std::size_t n) {
  Arrays a;
  for (std::size_t i = 0; i < n; ++i) {
    a.fixed.push_back(rng.below(4) == 0 ? 0.0 : rng.uniform(0.0, 1000.0));
    a.variable.push_back(rng.uniform(0.0, 10.0));
    const std::size_t pick = rng.below(5);
    a.scale.push_back(pick == 0 ? std::numeric_limits<double>::infinity()
                                : pick == 1 ? 1e-6 : rng.uniform(1e-6, 50.0));
    // Mix exact zeros, values at the threshold and ordinary flows.
    const std::size_t f = rng.below(4);
    a.flow.push_back(f == 0 ? 0.0 : f == 1 ? 1e-9 : rng.uniform(0.0, 20.0));
  }
  return a;
}

}  // namespace

TEST_CASE("scalar kernels compute the reference formulas") {
  const auto& k = simd::scalar_kernels();
  const std::vector<double> fixed{6, 2, 0, 4, 1};
  const std::vector<double> variable{0.5, 1, 3, 0, 2};
  const std::vector<double> scale{2, 1, 7, std::numeric_limits<double>::infinity(), 0.5};
  std::vector<double> out(5);
  k.scaled_unit_costs(fixed.data(), variable.data(), scale.data(), out.data(), out.size());
  CHECK(out == std::vector<double>{3.5, 3.0, 3.0, 0.0, 4.0});

  const std::vector<double> flow{1, 0, 1e-9, 2, 3};
  std::vector<std::uint8_t> z(5);
  const double cost = k.true_cost(fixed.data(), variable.data(), flow.data(), 1e-9, z.data(), 5);
  CHECK(z == std::vector<std::uint8_t>{1, 0, 0, 1, 1});
  // (6 + 0.5) + 0 + 3e-9 + (4 + 0) + (1 + 6)
  CHECK(cost == doctest::Approx(17.5 + 3e-9).epsilon(1e-15));
  CHECK(k.dot(fixed.data(), flow.data(), 5) == doctest::Approx(6 + 0 + 0 + 8 + 3));
}

TEST_CASE("infinite scale removes the fixed cost exactly") {
  const std::vector<double> fixed{123.456};
  const std::vector<double> variable{0.1};
  const std::vector<double> scale{std::numeric_limits<double>::infinity()};
  std::vector<double> out(1);
  simd::scaled_unit_costs(fixed, variable, scale, out);
  CHECK(same_bits(out[0], 0.1));
}

TEST_CASE("every compiled variant matches the scalar reference bit for bit") {
  const simd::KernelTable* avx2 = simd::avx2_kernels();
  if (avx2 == nullptr || !simd::cpu_has_avx2()) {
    MESSAGE("AVX2 variant unavailable on this build or CPU; nothing to compare");
    return;
  }
  const auto& ref = simd::scalar_kernels();
  Rng rng(2024);
  for (std::size_t n = 0; n <= 67; ++n) {
    for (int rep = 0; rep < 8; ++rep) {
      const Arrays a = random_arrays(rng, n);
      std::vector<double> out_ref(n), out_simd(n);
      ref.scaled_unit_costs(a.fixed.data(), a.variable.data(), a.scale.data(), out_ref.data(), n);
      avx2->scaled_unit_costs(a.fixed.data(), a.variable.data(), a.scale.data(), out_simd.data(), n);
      for (std::size_t i = 0; i < n; ++i) REQUIRE(same_bits(out_ref[i], out_simd[i]));

      std::vector<std::uint8_t> z_ref(n), z_simd(n);
      const double c_ref =
          ref.true_cost(a.fixed.data(), a.variable.data(), a.flow.data(), 1e-9, z_ref.data(), n);
      const double c_simd =
          avx2->true_cost(a.fixed.data(), a.variable.data(), a.flow.data(), 1e-9, z_simd.data(), n);
      REQUIRE(z_ref == z_simd);
      REQUIRE(same_bits(c_ref, c_simd));

      REQUIRE(same_bits(ref.dot(a.variable.data(), a.flow.data(), n),
                        avx2->dot(a.variable.data(), a.flow.data(), n)));
      REQUIRE(same_bits(ref.dot(a.fixed.data(), a.flow.data(), n),
                        avx2->dot(a.fixed.data(), a.flow.data(), n)));
    }
  }
}

TEST_CASE("dispatch picks the widest variant the CPU supports") {
  const auto& active = simd::active();
  if (std::getenv("MCFCNF_SIMD") != nullptr) return;
  if (simd::avx2_kernels() != nullptr && simd::cpu_has_avx2()) {
    CHECK(active.isa == simd::Isa::kAvx2);
  } else {
    CHECK(active.isa == simd::Isa::kScalar);
  }
}

TEST_CASE("span wrappers reject mismatched lengths") {
  std::vector<double> a(3), b(4), out(3);
  CHECK_THROWS_AS(simd::scaled_unit_costs(a, a, b, out), std::invalid_argument);
  CHECK_THROWS_AS(simd::dot(a, b), std::invalid_argument);
}
