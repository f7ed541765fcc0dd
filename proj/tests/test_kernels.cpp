#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "pcglasso/kernels.hpp"

using namespace pcglasso;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<kernels::Isa> simd_isas() {
  std::vector<kernels::Isa> out;
  for (auto isa : {kernels::Isa::avx2, kernels::Isa::neon})
    if (kernels::available(isa)) out.push_back(isa);
  return out;
}

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(kernels::available(kernels::Isa::scalar));
  CHECK(kernels::table(kernels::Isa::scalar).isa == kernels::Isa::scalar);
  CHECK(kernels::name(kernels::Isa::scalar) == "scalar");
}

TEST_CASE("scalar kernels match the textbook loops") {
  std::mt19937_64 rng(3);
  const auto& k = kernels::table(kernels::Isa::scalar);
  for (std::size_t n : {0u, 1u, 3u, 17u}) {
    auto x = random_vec(n, rng), y = random_vec(n, rng);
    double dot = 0, l1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dot += x[i] * y[i];
      l1 += std::fabs(x[i] - y[i]);
    }
    CHECK(k.dot(x.data(), y.data(), n) == doctest::Approx(dot).epsilon(1e-14));
    CHECK(k.l1_distance(x.data(), y.data(), n) == doctest::Approx(l1).epsilon(1e-14));
    auto z = y;
    k.axpy(0.5, x.data(), z.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(z[i] == y[i] + 0.5 * x[i]);
    std::vector<double> h(n);
    k.hadamard(x.data(), y.data(), 2.0, h.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(h[i] == 2.0 * x[i] * y[i]);
  }
}

TEST_CASE("gemv skips zero coefficients and honours the leading dimension") {
  const auto& k = kernels::table(kernels::Isa::scalar);
  // 2 x 3 matrix stored with lda = 4.
  std::vector<double> a{1, 2, 99, 99, 3, 4, 99, 99, 5, 6, 99, 99};
  std::vector<double> x{1, 0, -1}, y(2);
  k.gemv(a.data(), 4, 2, 3, x.data(), y.data());
  CHECK(y[0] == -4.0);
  CHECK(y[1] == -4.0);
}

TEST_CASE("SIMD kernels agree with the scalar reference") {
  const auto& ref = kernels::table(kernels::Isa::scalar);
  std::mt19937_64 rng(11);
  for (auto isa : simd_isas()) {
    CAPTURE(kernels::name(isa));
    const auto& k = kernels::table(isa);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 31u, 64u, 101u, 1000u}) {
      CAPTURE(n);
      auto x = random_vec(n, rng), y = random_vec(n, rng);
      const double scale = static_cast<double>(n) + 1.0;
      CHECK(std::fabs(k.dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <= 1e-13 * scale);
      CHECK(std::fabs(k.l1_distance(x.data(), y.data(), n) - ref.l1_distance(x.data(), y.data(), n)) <=
            1e-13 * scale);
      auto z1 = y, z2 = y;
      k.axpy(-1.25, x.data(), z1.data(), n);
      ref.axpy(-1.25, x.data(), z2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(z1[i] - z2[i]) <= 1e-15 * (1 + std::fabs(z2[i])));
      std::vector<double> h1(n), h2(n);
      k.hadamard(x.data(), y.data(), 0.3, h1.data(), n);
      ref.hadamard(x.data(), y.data(), 0.3, h2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(h1[i] - h2[i]) <= 1e-15 * (1 + std::fabs(h2[i])));
    }
    for (std::size_t rows : {1u, 3u, 8u, 13u, 40u}) {
      for (std::size_t cols : {1u, 4u, 9u}) {
        const std::size_t lda = rows + 2;
        auto a = random_vec(lda * cols, rng), x = random_vec(cols, rng);
        x[0] = 0.0;
        std::vector<double> y1(rows), y2(rows);
        k.gemv(a.data(), lda, rows, cols, x.data(), y1.data());
        ref.gemv(a.data(), lda, rows, cols, x.data(), y2.data());
        for (std::size_t i = 0; i < rows; ++i) CHECK(std::fabs(y1[i] - y2[i]) <= 1e-13 * cols);
      }
    }
  }
}

TEST_CASE("unavailable ISA is refused") {
  for (auto isa : {kernels::Isa::avx2, kernels::Isa::neon}) {
    if (!kernels::available(isa)) CHECK_THROWS_AS(kernels::table(isa), std::invalid_argument);
  }
}
