#pragma once

// Dense double-precision inner loops used by the D- and R-solvers.
//
// Every kernel has a scalar reference implementation; SIMD variants (AVX2+FMA
// on x86-64, NEON on AArch64) are selected once at runtime from CPU feature
// detection. The PCGLASSO_SIMD environment variable (scalar|avx2|neon|auto)
// overrides the choice. SIMD variants may differ from the reference in the
// last bits because of reassociation; tests bound that difference.

#include <cstddef>
#include <span>
#include <string_view>

namespace pcglasso::kernels {

enum class Isa { scalar, avx2, neon };

struct Table {
  Isa isa;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y = A x, A column-major rows x cols with leading dimension lda.
  // Columns whose coefficient x[c] is exactly zero are skipped.
  void (*gemv)(const double* a, std::size_t lda, std::size_t rows, std::size_t cols, const double* x,
               double* y);
  // sum_i |x[i] - y[i]|
  double (*l1_distance)(const double* x, const double* y, std::size_t n);
  // out[i] = scale * x[i] * y[i]
  void (*hadamard)(const double* x, const double* y, double scale, double* out, std::size_t n);
};

bool available(Isa isa);
const Table& table(Isa isa);  // throws std::invalid_argument when unavailable
const Table& active();
std::string_view name(Isa isa);

namespace detail {
extern const Table scalar_table;
#ifdef PCGLASSO_HAVE_AVX2
extern const Table avx2_table;
bool cpu_has_avx2();
#endif
#ifdef PCGLASSO_HAVE_NEON
extern const Table neon_table;
#endif
}  // namespace detail

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}
inline double l1_distance(std::span<const double> x, std::span<const double> y) {
  return active().l1_distance(x.data(), y.data(), x.size());
}

}  // namespace pcglasso::kernels
