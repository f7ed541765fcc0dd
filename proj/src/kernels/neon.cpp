// AArch64 always has Advanced SIMD, so no runtime probe is needed.
#include "pcglasso/kernels.hpp"

#include <arm_neon.h>

#include <cmath>

namespace pcglasso::kernels::detail {
namespace {

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void gemv(const double* a, std::size_t lda, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = 0.0;
  for (std::size_t c = 0; c < cols; ++c) {
    const double xc = x[c];
    if (xc == 0.0) continue;
    axpy(xc, a + c * lda, y, rows);
  }
}

double l1_distance(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vabdq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += std::fabs(x[i] - y[i]);
  return s;
}

void hadamard(const double* x, const double* y, double scale, double* out, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(scale);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vmulq_f64(vs, vld1q_f64(x + i)), vld1q_f64(y + i)));
  for (; i < n; ++i) out[i] = scale * x[i] * y[i];
}

}  // namespace

const Table neon_table{Isa::neon, dot, axpy, gemv, l1_distance, hadamard};

}  // namespace pcglasso::kernels::detail
