#include "pcglasso/kernels.hpp"

#include <cmath>

namespace pcglasso::kernels::detail {
namespace {

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
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
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i] - y[i]);
  return s;
}

void hadamard(const double* x, const double* y, double scale, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = scale * x[i] * y[i];
}

}  // namespace

const Table scalar_table{Isa::scalar, dot, axpy, gemv, l1_distance, hadamard};

}  // namespace pcglasso::kernels::detail
