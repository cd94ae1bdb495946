#include "coagfrag/simd.hpp"

namespace coagfrag::simd::detail {

namespace {

void matvec(const double* a, std::size_t ld, std::size_t rows, std::size_t cols,
            const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    const double xj = x[j];
    const double* col = a + j * ld;
    for (std::size_t i = 0; i < rows; ++i) {
      const double p = col[i] * xj;
      y[i] = y[i] + p;
    }
  }
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(const double* x, double c, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double p = c * y[i];
    out[i] = x[i] + p;
  }
}

void rk4_combine(const double* g, double c, const double* k1, const double* k2, const double* k3,
                 const double* k4, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = k1[i] + 2.0 * k2[i];
    s = s + 2.0 * k3[i];
    s = s + k4[i];
    const double p = c * s;
    out[i] = g[i] + p;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{Isa::scalar, matvec, hadamard, axpy, rk4_combine};
  return t;
}

}  // namespace coagfrag::simd::detail
