// AArch64 Advanced SIMD variant. Two doubles per register; vmulq/vaddq keep
// the scalar rounding sequence (no vfmaq).

#include <arm_neon.h>

#include "coagfrag/simd.hpp"

namespace coagfrag::simd::detail {

namespace {

void matvec(const double* a, std::size_t ld, std::size_t rows, std::size_t cols,
            const double* x, double* y) {
  std::size_t i = 0;
  for (; i + 4 <= rows; i += 4) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    for (std::size_t j = 0; j < cols; ++j) {
      const float64x2_t xj = vdupq_n_f64(x[j]);
      const double* col = a + j * ld + i;
      acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(col), xj));
      acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(col + 2), xj));
    }
    vst1q_f64(y + i, acc0);
    vst1q_f64(y + i + 2, acc1);
  }
  for (; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double p = a[j * ld + i] * x[j];
      s = s + p;
    }
    y[i] = s;
  }
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(const double* x, double c, const double* y, double* out, std::size_t n) {
  const float64x2_t cv = vdupq_n_f64(c);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(x + i), vmulq_f64(cv, vld1q_f64(y + i))));
  }
  for (; i < n; ++i) {
    const double p = c * y[i];
    out[i] = x[i] + p;
  }
}

void rk4_combine(const double* g, double c, const double* k1, const double* k2, const double* k3,
                 const double* k4, double* out, std::size_t n) {
  const float64x2_t cv = vdupq_n_f64(c);
  const float64x2_t two = vdupq_n_f64(2.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t s = vaddq_f64(vld1q_f64(k1 + i), vmulq_f64(two, vld1q_f64(k2 + i)));
    s = vaddq_f64(s, vmulq_f64(two, vld1q_f64(k3 + i)));
    s = vaddq_f64(s, vld1q_f64(k4 + i));
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(g + i), vmulq_f64(cv, s)));
  }
  for (; i < n; ++i) {
    double s = k1[i] + 2.0 * k2[i];
    s = s + 2.0 * k3[i];
    s = s + k4[i];
    const double p = c * s;
    out[i] = g[i] + p;
  }
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable t{Isa::neon, matvec, hadamard, axpy, rk4_combine};
  return t;
}

}  // namespace coagfrag::simd::detail
