// Compiled with -mavx2 only; callers reach these through the dispatch table
// after a CPU check. No FMA: mul and add stay separate roundings.

#include <immintrin.h>

#include "coagfrag/simd.hpp"

namespace coagfrag::simd::detail {

namespace {

void matvec(const double* a, std::size_t ld, std::size_t rows, std::size_t cols,
            const double* x, double* y) {
  std::size_t i = 0;
  // 8 rows per pass keeps two accumulators live across the column sweep
  for (; i + 8 <= rows; i += 8) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    for (std::size_t j = 0; j < cols; ++j) {
      const __m256d xj = _mm256_set1_pd(x[j]);
      const double* col = a + j * ld + i;
      acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(col), xj));
      acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(col + 4), xj));
    }
    _mm256_storeu_pd(y + i, acc0);
    _mm256_storeu_pd(y + i + 4, acc1);
  }
  for (; i + 4 <= rows; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < cols; ++j) {
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + j * ld + i), _mm256_set1_pd(x[j])));
    }
    _mm256_storeu_pd(y + i, acc);
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
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(const double* x, double c, const double* y, double* out, std::size_t n) {
  const __m256d cv = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(cv, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(x + i), p));
  }
  for (; i < n; ++i) {
    const double p = c * y[i];
    out[i] = x[i] + p;
  }
}

void rk4_combine(const double* g, double c, const double* k1, const double* k2, const double* k3,
                 const double* k4, double* out, std::size_t n) {
  const __m256d cv = _mm256_set1_pd(c);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s = _mm256_add_pd(_mm256_loadu_pd(k1 + i), _mm256_mul_pd(two, _mm256_loadu_pd(k2 + i)));
    s = _mm256_add_pd(s, _mm256_mul_pd(two, _mm256_loadu_pd(k3 + i)));
    s = _mm256_add_pd(s, _mm256_loadu_pd(k4 + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(g + i), _mm256_mul_pd(cv, s)));
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

const KernelTable& avx2_table() {
  static const KernelTable t{Isa::avx2, matvec, hadamard, axpy, rk4_combine};
  return t;
}

}  // namespace coagfrag::simd::detail
