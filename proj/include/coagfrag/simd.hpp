#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

// Data-parallel inner loops of the operator and the integrator.
//
// Every variant accumulates each output element in the same order as the
// scalar reference and never fuses multiply-adds, so all variants produce
// bit-identical results. The vector width is spent across independent output
// rows, not inside a single reduction.

namespace coagfrag::simd {

enum class Isa { scalar, avx2, neon };

std::string_view name(Isa isa);

struct KernelTable {
  Isa isa;

  /// y[i] = sum_j a[j * ld + i] * x[j] for i < rows, j ascending.
  /// `a` is column-major with leading dimension ld >= rows.
  void (*matvec)(const double* a, std::size_t ld, std::size_t rows, std::size_t cols,
                 const double* x, double* y);

  /// out[i] = a[i] * b[i]
  void (*hadamard)(const double* a, const double* b, double* out, std::size_t n);

  /// out[i] = x[i] + c * y[i]
  void (*axpy)(const double* x, double c, const double* y, double* out, std::size_t n);

  /// out[i] = g[i] + c * (((k1[i] + 2 k2[i]) + 2 k3[i]) + k4[i])
  void (*rk4_combine)(const double* g, double c, const double* k1, const double* k2,
                      const double* k3, const double* k4, double* out, std::size_t n);
};

bool supported(Isa isa);

/// Throws std::invalid_argument for an ISA this build or CPU cannot run.
const KernelTable& table(Isa isa);

/// Picks the widest supported ISA on first use. The environment variable
/// COAGFRAG_ISA (scalar, avx2, neon) overrides the choice.
const KernelTable& active();

/// Pins the active table, mainly for equivalence tests.
void force(Isa isa);

std::vector<Isa> available();

namespace detail {
const KernelTable& scalar_table();
#if defined(COAGFRAG_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(COAGFRAG_HAVE_NEON)
const KernelTable& neon_table();
#endif
}  // namespace detail

}  // namespace coagfrag::simd
