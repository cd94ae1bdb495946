#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "coagfrag/simd.hpp"

namespace coagfrag::simd {

namespace {

std::atomic<const KernelTable*> g_active{nullptr};

Isa widest() {
  if (supported(Isa::avx2)) return Isa::avx2;
  if (supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

Isa from_env() {
  const char* env = std::getenv("COAGFRAG_ISA");
  if (env == nullptr || *env == '\0') return widest();
  const std::string v(env);
  if (v == "scalar") return Isa::scalar;
  if (v == "avx2") return Isa::avx2;
  if (v == "neon") return Isa::neon;
  throw std::invalid_argument("COAGFRAG_ISA='" + v + "' is not one of scalar, avx2, neon");
}

}  // namespace

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(COAGFRAG_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(COAGFRAG_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) {
    throw std::invalid_argument("instruction set '" + std::string(name(isa)) +
                                "' not available in this build or on this CPU");
  }
  switch (isa) {
#if defined(COAGFRAG_HAVE_AVX2)
    case Isa::avx2: return detail::avx2_table();
#endif
#if defined(COAGFRAG_HAVE_NEON)
    case Isa::neon: return detail::neon_table();
#endif
    default: return detail::scalar_table();
  }
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = &table(from_env());
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void force(Isa isa) { g_active.store(&table(isa), std::memory_order_release); }

std::vector<Isa> available() {
  std::vector<Isa> out;
  for (Isa i : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (supported(i)) out.push_back(i);
  }
  return out;
}

}  // namespace coagfrag::simd
