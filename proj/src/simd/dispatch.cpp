#include <atomic>
#include <cstdlib>
#include <string>

#include "mvembed/common.hpp"
#include "mvembed/simd/kernels.hpp"

namespace mvembed::simd {

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(MVEMBED_HAVE_AVX2)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(MVEMBED_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& kernels_for(Isa isa) {
  if (!supported(isa)) throw UsageError("SIMD variant '" + std::string(name(isa)) + "' not available here");
  switch (isa) {
#if defined(MVEMBED_HAVE_AVX2)
    case Isa::avx2:
      return detail::avx2_table;
#endif
#if defined(MVEMBED_HAVE_NEON)
    case Isa::neon:
      return detail::neon_table;
#endif
    default:
      return detail::scalar_table;
  }
}

Isa preferred_isa() {
  if (const char* env = std::getenv("MVEMBED_SIMD")) {
    std::string_view want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == name(isa) && supported(isa)) return isa;
    }
  }
  if (supported(Isa::avx2)) return Isa::avx2;
  if (supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

namespace {
std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{&kernels_for(preferred_isa())};
  return table;
}
}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_relaxed); }

void set_active(Isa isa) { slot().store(&kernels_for(isa), std::memory_order_relaxed); }

}  // namespace mvembed::simd
