#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Vector kernels behind the training and evaluation inner loops. Every ISA
// variant implements the same table; the scalar one is the reference.
namespace mvembed::simd {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;
  float (*dot_f32)(const float* a, const float* b, std::size_t n);
  double (*dot_f64)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy_f32)(float alpha, const float* x, float* y, std::size_t n);
  void (*axpy_f64)(double alpha, const double* x, double* y, std::size_t n);
  // y = alpha * x
  void (*scale_f32)(float alpha, const float* x, float* y, std::size_t n);
  void (*scale_f64)(double alpha, const double* x, double* y, std::size_t n);
};

bool supported(Isa isa);
// Highest supported ISA, unless MVEMBED_SIMD=scalar|avx2|neon overrides it.
Isa preferred_isa();
const KernelTable& kernels_for(Isa isa);

// Process-wide selection used by the free functions below.
const KernelTable& active();
void set_active(Isa isa);
std::string_view name(Isa isa);

inline float dot(const float* a, const float* b, std::size_t n) { return active().dot_f32(a, b, n); }
inline double dot(const double* a, const double* b, std::size_t n) { return active().dot_f64(a, b, n); }
inline void axpy(float alpha, const float* x, float* y, std::size_t n) { active().axpy_f32(alpha, x, y, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy_f64(alpha, x, y, n); }
inline void scale(float alpha, const float* x, float* y, std::size_t n) { active().scale_f32(alpha, x, y, n); }
inline void scale(double alpha, const double* x, double* y, std::size_t n) { active().scale_f64(alpha, x, y, n); }

template <class T>
T dot(std::span<const T> a, std::span<const T> b) {
  return dot(a.data(), b.data(), a.size());
}

namespace detail {
extern const KernelTable scalar_table;
#if defined(MVEMBED_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(MVEMBED_HAVE_NEON)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace mvembed::simd
