#include "mvembed/simd/kernels.hpp"

namespace mvembed::simd {
namespace {

template <class T>
T dot_scalar(const T* a, const T* b, std::size_t n) {
  T sum = 0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

template <class T>
void axpy_scalar(T alpha, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <class T>
void scale_scalar(T alpha, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = alpha * x[i];
}

}  // namespace

namespace detail {
const KernelTable scalar_table{
    Isa::scalar,
    &dot_scalar<float>,
    &dot_scalar<double>,
    &axpy_scalar<float>,
    &axpy_scalar<double>,
    &scale_scalar<float>,
    &scale_scalar<double>,
};
}  // namespace detail

}  // namespace mvembed::simd
