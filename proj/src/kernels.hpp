#pragma once

#include <cmath>
#include <cstddef>

namespace rome::detail {

// a*b + c*d with a single rounding on the outer add when the target has FMA.
// Every path that promises bit-identical output goes through this one function.
template <typename T>
inline T fmadd(T a, T b, T c, T d) {
#if defined(__FMA__)
  return std::fma(a, b, c * d);
#else
  return a * b + c * d;
#endif
}

template <typename T>
inline void mul_add_mul_kernel(const T* a, const T* b, const T* c, const T* d, T* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) out[j] = fmadd(a[j], b[j], c[j], d[j]);
}

}  // namespace rome::detail
