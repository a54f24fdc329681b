#include "rome/fused.hpp"

#include <string>

#include "kernels.hpp"
#include "rome/tensor.hpp"

namespace rome {

namespace {
void check_lengths(std::size_t a, std::size_t b, std::size_t c, std::size_t d, std::size_t out) {
  if (a != b || a != c || a != d || a != out) {
    throw DimensionError("mul_add_mul operands differ in length (" + std::to_string(a) + ", " + std::to_string(b) +
                         ", " + std::to_string(c) + ", " + std::to_string(d) + " -> " + std::to_string(out) + ")");
  }
}
}  // namespace

template <typename T>
void mul_add_mul(std::span<const T> a, std::span<const T> b, std::span<const T> c, std::span<const T> d,
                 std::span<T> out) {
  check_lengths(a.size(), b.size(), c.size(), d.size(), out.size());
  detail::mul_add_mul_kernel(a.data(), b.data(), c.data(), d.data(), out.data(), out.size());
}

template <typename T>
std::vector<T> mul_add_mul(std::span<const T> a, std::span<const T> b, std::span<const T> c,
                           std::span<const T> d) {
  std::vector<T> out(a.size());
  mul_add_mul<T>(a, b, c, d, std::span<T>(out));
  return out;
}

template <typename T>
std::vector<T> mul_add_mul_unfused(std::span<const T> a, std::span<const T> b, std::span<const T> c,
                                   std::span<const T> d) {
  check_lengths(a.size(), b.size(), c.size(), d.size(), a.size());
  std::vector<T> ab(a.size()), cd(a.size()), out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) ab[j] = a[j] * b[j];
  for (std::size_t j = 0; j < a.size(); ++j) cd[j] = c[j] * d[j];
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = ab[j] + cd[j];
  return out;
}

bool has_hardware_fma() noexcept {
#if defined(__FMA__)
  return true;
#else
  return false;
#endif
}

#define ROME_INSTANTIATE(T)                                                                                  \
  template void mul_add_mul<T>(std::span<const T>, std::span<const T>, std::span<const T>, std::span<const T>, \
                               std::span<T>);                                                                \
  template std::vector<T> mul_add_mul<T>(std::span<const T>, std::span<const T>, std::span<const T>,          \
                                         std::span<const T>);                                                \
  template std::vector<T> mul_add_mul_unfused<T>(std::span<const T>, std::span<const T>, std::span<const T>,  \
                                                 std::span<const T>);

ROME_INSTANTIATE(float)
ROME_INSTANTIATE(double)
#undef ROME_INSTANTIATE

}  // namespace rome
