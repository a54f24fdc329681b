#pragma once

#include <span>
#include <vector>

namespace rome {

/// out[j] = a[j] * b[j] + c[j] * d[j] in one pass. Uses one fused multiply-add
/// per element when the build targets hardware FMA (see has_hardware_fma()).
template <typename T>
void mul_add_mul(std::span<const T> a, std::span<const T> b, std::span<const T> c, std::span<const T> d,
                 std::span<T> out);

template <typename T>
std::vector<T> mul_add_mul(std::span<const T> a, std::span<const T> b, std::span<const T> c,
                           std::span<const T> d);

/// The same arithmetic as three separate passes (mul, mul, add) with
/// materialized temporaries. Comparison baseline for the fused kernel.
template <typename T>
std::vector<T> mul_add_mul_unfused(std::span<const T> a, std::span<const T> b, std::span<const T> c,
                                   std::span<const T> d);

bool has_hardware_fma() noexcept;

}  // namespace rome
