#pragma once

#include <span>
#include <vector>

#include "rome/tensor.hpp"

namespace rome {

/// Split/rotate/merge RoPE, written the way framework code does it: every
/// chunk, negation and concatenation lands in a freshly allocated tensor, and
/// the final cos/sin combine runs as separate mul, mul, add passes.
///
/// Output semantics per mode (x_new is the rotated partner):
///   half             x_new = [-x[D/2:], x[:D/2]]
///   interleave       x_new = [-x1, x0, -x3, x2, ...]
///   interleave-half  x is first regrouped to [evens, odds] and the half
///                    recipe applied; the result stays in that regrouped basis
///   quarter          x_new = [-q2, q1, -q4, q3] over the four quarter chunks
///
/// `angles` must be a 1D table expanded for `mode` with width D and one row per
/// sequence position; x may carry any number of leading [B, N] axes.
template <typename T>
Tensor<T> rope_reference(const Tensor<T>& x, const AngleTable<T>& angles, PairingMode mode);

/// Factorized nD RoPE: slice the feature axis into `dims`, run rope_reference on
/// each slab with its own axis table, concatenate.
template <typename T>
Tensor<T> rope_reference_nd(const Tensor<T>& x, std::span<const AngleTable<T>> per_axis_angles,
                            std::span<const std::size_t> dims, PairingMode mode);

}  // namespace rome
