#pragma once

#include <span>

#include "rome/dense_oracle.hpp"
#include "rome/structured_map.hpp"
#include "rome/tensor.hpp"

namespace rome {

/// How M x is evaluated: signed-permutation gather, or a dense matrix product.
enum class ApplyPath { gather, matmul };

/// RoME-extension evaluation: cos*(M1 x) + sin*(M2 x) in one go, or the
/// half-split form that works on the two contiguous halves of M1 x.
enum class ExtForm { unified, split };

/// out[j] = sign[j] * in[src[j]].
template <typename T>
void apply_structured_row(const StructuredMap& map, std::span<const T> in, std::span<T> out);

template <typename T>
Tensor<T> apply_structured(const StructuredMap& map, const Tensor<T>& x);

/// out = cos_d * x + sin_d * (M x), row by row. x is [..., S, D]; row r uses
/// angle row r % S. The gather path materializes M x for one row at a time and
/// combines with mul_add_mul.
template <typename T>
Tensor<T> rome_forward(const Tensor<T>& x, const AngleTable<T>& angles, const StructuredMap& map,
                       ApplyPath path = ApplyPath::gather);

template <typename T>
void rome_forward(const Tensor<T>& x, const AngleTable<T>& angles, const StructuredMap& map, ApplyPath path,
                  Tensor<T>& out);

/// Matrix-product path with a pre-densified M (construction kept out of timing).
template <typename T>
void rome_forward_matmul(const Tensor<T>& x, const AngleTable<T>& angles, const StructuredMap& map,
                         const DenseMatrix<T>& m, Tensor<T>& out);

/// Single pass with the gather folded into the combine; no x_new row buffer.
/// Bit-identical to the gather path.
template <typename T>
void rome_forward_fused(const Tensor<T>& x, const AngleTable<T>& angles, const StructuredMap& map,
                        Tensor<T>& out);

/// Interleave-half: cos_d * (M1 x) + sin_d * (M2 x). Output is in the
/// evens-first basis, matching rope_reference(interleave-half).
template <typename T>
Tensor<T> rome_ext_forward(const Tensor<T>& x, const AngleTable<T>& angles, const ExtensionMaps& ext,
                           ExtForm form = ExtForm::unified, ApplyPath path = ApplyPath::gather);

template <typename T>
void rome_ext_forward(const Tensor<T>& x, const AngleTable<T>& angles, const ExtensionMaps& ext, ExtForm form,
                      ApplyPath path, Tensor<T>& out);

template <typename T>
void rome_ext_forward_matmul(const Tensor<T>& x, const AngleTable<T>& angles, const ExtensionMaps& ext,
                             const DenseMatrix<T>& m1, const DenseMatrix<T>& m2, Tensor<T>& out);

template <typename T>
void rome_ext_forward_fused(const Tensor<T>& x, const AngleTable<T>& angles, const ExtensionMaps& ext,
                            Tensor<T>& out);

/// Gradient of rome_forward w.r.t. x: cos_d * g + M^T (sin_d * g).
template <typename T>
Tensor<T> rome_backward(const Tensor<T>& g, const AngleTable<T>& angles, const StructuredMap& map);

/// Throws DimensionError when x, the angle table and the map disagree on
/// width, sequence length, mode or block layout.
template <typename T>
void check_rome_inputs(const Tensor<T>& x, const AngleTable<T>& angles, const StructuredMap& map);

}  // namespace rome
