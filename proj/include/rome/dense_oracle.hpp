#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rome/structured_map.hpp"
#include "rome/tensor.hpp"

namespace rome {

/// Square row-major matrix. Used as the brute-force reference and for the
/// matrix-product execution path; never on the structured hot path.
template <typename T>
struct DenseMatrix {
  std::size_t d = 0;
  std::vector<T> entries;

  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : d(n), entries(n * n, T{}) {}

  T& at(std::size_t i, std::size_t j) { return entries[i * d + j]; }
  const T& at(std::size_t i, std::size_t j) const { return entries[i * d + j]; }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = T{1};
    return m;
  }

  bool operator==(const DenseMatrix&) const = default;
};

/// Multiply-add tally for cost comparisons that must not depend on wall clock.
struct OpCounter {
  std::uint64_t mul_adds = 0;
};

/// entries[j][src[j]] = sign[j]; every other entry is zero.
template <typename T>
DenseMatrix<T> densify(const StructuredMap& map);

template <typename T>
DenseMatrix<T> matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b);

template <typename T>
DenseMatrix<T> transpose(const DenseMatrix<T>& a);

template <typename T>
DenseMatrix<T> negate(const DenseMatrix<T>& a);

/// out = m * x, plain row-by-row dot products.
template <typename T>
void matvec(const DenseMatrix<T>& m, std::span<const T> x, std::span<T> out);

/// Rotation R(theta_p) built pair by pair: for a pair (a, b) rotated by t,
/// R[a][a] = R[b][b] = cos t, R[a][b] = -sin t, R[b][a] = sin t.
/// interleave-half returns R_half * P, P the evens-first regrouping of each
/// block, so R x lands in the regrouped basis like the reference recipe.
DenseMatrix<double> build_r(std::span<const double> theta_row, PairingMode mode,
                            std::span<const std::size_t> dims);

/// R = diag(cos_d) + diag(sin_d) * M, the matrix form of the RoME update.
DenseMatrix<double> build_r(std::span<const double> cos_row, std::span<const double> sin_row,
                            const StructuredMap& map);

/// out[r] = R(thetas[r % S]) x[r], always in double. thetas is S x D/2.
template <typename T>
Tensor<double> oracle_forward(const Tensor<T>& x, std::span<const double> thetas, PairingMode mode,
                              std::span<const std::size_t> dims, OpCounter* counter = nullptr);

/// Determinant by partial-pivot LU. Intended for small d only.
double determinant(DenseMatrix<double> m);

}  // namespace rome
