#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rome/tensor.hpp"

namespace rome {

/// Which sign the rotated partner carries.
///   reference: M x matches the split/rotate/merge recipes, [-x2, x1] (default)
///   printed:   the negated matrix, [x2, -x1]
enum class SignConvention { reference, printed };

/// Signed permutation M stored as a gather: (M x)[j] = sign[j] * x[src[j]].
struct StructuredMap {
  std::size_t d = 0;
  std::vector<std::size_t> src;
  std::vector<std::int8_t> sign;
  // provenance, checked against angle tables before use
  PairingMode mode = PairingMode::interleave;
  std::vector<std::size_t> dims;

  /// Throws DimensionError unless src is a permutation of 0..d-1 and every
  /// sign is +1 or -1.
  void validate() const;
  bool operator==(const StructuredMap&) const = default;
};

/// M1 regroups each block to [evens, odds]; M2 = M_half * M1.
struct ExtensionMaps {
  StructuredMap m1;
  StructuredMap m2;

  std::size_t width() const { return m1.d; }
};

/// Block-diagonal diag(M_1 .. M_n) with one per-mode generator per sub-dimension.
/// interleave-half has no single M and is rejected; see build_extension_maps.
StructuredMap build_m(PairingMode mode, std::span<const std::size_t> dims,
                      SignConvention convention = SignConvention::reference);
StructuredMap build_m(PairingMode mode, std::size_t d, SignConvention convention = SignConvention::reference);

ExtensionMaps build_extension_maps(std::span<const std::size_t> dims);
ExtensionMaps build_extension_maps(std::size_t d);

/// M^T, again a signed permutation.
StructuredMap transpose(const StructuredMap& map);

/// (a * b) x = a (b x).
StructuredMap compose(const StructuredMap& a, const StructuredMap& b);

}  // namespace rome
