#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rome {

/// Raised when a width, sub-dimension list or shape is inconsistent with the
/// requested operation.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// How feature dimensions are grouped into rotated 2D pairs.
enum class PairingMode { half, interleave, interleave_half, quarter };

std::string_view to_string(PairingMode mode);
/// Accepts "half", "interleave", "interleave-half" / "interleave_half", "quarter".
PairingMode parse_pairing_mode(std::string_view text);

/// Sub-dimension divisor a block must satisfy for `mode` (4 for quarter, else 2).
std::size_t block_multiple(PairingMode mode);

/// Throws DimensionError unless every d_i is positive, divisible by
/// block_multiple(mode), and the d_i sum to `width` (when width != 0).
void validate_dims(PairingMode mode, std::span<const std::size_t> dims, std::size_t width = 0);

std::size_t sum_dims(std::span<const std::size_t> dims);

/// Dense row-major array. All RoPE operations act on the last axis, so a
/// [B, N, S, D] tensor is B*N independent [S, D] slabs.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);
  Tensor(std::vector<std::size_t> shape, std::vector<T> data);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }

  /// Innermost extent D.
  std::size_t width() const noexcept { return shape_.empty() ? 0 : shape_.back(); }
  /// Second-to-last extent S (1 for rank-1 tensors).
  std::size_t seq_len() const noexcept { return shape_.size() < 2 ? 1 : shape_[shape_.size() - 2]; }
  /// Number of D-wide rows, i.e. size() / width().
  std::size_t rows() const noexcept { return width() == 0 ? 0 : data_.size() / width(); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  std::span<T> row(std::size_t r) noexcept { return {data_.data() + r * width(), width()}; }
  std::span<const T> row(std::size_t r) const noexcept {
    return {data_.data() + r * width(), width()};
  }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  T& at(std::size_t r, std::size_t c) { return data_.at(r * width() + c); }
  const T& at(std::size_t r, std::size_t c) const { return data_.at(r * width() + c); }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<T> data_;
};

/// Converts element precision, keeping the shape.
template <typename To, typename From>
Tensor<To> tensor_cast(const Tensor<From>& src) {
  std::vector<To> out(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) out[i] = static_cast<To>(src[i]);
  return Tensor<To>(src.shape(), std::move(out));
}

/// Rotation base plus the per-axis split of the feature width.
struct FreqSpec {
  double base = 10000.0;
  std::vector<std::size_t> per_axis_dims;

  std::size_t width() const { return sum_dims(per_axis_dims); }
  /// Throws DimensionError for odd/zero sub-dimensions or a non-positive base.
  void validate() const;
};

/// omega_i = base^(-2(i-1)/d), i = 1..d/2.
std::vector<double> frequencies(std::size_t d, double base = 10000.0);

/// Row-major (S x d/2) angle matrix: theta[s][i] = positions[s] * freqs[i].
std::vector<double> angle_table_1d(std::span<const double> positions, std::span<const double> freqs);

/// Per-axis 1D tables concatenated column-wise; result is (S x D/2).
std::vector<double> angle_table_nd(std::span<const std::vector<double>> grids, const FreqSpec& spec);

/// Column j of a width-D expanded table reads theta column angle_column(...).
std::size_t angle_column(PairingMode mode, std::span<const std::size_t> dims, std::size_t j);

/// Cached per-position angles with cos/sin already laid out for `mode`.
/// theta is always kept in double; cos_d/sin_d are rounded once to T.
template <typename T>
struct AngleTable {
  PairingMode mode = PairingMode::interleave;
  std::vector<std::size_t> dims;  // sub-dimension blocks, sum == width
  std::size_t seq_len = 0;
  std::size_t width = 0;
  std::vector<double> theta;  // seq_len x width/2
  std::vector<T> cos_d;       // seq_len x width
  std::vector<T> sin_d;       // seq_len x width

  std::span<const double> theta_row(std::size_t s) const {
    return {theta.data() + s * (width / 2), width / 2};
  }
  std::span<const T> cos_row(std::size_t s) const { return {cos_d.data() + s * width, width}; }
  std::span<const T> sin_row(std::size_t s) const { return {sin_d.data() + s * width, width}; }
};

/// Lays out cos/sin of an (S x D/2) theta matrix to width D for `mode`, block
/// by block over `dims`.
template <typename T>
AngleTable<T> expand_cos_sin(std::vector<double> theta, PairingMode mode, std::vector<std::size_t> dims);

/// 1D convenience: positions -> frequencies(D) -> expanded table.
template <typename T>
AngleTable<T> make_angle_table(std::span<const double> positions, std::size_t width, PairingMode mode,
                               double base = 10000.0);

/// nD convenience: one position grid per axis, one block per sub-dimension.
template <typename T>
AngleTable<T> make_angle_table_nd(std::span<const std::vector<double>> grids, const FreqSpec& spec,
                                  PairingMode mode);

/// Splits an nD table into one 1D table per axis (columns of each block).
template <typename T>
std::vector<AngleTable<T>> split_axes(const AngleTable<T>& table);

/// Positions 0..n-1 (plus an optional shift).
std::vector<double> arange_positions(std::size_t n, double offset = 0.0);

/// Flattened (t, h, w) coordinates of a T x H x W volume, t-major then h then w.
std::vector<std::vector<double>> grid_3d(std::size_t frames, std::size_t height, std::size_t width);
/// Flattened (h, w) coordinates of an H x W image, row-major.
std::vector<std::vector<double>> grid_2d(std::size_t height, std::size_t width);

}  // namespace rome
