#include "rome/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>

namespace rome {

std::string_view to_string(PairingMode mode) {
  switch (mode) {
    case PairingMode::half: return "half";
    case PairingMode::interleave: return "interleave";
    case PairingMode::interleave_half: return "interleave-half";
    case PairingMode::quarter: return "quarter";
  }
  return "unknown";
}

PairingMode parse_pairing_mode(std::string_view text) {
  if (text == "half") return PairingMode::half;
  if (text == "interleave") return PairingMode::interleave;
  if (text == "interleave-half" || text == "interleave_half") return PairingMode::interleave_half;
  if (text == "quarter") return PairingMode::quarter;
  throw std::invalid_argument("unknown pairing mode '" + std::string(text) +
                              "' (expected half, interleave, interleave-half or quarter)");
}

std::size_t block_multiple(PairingMode mode) { return mode == PairingMode::quarter ? 4 : 2; }

std::size_t sum_dims(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{0});
}

void validate_dims(PairingMode mode, std::span<const std::size_t> dims, std::size_t width) {
  if (dims.empty()) throw DimensionError("dims must list at least one sub-dimension");
  const std::size_t k = block_multiple(mode);
  for (std::size_t d : dims) {
    if (d == 0 || d % k != 0) {
      throw DimensionError("sub-dimension " + std::to_string(d) + " is not a positive multiple of " +
                           std::to_string(k) + " as " + std::string(to_string(mode)) + " mode requires");
    }
  }
  if (width != 0 && sum_dims(dims) != width) {
    throw DimensionError("sub-dimensions sum to " + std::to_string(sum_dims(dims)) +
                         " but the feature width is " + std::to_string(width));
  }
}

template <typename T>
Tensor<T>::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)),
      data_(std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>{})) {}

template <typename T>
Tensor<T>::Tensor(std::vector<std::size_t> shape, std::vector<T> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  const std::size_t n = std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>{});
  if (n != data_.size()) {
    throw DimensionError("shape holds " + std::to_string(n) + " elements but data has " +
                         std::to_string(data_.size()));
  }
}

void FreqSpec::validate() const {
  if (!(base > 0.0) || !std::isfinite(base)) throw DimensionError("frequency base must be positive");
  validate_dims(PairingMode::half, per_axis_dims);
}

std::vector<double> frequencies(std::size_t d, double base) {
  if (d < 2 || d % 2 != 0) {
    throw DimensionError("frequencies need an even width >= 2, got " + std::to_string(d));
  }
  if (!(base > 0.0)) throw DimensionError("frequency base must be positive");
  std::vector<double> out(d / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::pow(base, -2.0 * static_cast<double>(i) / static_cast<double>(d));
  }
  return out;
}

std::vector<double> angle_table_1d(std::span<const double> positions, std::span<const double> freqs) {
  std::vector<double> out(positions.size() * freqs.size());
  for (std::size_t s = 0; s < positions.size(); ++s) {
    for (std::size_t i = 0; i < freqs.size(); ++i) out[s * freqs.size() + i] = positions[s] * freqs[i];
  }
  return out;
}

std::vector<double> angle_table_nd(std::span<const std::vector<double>> grids, const FreqSpec& spec) {
  spec.validate();
  if (grids.size() != spec.per_axis_dims.size()) {
    throw DimensionError("got " + std::to_string(grids.size()) + " position grids for " +
                         std::to_string(spec.per_axis_dims.size()) + " axes");
  }
  const std::size_t seq = grids.front().size();
  for (const auto& g : grids) {
    if (g.size() != seq) throw DimensionError("position grids differ in length");
  }
  const std::size_t half_width = spec.width() / 2;
  std::vector<double> out(seq * half_width);
  std::size_t col = 0;
  for (std::size_t a = 0; a < grids.size(); ++a) {
    const auto freqs = frequencies(spec.per_axis_dims[a], spec.base);
    const auto block = angle_table_1d(grids[a], freqs);
    for (std::size_t s = 0; s < seq; ++s) {
      for (std::size_t i = 0; i < freqs.size(); ++i) out[s * half_width + col + i] = block[s * freqs.size() + i];
    }
    col += freqs.size();
  }
  return out;
}

std::size_t angle_column(PairingMode mode, std::span<const std::size_t> dims, std::size_t j) {
  std::size_t offset = 0;
  for (std::size_t d : dims) {
    if (j < offset + d) {
      const std::size_t local = j - offset;
      const std::size_t base = offset / 2;
      switch (mode) {
        case PairingMode::interleave: return base + local / 2;
        case PairingMode::half:
        case PairingMode::interleave_half: return base + local % (d / 2);
        case PairingMode::quarter: {
          const std::size_t q = d / 4;
          // two independent half-layouts, one per half of the block
          return base + (local / (2 * q)) * q + local % q;
        }
      }
    }
    offset += d;
  }
  throw DimensionError("column " + std::to_string(j) + " outside the sub-dimension blocks");
}

template <typename T>
AngleTable<T> expand_cos_sin(std::vector<double> theta, PairingMode mode, std::vector<std::size_t> dims) {
  validate_dims(mode, dims);
  AngleTable<T> t;
  t.mode = mode;
  t.width = sum_dims(dims);
  const std::size_t half_width = t.width / 2;
  if (theta.size() % half_width != 0) {
    throw DimensionError("theta has " + std::to_string(theta.size()) + " entries, not a multiple of D/2 = " +
                         std::to_string(half_width));
  }
  t.seq_len = theta.size() / half_width;
  t.dims = std::move(dims);
  t.theta = std::move(theta);

  std::vector<std::size_t> column(t.width);
  for (std::size_t j = 0; j < t.width; ++j) column[j] = angle_column(mode, t.dims, j);

  t.cos_d.resize(t.seq_len * t.width);
  t.sin_d.resize(t.seq_len * t.width);
  for (std::size_t s = 0; s < t.seq_len; ++s) {
    for (std::size_t j = 0; j < t.width; ++j) {
      const double a = t.theta[s * half_width + column[j]];
      t.cos_d[s * t.width + j] = static_cast<T>(std::cos(a));
      t.sin_d[s * t.width + j] = static_cast<T>(std::sin(a));
    }
  }
  return t;
}

template <typename T>
AngleTable<T> make_angle_table(std::span<const double> positions, std::size_t width, PairingMode mode,
                               double base) {
  validate_dims(mode, std::span<const std::size_t>(&width, 1));
  return expand_cos_sin<T>(angle_table_1d(positions, frequencies(width, base)), mode, {width});
}

template <typename T>
AngleTable<T> make_angle_table_nd(std::span<const std::vector<double>> grids, const FreqSpec& spec,
                                  PairingMode mode) {
  validate_dims(mode, spec.per_axis_dims);
  return expand_cos_sin<T>(angle_table_nd(grids, spec), mode, spec.per_axis_dims);
}

template <typename T>
std::vector<AngleTable<T>> split_axes(const AngleTable<T>& table) {
  std::vector<AngleTable<T>> out;
  const std::size_t half_width = table.width / 2;
  std::size_t col = 0;
  for (std::size_t d : table.dims) {
    std::vector<double> theta(table.seq_len * (d / 2));
    for (std::size_t s = 0; s < table.seq_len; ++s) {
      for (std::size_t i = 0; i < d / 2; ++i) theta[s * (d / 2) + i] = table.theta[s * half_width + col + i];
    }
    out.push_back(expand_cos_sin<T>(std::move(theta), table.mode, {d}));
    col += d / 2;
  }
  return out;
}

std::vector<double> arange_positions(std::size_t n, double offset) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(i) + offset;
  return out;
}

std::vector<std::vector<double>> grid_3d(std::size_t frames, std::size_t height, std::size_t width) {
  std::vector<std::vector<double>> g(3);
  for (auto& axis : g) axis.reserve(frames * height * width);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t h = 0; h < height; ++h) {
      for (std::size_t w = 0; w < width; ++w) {
        g[0].push_back(static_cast<double>(t));
        g[1].push_back(static_cast<double>(h));
        g[2].push_back(static_cast<double>(w));
      }
    }
  }
  return g;
}

std::vector<std::vector<double>> grid_2d(std::size_t height, std::size_t width) {
  std::vector<std::vector<double>> g(2);
  for (std::size_t h = 0; h < height; ++h) {
    for (std::size_t w = 0; w < width; ++w) {
      g[0].push_back(static_cast<double>(h));
      g[1].push_back(static_cast<double>(w));
    }
  }
  return g;
}

template class Tensor<float>;
template class Tensor<double>;
template struct AngleTable<float>;
template struct AngleTable<double>;

#define ROME_INSTANTIATE(T)                                                                                   \
  template AngleTable<T> expand_cos_sin<T>(std::vector<double>, PairingMode, std::vector<std::size_t>);       \
  template AngleTable<T> make_angle_table<T>(std::span<const double>, std::size_t, PairingMode, double);      \
  template AngleTable<T> make_angle_table_nd<T>(std::span<const std::vector<double>>, const FreqSpec&,        \
                                                PairingMode);                                                 \
  template std::vector<AngleTable<T>> split_axes<T>(const AngleTable<T>&);

ROME_INSTANTIATE(float)
ROME_INSTANTIATE(double)
#undef ROME_INSTANTIATE

}  // namespace rome
