#include "rome/rope_reference.hpp"

#include <string>

namespace rome {
namespace {

// Row-major [rows, w] intermediates. Each helper returns a new buffer.
template <typename T>
struct Slab {
  std::size_t rows = 0;
  std::size_t w = 0;
  std::vector<T> v;

  Slab(std::size_t r, std::size_t cols) : rows(r), w(cols), v(r * cols) {}
  T* row(std::size_t r) { return v.data() + r * w; }
  const T* row(std::size_t r) const { return v.data() + r * w; }
};

template <typename T>
Slab<T> as_slab(const Tensor<T>& x) {
  Slab<T> s(x.rows(), x.width());
  auto src = x.data();
  std::copy(src.begin(), src.end(), s.v.begin());
  return s;
}

// torch.chunk(x, parts, dim=-1)[k]
template <typename T>
Slab<T> chunk(const Slab<T>& x, std::size_t parts, std::size_t k) {
  const std::size_t w = x.w / parts;
  Slab<T> out(x.rows, w);
  for (std::size_t r = 0; r < x.rows; ++r) {
    const T* in = x.row(r) + k * w;
    std::copy(in, in + w, out.row(r));
  }
  return out;
}

// rearrange(x, '... (d j) -> ... d j', j=2) then chunk on j: one column of each pair
template <typename T>
Slab<T> pair_member(const Slab<T>& x, std::size_t member) {
  Slab<T> out(x.rows, x.w / 2);
  for (std::size_t r = 0; r < x.rows; ++r) {
    const T* in = x.row(r);
    T* o = out.row(r);
    for (std::size_t i = 0; i < out.w; ++i) o[i] = in[2 * i + member];
  }
  return out;
}

template <typename T>
Slab<T> negate(const Slab<T>& x) {
  Slab<T> out(x.rows, x.w);
  for (std::size_t i = 0; i < x.v.size(); ++i) out.v[i] = -x.v[i];
  return out;
}

template <typename T>
Slab<T> cat(std::initializer_list<const Slab<T>*> parts) {
  std::size_t w = 0;
  for (const auto* p : parts) w += p->w;
  Slab<T> out(parts.begin()[0]->rows, w);
  for (std::size_t r = 0; r < out.rows; ++r) {
    T* o = out.row(r);
    for (const auto* p : parts) o = std::copy(p->row(r), p->row(r) + p->w, o);
  }
  return out;
}

// cat((a, b), dim=-1) on a trailing pair axis, then flatten(-2)
template <typename T>
Slab<T> cat_pairs_flatten(const Slab<T>& a, const Slab<T>& b) {
  Slab<T> out(a.rows, 2 * a.w);
  for (std::size_t r = 0; r < a.rows; ++r) {
    T* o = out.row(r);
    for (std::size_t i = 0; i < a.w; ++i) {
      o[2 * i] = a.row(r)[i];
      o[2 * i + 1] = b.row(r)[i];
    }
  }
  return out;
}

// x * table, table broadcast over leading axes (row r uses table row r % seq)
template <typename T>
Slab<T> mul_table(const Slab<T>& x, const std::vector<T>& table, std::size_t seq) {
  Slab<T> out(x.rows, x.w);
  for (std::size_t r = 0; r < x.rows; ++r) {
    const T* t = table.data() + (r % seq) * x.w;
    const T* in = x.row(r);
    T* o = out.row(r);
    for (std::size_t j = 0; j < x.w; ++j) o[j] = in[j] * t[j];
  }
  return out;
}

template <typename T>
Slab<T> add(const Slab<T>& a, const Slab<T>& b) {
  Slab<T> out(a.rows, a.w);
  for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] + b.v[i];
  return out;
}

template <typename T>
void check_inputs(const Tensor<T>& x, const AngleTable<T>& angles, PairingMode mode) {
  if (x.rank() < 2) throw DimensionError("rope_reference expects a tensor of rank >= 2 ([..., S, D])");
  const std::size_t d = x.width();
  validate_dims(mode, std::span<const std::size_t>(&d, 1));
  if (angles.mode != mode) {
    throw DimensionError("angle table was expanded for " + std::string(to_string(angles.mode)) +
                         " but " + std::string(to_string(mode)) + " was requested");
  }
  if (angles.width != d || angles.dims.size() != 1) {
    throw DimensionError("angle table width " + std::to_string(angles.width) +
                         " does not match a single block of width " + std::to_string(d));
  }
  if (angles.seq_len != x.seq_len()) {
    throw DimensionError("angle table has " + std::to_string(angles.seq_len) + " positions, tensor has " +
                         std::to_string(x.seq_len()));
  }
}

}  // namespace

template <typename T>
Tensor<T> rope_reference(const Tensor<T>& x_in, const AngleTable<T>& angles, PairingMode mode) {
  check_inputs(x_in, angles, mode);
  Slab<T> x = as_slab(x_in);
  Slab<T> x_new(0, 0);

  switch (mode) {
    case PairingMode::half: {
      auto x1 = chunk(x, 2, 0);
      auto x2 = chunk(x, 2, 1);
      auto neg = negate(x2);
      x_new = cat({&neg, &x1});
      break;
    }
    case PairingMode::interleave: {
      auto x1 = pair_member(x, 0);
      auto x2 = pair_member(x, 1);
      auto neg = negate(x2);
      x_new = cat_pairs_flatten(neg, x1);
      break;
    }
    case PairingMode::interleave_half: {
      auto x1 = pair_member(x, 0);
      auto x2 = pair_member(x, 1);
      x = cat({&x1, &x2});
      auto neg = negate(x2);
      x_new = cat({&neg, &x1});
      break;
    }
    case PairingMode::quarter: {
      auto q1 = chunk(x, 4, 0);
      auto q2 = chunk(x, 4, 1);
      auto q3 = chunk(x, 4, 2);
      auto q4 = chunk(x, 4, 3);
      auto n2 = negate(q2);
      auto n4 = negate(q4);
      x_new = cat({&n2, &q1, &n4, &q3});
      break;
    }
  }

  auto a = mul_table(x, angles.cos_d, angles.seq_len);
  auto b = mul_table(x_new, angles.sin_d, angles.seq_len);
  auto out = add(a, b);
  return Tensor<T>(x_in.shape(), std::move(out.v));
}

template <typename T>
Tensor<T> rope_reference_nd(const Tensor<T>& x_in, std::span<const AngleTable<T>> per_axis_angles,
                            std::span<const std::size_t> dims, PairingMode mode) {
  if (x_in.rank() < 2) throw DimensionError("rope_reference_nd expects a tensor of rank >= 2");
  validate_dims(mode, dims, x_in.width());
  if (per_axis_angles.size() != dims.size()) {
    throw DimensionError("got " + std::to_string(per_axis_angles.size()) + " axis tables for " +
                         std::to_string(dims.size()) + " sub-dimensions");
  }
  const Slab<T> x = as_slab(x_in);
  std::vector<Slab<T>> rotated;
  rotated.reserve(dims.size());
  std::size_t offset = 0;
  for (std::size_t a = 0; a < dims.size(); ++a) {
    // x[..., offset:offset+d] as its own tensor
    Slab<T> part(x.rows, dims[a]);
    for (std::size_t r = 0; r < x.rows; ++r) std::copy(x.row(r) + offset, x.row(r) + offset + dims[a], part.row(r));
    auto shape = x_in.shape();
    shape.back() = dims[a];
    const auto out = rope_reference(Tensor<T>(shape, std::move(part.v)), per_axis_angles[a], mode);
    Slab<T> s(x.rows, dims[a]);
    std::copy(out.data().begin(), out.data().end(), s.v.begin());
    rotated.push_back(std::move(s));
    offset += dims[a];
  }
  Slab<T> out(x.rows, x.w);
  for (std::size_t r = 0; r < x.rows; ++r) {
    T* o = out.row(r);
    for (const auto& p : rotated) o = std::copy(p.row(r), p.row(r) + p.w, o);
  }
  return Tensor<T>(x_in.shape(), std::move(out.v));
}

template Tensor<float> rope_reference(const Tensor<float>&, const AngleTable<float>&, PairingMode);
template Tensor<double> rope_reference(const Tensor<double>&, const AngleTable<double>&, PairingMode);
template Tensor<float> rope_reference_nd(const Tensor<float>&, std::span<const AngleTable<float>>,
                                         std::span<const std::size_t>, PairingMode);
template Tensor<double> rope_reference_nd(const Tensor<double>&, std::span<const AngleTable<double>>,
                                          std::span<const std::size_t>, PairingMode);

}  // namespace rome
