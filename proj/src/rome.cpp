#include "rome/rome.hpp"

#include <string>
#include <vector>

#include "kernels.hpp"

namespace rome {

namespace {

template <typename T>
void check_table(const Tensor<T>& x, const AngleTable<T>& angles, std::size_t map_width) {
  if (x.rank() < 2) throw DimensionError("expected a tensor of rank >= 2 ([..., S, D])");
  if (x.width() != map_width) {
    throw DimensionError("map width " + std::to_string(map_width) + " does not match feature width " +
                         std::to_string(x.width()));
  }
  if (angles.width != x.width()) {
    throw DimensionError("angle table width " + std::to_string(angles.width) + " does not match feature width " +
                         std::to_string(x.width()));
  }
  if (angles.seq_len != x.seq_len()) {
    throw DimensionError("angle table has " + std::to_string(angles.seq_len) + " positions, tensor has " +
                         std::to_string(x.seq_len()));
  }
}

template <typename T>
void check_ext_inputs(const Tensor<T>& x, const AngleTable<T>& angles, const ExtensionMaps& ext) {
  check_table(x, angles, ext.width());
  if (angles.mode != PairingMode::interleave_half) {
    throw DimensionError("extension maps need an interleave-half angle table, got " +
                         std::string(to_string(angles.mode)));
  }
  if (angles.dims != ext.m1.dims) throw DimensionError("angle table blocks do not match the extension maps");
}

template <typename T>
void prepare_out(const Tensor<T>& x, Tensor<T>& out) {
  if (out.shape() != x.shape()) out = Tensor<T>(x.shape());
}

}  // namespace

template <typename T>
void check_rome_inputs(const Tensor<T>& x, const AngleTable<T>& angles, const StructuredMap& map) {
  check_table(x, angles, map.d);
  if (angles.mode != map.mode) {
    throw DimensionError("angle table expanded for " + std::string(to_string(angles.mode)) + " but map built for " +
                         std::string(to_string(map.mode)));
  }
  // interleave expansion does not depend on the block split
  if (map.mode != PairingMode::interleave && angles.dims != map.dims) {
    throw DimensionError("angle table blocks do not match the map's sub-dimensions");
  }
}

template <typename T>
void apply_structured_row(const StructuredMap& map, std::span<const T> in, std::span<T> out) {
  const std::size_t* src = map.src.data();
  const std::int8_t* sign = map.sign.data();
  for (std::size_t j = 0; j < map.d; ++j) out[j] = static_cast<T>(sign[j]) * in[src[j]];
}

template <typename T>
Tensor<T> apply_structured(const StructuredMap& map, const Tensor<T>& x) {
  if (x.width() != map.d) {
    throw DimensionError("map width " + std::to_string(map.d) + " does not match feature width " +
                         std::to_string(x.width()));
  }
  Tensor<T> out(x.shape());
  for (std::size_t r = 0; r < x.rows(); ++r) apply_structured_row<T>(map, x.row(r), out.row(r));
  return out;
}

template <typename T>
void rome_forward(const Tensor<T>& x, const AngleTable<T>& angles, const StructuredMap& map, ApplyPath path,
                  Tensor<T>& out) {
  check_rome_inputs(x, angles, map);
  if (path == ApplyPath::matmul) {
    rome_forward_matmul(x, angles, map, densify<T>(map), out);
    return;
  }
  prepare_out(x, out);
  const std::size_t d = x.width();
  const std::size_t seq = angles.seq_len;
  std::vector<T> x_new(d);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const std::size_t s = r % seq;
    const auto xr = x.row(r);
    apply_structured_row<T>(map, xr, x_new);
    detail::mul_add_mul_kernel(angles.cos_row(s).data(), xr.data(), angles.sin_row(s).data(), x_new.data(),
                               out.row(r).data(), d);
  }
}

template <typename T>
Tensor<T> rome_forward(const Tensor<T>& x, const AngleTable<T>& angles, const StructuredMap& map,
                       ApplyPath path) {
  Tensor<T> out;
  rome_forward(x, angles, map, path, out);
  return out;
}

template <typename T>
void rome_forward_matmul(const Tensor<T>& x, const AngleTable<T>& angles, const StructuredMap& map,
                         const DenseMatrix<T>& m, Tensor<T>& out) {
  check_rome_inputs(x, angles, map);
  if (m.d != map.d) throw DimensionError("dense matrix width does not match the map");
  prepare_out(x, out);
  const std::size_t d = x.width();
  const std::size_t seq = angles.seq_len;
  std::vector<T> x_new(d);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const std::size_t s = r % seq;
    const auto xr = x.row(r);
    matvec<T>(m, xr, x_new);
    detail::mul_add_mul_kernel(angles.cos_row(s).data(), xr.data(), angles.sin_row(s).data(), x_new.data(),
                               out.row(r).data(), d);
  }
}

template <typename T>
void rome_forward_fused(const Tensor<T>& x, const AngleTable<T>& angles, const StructuredMap& map,
                        Tensor<T>& out) {
  check_rome_inputs(x, angles, map);
  prepare_out(x, out);
  const std::size_t d = x.width();
  const std::size_t seq = angles.seq_len;
  const std::size_t* src = map.src.data();
  const std::int8_t* sign = map.sign.data();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const std::size_t s = r % seq;
    const T* xr = x.row(r).data();
    const T* c = angles.cos_row(s).data();
    const T* sn = angles.sin_row(s).data();
    T* o = out.row(r).data();
    for (std::size_t j = 0; j < d; ++j) o[j] = detail::fmadd(c[j], xr[j], sn[j], static_cast<T>(sign[j]) * xr[src[j]]);
  }
}

template <typename T>
void rome_ext_forward(const Tensor<T>& x, const AngleTable<T>& angles, const ExtensionMaps& ext, ExtForm form,
                      ApplyPath path, Tensor<T>& out) {
  check_ext_inputs(x, angles, ext);
  if (path == ApplyPath::matmul) {
    rome_ext_forward_matmul(x, angles, ext, densify<T>(ext.m1), densify<T>(ext.m2), out);
    return;
  }
  prepare_out(x, out);
  const std::size_t d = x.width();
  const std::size_t seq = angles.seq_len;
  std::vector<T> a(d), b(d);

  if (form == ExtForm::unified) {
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const std::size_t s = r % seq;
      const auto xr = x.row(r);
      apply_structured_row<T>(ext.m1, xr, a);
      apply_structured_row<T>(ext.m2, xr, b);
      detail::mul_add_mul_kernel(angles.cos_row(s).data(), a.data(), angles.sin_row(s).data(), b.data(),
                                 out.row(r).data(), d);
    }
    return;
  }

  // split: per block, x1 = M11 x and x2 = M12 x are the two halves of M1 x
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const std::size_t s = r % seq;
    const T* xr = x.row(r).data();
    const T* c = angles.cos_row(s).data();
    const T* sn = angles.sin_row(s).data();
    T* o = out.row(r).data();
    std::size_t offset = 0;
    for (std::size_t w : ext.m1.dims) {
      const std::size_t h = w / 2;
      T* x1 = a.data();
      T* x2 = b.data();
      for (std::size_t i = 0; i < h; ++i) {
        x1[i] = xr[ext.m1.src[offset + i]];
        x2[i] = xr[ext.m1.src[offset + h + i]];
      }
      for (std::size_t i = 0; i < h; ++i) {
        o[offset + i] = detail::fmadd(c[offset + i], x1[i], sn[offset + i], -x2[i]);
        o[offset + h + i] = detail::fmadd(c[offset + h + i], x2[i], sn[offset + h + i], x1[i]);
      }
      offset += w;
    }
  }
}

template <typename T>
Tensor<T> rome_ext_forward(const Tensor<T>& x, const AngleTable<T>& angles, const ExtensionMaps& ext, ExtForm form,
                           ApplyPath path) {
  Tensor<T> out;
  rome_ext_forward(x, angles, ext, form, path, out);
  return out;
}

template <typename T>
void rome_ext_forward_matmul(const Tensor<T>& x, const AngleTable<T>& angles, const ExtensionMaps& ext,
                             const DenseMatrix<T>& m1, const DenseMatrix<T>& m2, Tensor<T>& out) {
  check_ext_inputs(x, angles, ext);
  if (m1.d != ext.width() || m2.d != ext.width()) throw DimensionError("dense matrix width does not match the maps");
  prepare_out(x, out);
  const std::size_t d = x.width();
  const std::size_t seq = angles.seq_len;
  std::vector<T> a(d), b(d);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const std::size_t s = r % seq;
    const auto xr = x.row(r);
    matvec<T>(m1, xr, a);
    matvec<T>(m2, xr, b);
    detail::mul_add_mul_kernel(angles.cos_row(s).data(), a.data(), angles.sin_row(s).data(), b.data(),
                               out.row(r).data(), d);
  }
}

template <typename T>
void rome_ext_forward_fused(const Tensor<T>& x, const AngleTable<T>& angles, const ExtensionMaps& ext,
                            Tensor<T>& out) {
  check_ext_inputs(x, angles, ext);
  prepare_out(x, out);
  const std::size_t d = x.width();
  const std::size_t seq = angles.seq_len;
  const std::size_t* src1 = ext.m1.src.data();
  const std::size_t* src2 = ext.m2.src.data();
  const std::int8_t* sign2 = ext.m2.sign.data();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const std::size_t s = r % seq;
    const T* xr = x.row(r).data();
    const T* c = angles.cos_row(s).data();
    const T* sn = angles.sin_row(s).data();
    T* o = out.row(r).data();
    for (std::size_t j = 0; j < d; ++j) {
      o[j] = detail::fmadd(c[j], xr[src1[j]], sn[j], static_cast<T>(sign2[j]) * xr[src2[j]]);
    }
  }
}

template <typename T>
Tensor<T> rome_backward(const Tensor<T>& g, const AngleTable<T>& angles, const StructuredMap& map) {
  check_rome_inputs(g, angles, map);
  const StructuredMap mt = transpose(map);
  Tensor<T> out(g.shape());
  const std::size_t d = g.width();
  const std::size_t seq = angles.seq_len;
  std::vector<T> sg(d), back(d);
  const std::vector<T> ones(d, T{1});
  for (std::size_t r = 0; r < g.rows(); ++r) {
    const std::size_t s = r % seq;
    const auto gr = g.row(r);
    const auto sn = angles.sin_row(s);
    for (std::size_t j = 0; j < d; ++j) sg[j] = sn[j] * gr[j];
    apply_structured_row<T>(mt, sg, back);
    detail::mul_add_mul_kernel(angles.cos_row(s).data(), gr.data(), ones.data(), back.data(), out.row(r).data(), d);
  }
  return out;
}

#define ROME_INSTANTIATE(T)                                                                                       \
  template void check_rome_inputs<T>(const Tensor<T>&, const AngleTable<T>&, const StructuredMap&);               \
  template void apply_structured_row<T>(const StructuredMap&, std::span<const T>, std::span<T>);                 \
  template Tensor<T> apply_structured<T>(const StructuredMap&, const Tensor<T>&);                                 \
  template Tensor<T> rome_forward<T>(const Tensor<T>&, const AngleTable<T>&, const StructuredMap&, ApplyPath);     \
  template void rome_forward<T>(const Tensor<T>&, const AngleTable<T>&, const StructuredMap&, ApplyPath,          \
                                Tensor<T>&);                                                                      \
  template void rome_forward_matmul<T>(const Tensor<T>&, const AngleTable<T>&, const StructuredMap&,              \
                                       const DenseMatrix<T>&, Tensor<T>&);                                        \
  template void rome_forward_fused<T>(const Tensor<T>&, const AngleTable<T>&, const StructuredMap&, Tensor<T>&);  \
  template Tensor<T> rome_ext_forward<T>(const Tensor<T>&, const AngleTable<T>&, const ExtensionMaps&, ExtForm,    \
                                         ApplyPath);                                                              \
  template void rome_ext_forward<T>(const Tensor<T>&, const AngleTable<T>&, const ExtensionMaps&, ExtForm,        \
                                    ApplyPath, Tensor<T>&);                                                       \
  template void rome_ext_forward_matmul<T>(const Tensor<T>&, const AngleTable<T>&, const ExtensionMaps&,          \
                                           const DenseMatrix<T>&, const DenseMatrix<T>&, Tensor<T>&);             \
  template void rome_ext_forward_fused<T>(const Tensor<T>&, const AngleTable<T>&, const ExtensionMaps&,           \
                                          Tensor<T>&);                                                            \
  template Tensor<T> rome_backward<T>(const Tensor<T>&, const AngleTable<T>&, const StructuredMap&);

ROME_INSTANTIATE(float)
ROME_INSTANTIATE(double)
#undef ROME_INSTANTIATE

}  // namespace rome
