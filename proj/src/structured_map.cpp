#include "rome/structured_map.hpp"

#include <string>

namespace rome {

void StructuredMap::validate() const {
  if (src.size() != d || sign.size() != d) throw DimensionError("structured map arrays do not match its width");
  std::vector<bool> seen(d, false);
  for (std::size_t j = 0; j < d; ++j) {
    if (src[j] >= d || seen[src[j]]) throw DimensionError("structured map source indices are not a permutation");
    seen[src[j]] = true;
    if (sign[j] != 1 && sign[j] != -1) throw DimensionError("structured map signs must be +1 or -1");
  }
}

namespace {

// x_new = [-x[h:], x[:h]] on [offset, offset + w)
void half_block(StructuredMap& m, std::size_t offset, std::size_t w) {
  const std::size_t h = w / 2;
  for (std::size_t j = 0; j < w; ++j) {
    m.src[offset + j] = offset + (j < h ? j + h : j - h);
    m.sign[offset + j] = j < h ? -1 : 1;
  }
}

void interleave_block(StructuredMap& m, std::size_t offset, std::size_t w) {
  for (std::size_t j = 0; j < w; ++j) {
    const bool even = j % 2 == 0;
    m.src[offset + j] = offset + (even ? j + 1 : j - 1);
    m.sign[offset + j] = even ? -1 : 1;
  }
}

StructuredMap empty_map(PairingMode mode, std::span<const std::size_t> dims) {
  StructuredMap m;
  m.d = sum_dims(dims);
  m.src.resize(m.d);
  m.sign.resize(m.d);
  m.mode = mode;
  m.dims.assign(dims.begin(), dims.end());
  return m;
}

}  // namespace

StructuredMap build_m(PairingMode mode, std::span<const std::size_t> dims, SignConvention convention) {
  if (mode == PairingMode::interleave_half) {
    throw DimensionError("interleave-half has no single M; use build_extension_maps");
  }
  validate_dims(mode, dims);
  StructuredMap m = empty_map(mode, dims);
  std::size_t offset = 0;
  for (std::size_t w : dims) {
    switch (mode) {
      case PairingMode::half: half_block(m, offset, w); break;
      case PairingMode::interleave: interleave_block(m, offset, w); break;
      case PairingMode::quarter:
        half_block(m, offset, w / 2);
        half_block(m, offset + w / 2, w / 2);
        break;
      case PairingMode::interleave_half: break;
    }
    offset += w;
  }
  if (convention == SignConvention::printed) {
    for (auto& s : m.sign) s = static_cast<std::int8_t>(-s);
  }
  return m;
}

StructuredMap build_m(PairingMode mode, std::size_t d, SignConvention convention) {
  return build_m(mode, std::span<const std::size_t>(&d, 1), convention);
}

ExtensionMaps build_extension_maps(std::span<const std::size_t> dims) {
  validate_dims(PairingMode::interleave_half, dims);
  ExtensionMaps ext{empty_map(PairingMode::interleave_half, dims), empty_map(PairingMode::interleave_half, dims)};
  std::size_t offset = 0;
  for (std::size_t w : dims) {
    const std::size_t h = w / 2;
    for (std::size_t j = 0; j < w; ++j) {
      const bool first = j < h;
      ext.m1.src[offset + j] = offset + (first ? 2 * j : 2 * (j - h) + 1);
      ext.m1.sign[offset + j] = 1;
      ext.m2.src[offset + j] = offset + (first ? 2 * j + 1 : 2 * (j - h));
      ext.m2.sign[offset + j] = first ? -1 : 1;
    }
    offset += w;
  }
  return ext;
}

ExtensionMaps build_extension_maps(std::size_t d) {
  return build_extension_maps(std::span<const std::size_t>(&d, 1));
}

StructuredMap transpose(const StructuredMap& map) {
  StructuredMap t = map;
  for (std::size_t j = 0; j < map.d; ++j) {
    t.src[map.src[j]] = j;
    t.sign[map.src[j]] = map.sign[j];
  }
  return t;
}

StructuredMap compose(const StructuredMap& a, const StructuredMap& b) {
  if (a.d != b.d) throw DimensionError("cannot compose maps of different widths");
  StructuredMap c = a;
  for (std::size_t j = 0; j < a.d; ++j) {
    c.src[j] = b.src[a.src[j]];
    c.sign[j] = static_cast<std::int8_t>(a.sign[j] * b.sign[a.src[j]]);
  }
  return c;
}

}  // namespace rome
