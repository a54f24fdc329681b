#include "rome/dense_oracle.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace rome {

template <typename T>
DenseMatrix<T> densify(const StructuredMap& map) {
  map.validate();
  DenseMatrix<T> m(map.d);
  for (std::size_t j = 0; j < map.d; ++j) m.at(j, map.src[j]) = static_cast<T>(map.sign[j]);
  return m;
}

template <typename T>
DenseMatrix<T> matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.d != b.d) throw DimensionError("matmul of mismatched sizes");
  DenseMatrix<T> c(a.d);
  for (std::size_t i = 0; i < a.d; ++i) {
    for (std::size_t k = 0; k < a.d; ++k) {
      const T aik = a.at(i, k);
      if (aik == T{}) continue;
      for (std::size_t j = 0; j < a.d; ++j) c.at(i, j) += aik * b.at(k, j);
    }
  }
  return c;
}

template <typename T>
DenseMatrix<T> transpose(const DenseMatrix<T>& a) {
  DenseMatrix<T> t(a.d);
  for (std::size_t i = 0; i < a.d; ++i) {
    for (std::size_t j = 0; j < a.d; ++j) t.at(j, i) = a.at(i, j);
  }
  return t;
}

template <typename T>
DenseMatrix<T> negate(const DenseMatrix<T>& a) {
  DenseMatrix<T> n = a;
  for (auto& e : n.entries) e = -e;
  return n;
}

template <typename T>
void matvec(const DenseMatrix<T>& m, std::span<const T> x, std::span<T> out) {
  for (std::size_t i = 0; i < m.d; ++i) {
    const T* row = m.entries.data() + i * m.d;
    T acc{};
    for (std::size_t k = 0; k < m.d; ++k) acc += row[k] * x[k];
    out[i] = acc;
  }
}

namespace {

struct RotPair {
  std::size_t first;
  std::size_t second;
  std::size_t angle;
};

// The 2D subspaces each mode rotates, written out independently of the
// cos/sin expansion used by the fast paths.
std::vector<RotPair> rotation_pairs(PairingMode mode, std::span<const std::size_t> dims) {
  std::vector<RotPair> pairs;
  std::size_t offset = 0;
  for (std::size_t w : dims) {
    const std::size_t angle0 = offset / 2;
    const std::size_t h = w / 2;
    switch (mode) {
      case PairingMode::interleave:
        for (std::size_t i = 0; i < h; ++i) pairs.push_back({offset + 2 * i, offset + 2 * i + 1, angle0 + i});
        break;
      case PairingMode::half:
      case PairingMode::interleave_half:
        for (std::size_t i = 0; i < h; ++i) pairs.push_back({offset + i, offset + h + i, angle0 + i});
        break;
      case PairingMode::quarter: {
        const std::size_t q = w / 4;
        for (std::size_t i = 0; i < q; ++i) pairs.push_back({offset + i, offset + q + i, angle0 + i});
        for (std::size_t i = 0; i < q; ++i) {
          pairs.push_back({offset + h + i, offset + h + q + i, angle0 + q + i});
        }
        break;
      }
    }
    offset += w;
  }
  return pairs;
}

}  // namespace

DenseMatrix<double> build_r(std::span<const double> theta_row, PairingMode mode,
                            std::span<const std::size_t> dims) {
  validate_dims(mode, dims);
  const std::size_t d = sum_dims(dims);
  if (theta_row.size() != d / 2) {
    throw DimensionError("theta row has " + std::to_string(theta_row.size()) + " angles, expected " +
                         std::to_string(d / 2));
  }
  DenseMatrix<double> r(d);
  for (const auto& p : rotation_pairs(mode, dims)) {
    const double c = std::cos(theta_row[p.angle]);
    const double s = std::sin(theta_row[p.angle]);
    r.at(p.first, p.first) = c;
    r.at(p.first, p.second) = -s;
    r.at(p.second, p.first) = s;
    r.at(p.second, p.second) = c;
  }
  if (mode != PairingMode::interleave_half) return r;

  // column j of R_half reads regrouped coordinate j, i.e. original x[from[j]]
  std::vector<std::size_t> from(d);
  std::size_t offset = 0;
  for (std::size_t w : dims) {
    for (std::size_t i = 0; i < w / 2; ++i) {
      from[offset + i] = offset + 2 * i;
      from[offset + w / 2 + i] = offset + 2 * i + 1;
    }
    offset += w;
  }
  DenseMatrix<double> out(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) out.at(i, from[j]) = r.at(i, j);
  }
  return out;
}

DenseMatrix<double> build_r(std::span<const double> cos_row, std::span<const double> sin_row,
                            const StructuredMap& map) {
  if (cos_row.size() != map.d || sin_row.size() != map.d) throw DimensionError("cos/sin rows must match map width");
  auto m = densify<double>(map);
  DenseMatrix<double> r(map.d);
  for (std::size_t i = 0; i < map.d; ++i) {
    for (std::size_t j = 0; j < map.d; ++j) r.at(i, j) = sin_row[i] * m.at(i, j);
    r.at(i, i) += cos_row[i];
  }
  return r;
}

template <typename T>
Tensor<double> oracle_forward(const Tensor<T>& x, std::span<const double> thetas, PairingMode mode,
                              std::span<const std::size_t> dims, OpCounter* counter) {
  const std::size_t d = x.width();
  validate_dims(mode, dims, d);
  const std::size_t seq = x.seq_len();
  if (thetas.size() != seq * (d / 2)) {
    throw DimensionError("theta table holds " + std::to_string(thetas.size()) + " angles, expected S*D/2 = " +
                         std::to_string(seq * (d / 2)));
  }
  Tensor<double> out(x.shape());
  const std::size_t slabs = x.rows() / seq;
  std::vector<double> in_row(d);
  for (std::size_t s = 0; s < seq; ++s) {
    const auto r = build_r(thetas.subspan(s * (d / 2), d / 2), mode, dims);
    for (std::size_t b = 0; b < slabs; ++b) {
      const std::size_t row = b * seq + s;
      const auto xr = x.row(row);
      for (std::size_t k = 0; k < d; ++k) in_row[k] = static_cast<double>(xr[k]);
      auto o = out.row(row);
      for (std::size_t i = 0; i < d; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) acc += r.at(i, k) * in_row[k];
        o[i] = acc;
      }
      if (counter != nullptr) counter->mul_adds += static_cast<std::uint64_t>(d) * d;
    }
  }
  return out;
}

double determinant(DenseMatrix<double> m) {
  const std::size_t n = m.d;
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m.at(r, c)) > std::abs(m.at(pivot, c))) pivot = r;
    }
    if (m.at(pivot, c) == 0.0) return 0.0;
    if (pivot != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m.at(pivot, j), m.at(c, j));
      det = -det;
    }
    det *= m.at(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m.at(r, c) / m.at(c, c);
      for (std::size_t j = c; j < n; ++j) m.at(r, j) -= f * m.at(c, j);
    }
  }
  return det;
}

#define ROME_INSTANTIATE(T)                                                                   \
  template DenseMatrix<T> densify<T>(const StructuredMap&);                                   \
  template DenseMatrix<T> matmul<T>(const DenseMatrix<T>&, const DenseMatrix<T>&);            \
  template DenseMatrix<T> transpose<T>(const DenseMatrix<T>&);                                \
  template DenseMatrix<T> negate<T>(const DenseMatrix<T>&);

ROME_INSTANTIATE(float)
ROME_INSTANTIATE(double)
ROME_INSTANTIATE(std::int64_t)
#undef ROME_INSTANTIATE

template void matvec<float>(const DenseMatrix<float>&, std::span<const float>, std::span<float>);
template void matvec<double>(const DenseMatrix<double>&, std::span<const double>, std::span<double>);
template Tensor<double> oracle_forward<float>(const Tensor<float>&, std::span<const double>, PairingMode,
                                              std::span<const std::size_t>, OpCounter*);
template Tensor<double> oracle_forward<double>(const Tensor<double>&, std::span<const double>, PairingMode,
                                               std::span<const std::size_t>, OpCounter*);

}  // namespace rome
