#include <gtest/gtest.h>

#include "rome/dense_oracle.hpp"
#include "rome/rome.hpp"
#include "rome/structured_map.hpp"

namespace rome {
namespace {

using IntMatrix = DenseMatrix<std::int64_t>;

std::vector<double> apply(const StructuredMap& m, const std::vector<double>& x) {
  std::vector<double> out(x.size());
  apply_structured_row<double>(m, x, out);
  return out;
}

TEST(BuildM, Half4) {
  const auto m = build_m(PairingMode::half, 4);
  EXPECT_EQ(m.src, (std::vector<std::size_t>{2, 3, 0, 1}));
  EXPECT_EQ(m.sign, (std::vector<std::int8_t>{-1, -1, 1, 1}));
  EXPECT_EQ(apply(m, {1, 2, 3, 4}), (std::vector<double>{-3, -4, 1, 2}));
}

TEST(BuildM, Interleave4) {
  const auto m = build_m(PairingMode::interleave, 4);
  EXPECT_EQ(m.src, (std::vector<std::size_t>{1, 0, 3, 2}));
  EXPECT_EQ(m.sign, (std::vector<std::int8_t>{-1, 1, -1, 1}));
}

TEST(BuildM, Quarter8) {
  const auto m = build_m(PairingMode::quarter, 8);
  const std::vector<double> x{0, 1, 2, 3, 4, 5, 6, 7};
  EXPECT_EQ(apply(m, x), (std::vector<double>{-2, -3, 0, 1, -6, -7, 4, 5}));
}

TEST(BuildM, Half3dIsBlockDiagonalOfAxisMaps) {
  const std::vector<std::size_t> dims{44, 44, 40};
  const auto m3 = densify<std::int64_t>(build_m(PairingMode::half, dims));
  std::size_t offset = 0;
  for (std::size_t w : dims) {
    const auto block = densify<std::int64_t>(build_m(PairingMode::half, w));
    for (std::size_t i = 0; i < 128; ++i) {
      for (std::size_t j = 0; j < 128; ++j) {
        const bool in_block = i >= offset && i < offset + w && j >= offset && j < offset + w;
        if (i >= offset && i < offset + w) {
          const std::int64_t expect = in_block ? block.at(i - offset, j - offset) : 0;
          EXPECT_EQ(m3.at(i, j), expect) << i << "," << j;
        }
      }
    }
    offset += w;
  }
}

TEST(BuildM, Interleave3dEquals1d) {
  const std::vector<std::size_t> dims{44, 44, 40};
  const auto m3 = build_m(PairingMode::interleave, dims);
  const auto m1 = build_m(PairingMode::interleave, 128);
  EXPECT_EQ(m3.src, m1.src);
  EXPECT_EQ(m3.sign, m1.sign);
}

TEST(BuildM, AxisOrderIsCallerChosen) {
  // (t,h,w) and (h,w,t) listings give different but equally valid maps
  const std::vector<std::size_t> thw{40, 44, 44};
  const std::vector<std::size_t> hwt{44, 44, 40};
  const auto a = build_m(PairingMode::half, thw);
  const auto b = build_m(PairingMode::half, hwt);
  EXPECT_NE(a.src, b.src);
  for (const auto& m : {a, b}) {
    const auto dm = densify<std::int64_t>(m);
    EXPECT_EQ(matmul(dm, dm), negate(IntMatrix::identity(128)));
  }
}

TEST(BuildM, Rejections) {
  EXPECT_THROW(build_m(PairingMode::interleave_half, 8), DimensionError);
  EXPECT_THROW(build_m(PairingMode::quarter, 6), DimensionError);
  EXPECT_THROW(build_m(PairingMode::half, 5), DimensionError);
}

TEST(BuildM, PrintedConventionIsNegation) {
  for (auto mode : {PairingMode::half, PairingMode::interleave, PairingMode::quarter}) {
    const auto ref = densify<std::int64_t>(build_m(mode, 16));
    const auto printed = densify<std::int64_t>(build_m(mode, 16, SignConvention::printed));
    EXPECT_EQ(printed, negate(ref));
  }
  // printed interleave block is [[0, 1], [-1, 0]]
  const auto p = densify<std::int64_t>(build_m(PairingMode::interleave, 2, SignConvention::printed));
  EXPECT_EQ(p.entries, (std::vector<std::int64_t>{0, 1, -1, 0}));
}

TEST(ExtensionMaps, Width4) {
  const auto ext = build_extension_maps(4);
  EXPECT_EQ(ext.m1.src, (std::vector<std::size_t>{0, 2, 1, 3}));
  EXPECT_EQ(ext.m1.sign, (std::vector<std::int8_t>{1, 1, 1, 1}));
  EXPECT_EQ(ext.m2.src, (std::vector<std::size_t>{1, 3, 0, 2}));
  EXPECT_EQ(ext.m2.sign, (std::vector<std::int8_t>{-1, -1, 1, 1}));

  const auto m1 = densify<std::int64_t>(ext.m1);
  const auto m2 = densify<std::int64_t>(ext.m2);
  const auto core = matmul(m2, transpose(m1));
  EXPECT_EQ(matmul(core, core), negate(IntMatrix::identity(4)));
}

TEST(ExtensionMaps, M1IsPermutation) {
  const auto ext = build_extension_maps(128);
  EXPECT_NO_THROW(ext.m1.validate());
  const auto m1 = densify<std::int64_t>(ext.m1);
  EXPECT_EQ(matmul(transpose(m1), m1), IntMatrix::identity(128));
  EXPECT_THROW(build_extension_maps(7), DimensionError);
}

TEST(ExtensionMaps, M2IsHalfTimesM1) {
  for (std::size_t d = 2; d <= 128; d += 2) {
    const auto ext = build_extension_maps(d);
    const auto lhs = densify<std::int64_t>(ext.m2);
    const auto rhs = matmul(densify<std::int64_t>(build_m(PairingMode::half, d)), densify<std::int64_t>(ext.m1));
    ASSERT_EQ(lhs, rhs) << "d=" << d;
  }
}

TEST(StructuredMapOps, TransposeAndCompose) {
  for (auto mode : {PairingMode::half, PairingMode::interleave, PairingMode::quarter}) {
    const auto m = build_m(mode, 24);
    const auto dm = densify<std::int64_t>(m);
    EXPECT_EQ(densify<std::int64_t>(transpose(m)), transpose(dm));
    EXPECT_EQ(densify<std::int64_t>(compose(m, m)), matmul(dm, dm));
    // M^T = -M for these modes
    EXPECT_EQ(transpose(dm), negate(dm));
  }
}

TEST(StructuredMapOps, ValidateCatchesBrokenMaps) {
  auto m = build_m(PairingMode::half, 4);
  m.src[0] = m.src[1];
  EXPECT_THROW(m.validate(), DimensionError);
  auto s = build_m(PairingMode::half, 4);
  s.sign[2] = 0;
  EXPECT_THROW(s.validate(), DimensionError);
}

TEST(ApplyStructured, TwiceIsNegation) {
  const Tensor<double> x({3, 8}, {1, 2, 3, 4, 5, 6, 7, 8, -1, -2, -3, -4, -5, -6, -7, -8, 0.5, 0.25, 0.125, 1, 2, 4, 8, 16});
  for (auto mode : {PairingMode::half, PairingMode::interleave, PairingMode::quarter}) {
    const auto m = build_m(mode, 8);
    const auto twice = apply_structured(m, apply_structured(m, x));
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(twice[i], -x[i]);
  }
  EXPECT_THROW(apply_structured(build_m(PairingMode::half, 4), x), DimensionError);
}

}  // namespace
}  // namespace rome
