#include <gtest/gtest.h>

#include <numbers>

#include "rome/dense_oracle.hpp"
#include "rome/rope_reference.hpp"
#include "rome/rome.hpp"
#include "test_util.hpp"

namespace rome {
namespace {

using testing::max_abs_diff;
using testing::max_abs_diff_d;
using testing::random_tensor;

constexpr PairingMode kModes[] = {PairingMode::half, PairingMode::interleave, PairingMode::interleave_half,
                                  PairingMode::quarter};

TEST(RopeReference, ZeroAnglesIdentity) {
  const Tensor<double> x({1, 4}, {1, 2, 3, 4});
  const auto t = expand_cos_sin<double>({0.0, 0.0}, PairingMode::half, {4});
  EXPECT_EQ(rope_reference(x, t, PairingMode::half), x);

  const Tensor<double> x8({1, 8}, {1, 2, 3, 4, 5, 6, 7, 8});
  const auto q = expand_cos_sin<double>(std::vector<double>(4, 0.0), PairingMode::quarter, {8});
  EXPECT_EQ(rope_reference(x8, q, PairingMode::quarter), x8);
}

TEST(RopeReference, InterleaveQuarterTurn) {
  const Tensor<double> x({1, 4}, {1, 2, 3, 4});
  const auto t = expand_cos_sin<double>({std::numbers::pi / 2, 0.0}, PairingMode::interleave, {4});
  const auto out = rope_reference(x, t, PairingMode::interleave);
  const std::vector<double> expect{-2, 1, 3, 4};
  EXPECT_LE(max_abs_diff_d(out.data(), expect), 1e-15);
}

TEST(RopeReference, InterleaveHalfStaysInRegroupedBasis) {
  // zero angles: output is x regrouped to [evens, odds]
  const Tensor<double> x({1, 6}, {10, 11, 12, 13, 14, 15});
  const auto t = expand_cos_sin<double>(std::vector<double>(3, 0.0), PairingMode::interleave_half, {6});
  const auto out = rope_reference(x, t, PairingMode::interleave_half);
  EXPECT_EQ(std::vector<double>(out.data().begin(), out.data().end()), (std::vector<double>{10, 12, 14, 11, 13, 15}));
}

TEST(RopeReference, MatchesDenseOracle) {
  for (auto mode : kModes) {
    for (std::size_t d : {4u, 8u, 64u, 128u}) {
      const auto pos = testing::random_positions(16, d);
      const auto x = random_tensor<double>({2, 16, d}, 100 + d);
      const auto table = make_angle_table<double>(pos, d, mode);
      const std::vector<std::size_t> dims{d};
      const auto expect = oracle_forward(x, table.theta, mode, dims);
      EXPECT_LE(max_abs_diff(rope_reference(x, table, mode), expect), 1e-12)
          << to_string(mode) << " d=" << d;
    }
  }
}

TEST(RopeReference, PreservesNorm) {
  for (auto mode : kModes) {
    const auto x = random_tensor<float>({32, 64}, 5);
    const auto table = make_angle_table<float>(testing::random_positions(32, 6), 64, mode);
    const auto out = rope_reference(x, table, mode);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const double n = testing::norm(x.row(r));
      EXPECT_NEAR(testing::norm(out.row(r)) / n, 1.0, 1e-5) << to_string(mode);
    }
  }
}

TEST(RopeReference, RelativeOffsetInvariance) {
  constexpr std::size_t d = 128;
  const auto q = random_tensor<double>({1, d}, 11);
  const auto k = random_tensor<double>({1, d}, 12);
  for (auto mode : kModes) {
    for (double delta : {1.0, 17.0, 1000.0}) {
      const double a = 5, b = 42;
      auto rot = [&](const Tensor<double>& v, double p) {
        const std::vector<double> pos{p};
        return rope_reference(v, make_angle_table<double>(pos, d, mode), mode);
      };
      const double base = testing::dot(rot(q, a).data(), rot(k, b).data());
      const double moved = testing::dot(rot(q, a + delta).data(), rot(k, b + delta).data());
      EXPECT_NEAR(moved, base, 1e-4 * std::abs(base) + 1e-9) << to_string(mode) << " delta=" << delta;
    }
  }
}

TEST(RopeReference, Deterministic) {
  const auto x = random_tensor<float>({2, 8, 64}, 21);
  const auto table = make_angle_table<float>(arange_positions(8), 64, PairingMode::half);
  EXPECT_EQ(rope_reference(x, table, PairingMode::half), rope_reference(x, table, PairingMode::half));
}

TEST(RopeReference, Errors) {
  const auto x = random_tensor<float>({4, 8}, 1);
  const auto half = make_angle_table<float>(arange_positions(4), 8, PairingMode::half);
  EXPECT_THROW(rope_reference(x, half, PairingMode::interleave), DimensionError);
  const auto wrong_len = make_angle_table<float>(arange_positions(3), 8, PairingMode::half);
  EXPECT_THROW(rope_reference(x, wrong_len, PairingMode::half), DimensionError);
  const auto x6 = random_tensor<float>({4, 6}, 1);
  const auto q6 = make_angle_table<float>(arange_positions(4), 6, PairingMode::half);
  EXPECT_THROW(rope_reference(x6, q6, PairingMode::quarter), DimensionError);
}

TEST(RopeReferenceNd, ZeroPositionsIdentity) {
  const auto x = random_tensor<double>({3, 12}, 2);
  const std::vector<std::size_t> dims{4, 4, 4};
  const std::vector<std::vector<double>> grids(3, std::vector<double>(3, 0.0));
  const auto nd = make_angle_table_nd<double>(grids, FreqSpec{10000.0, dims}, PairingMode::half);
  const auto axes = split_axes(nd);
  EXPECT_EQ(rope_reference_nd<double>(x, axes, dims, PairingMode::half), x);
}

TEST(RopeReferenceNd, Half3dMatchesBlockDiagonalM) {
  const std::vector<std::size_t> dims{44, 44, 40};
  const auto grids = grid_3d(4, 5, 6);
  const auto table = make_angle_table_nd<float>(grids, FreqSpec{10000.0, dims}, PairingMode::half);
  const auto x = random_tensor<float>({2, 120, 128}, 8);
  const auto ref = rope_reference_nd<float>(x, split_axes(table), dims, PairingMode::half);
  const auto rome = rome_forward(x, table, build_m(PairingMode::half, dims));
  EXPECT_LE(max_abs_diff(ref, rome), 1e-5);
}

TEST(RopeReferenceNd, Interleave2dMatchesBlockDiagonalM) {
  const std::vector<std::size_t> dims{64, 64};
  const auto grids = grid_2d(8, 8);
  const auto table = make_angle_table_nd<float>(grids, FreqSpec{10000.0, dims}, PairingMode::interleave);
  const auto x = random_tensor<float>({64, 128}, 9);
  const auto ref = rope_reference_nd<float>(x, split_axes(table), dims, PairingMode::interleave);
  const auto rome = rome_forward(x, table, build_m(PairingMode::interleave, dims));
  EXPECT_LE(max_abs_diff(ref, rome), 1e-5);
}

TEST(RopeReferenceNd, Errors) {
  const auto x = random_tensor<float>({4, 12}, 1);
  const std::vector<std::size_t> dims{4, 4};
  const auto t = make_angle_table<float>(arange_positions(4), 4, PairingMode::half);
  const std::vector<AngleTable<float>> two{t, t};
  EXPECT_THROW(rope_reference_nd<float>(x, two, dims, PairingMode::half), DimensionError);
  const std::vector<std::size_t> dims3{4, 4, 4};
  EXPECT_THROW(rope_reference_nd<float>(x, two, dims3, PairingMode::half), DimensionError);
  const std::vector<std::size_t> bad{6, 6};
  EXPECT_THROW(rope_reference_nd<float>(x, two, bad, PairingMode::quarter), DimensionError);
}

}  // namespace
}  // namespace rome
