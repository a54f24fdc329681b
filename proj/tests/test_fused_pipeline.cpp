#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <random>
#include <thread>

#include "rome/bounded_queue.hpp"
#include "rome/fused.hpp"
#include "rome/pipeline.hpp"
#include "test_util.hpp"

namespace rome {
namespace {

using testing::random_tensor;

TEST(MulAddMul, SmallExample) {
  const std::vector<double> a{1, 2}, b{3, 4}, c{5, 6}, d{7, 8};
  EXPECT_EQ(mul_add_mul<double>(a, b, c, d), (std::vector<double>{38, 56}));
}

TEST(MulAddMul, IdentityCase) {
  const auto x = random_tensor<float>({64}, 1);
  const std::vector<float> ones(64, 1.0f), zeros(64, 0.0f);
  const auto junk = random_tensor<float>({64}, 2);
  const auto out = mul_add_mul<float>(x.data(), ones, junk.data(), zeros);
  EXPECT_EQ(out, std::vector<float>(x.data().begin(), x.data().end()));
}

TEST(MulAddMul, CloseToUnfused) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = random_tensor<float>({257}, seed), b = random_tensor<float>({257}, seed + 100);
    const auto c = random_tensor<float>({257}, seed + 200), d = random_tensor<float>({257}, seed + 300);
    const auto fused = mul_add_mul<float>(a.data(), b.data(), c.data(), d.data());
    const auto plain = mul_add_mul_unfused<float>(a.data(), b.data(), c.data(), d.data());
    EXPECT_LE(testing::max_abs_diff_f(fused, plain), 1e-6);
  }
}

TEST(MulAddMul, LengthMismatch) {
  const std::vector<float> a(3), b(3), c(3), d(2);
  EXPECT_THROW(mul_add_mul<float>(a, b, c, d), DimensionError);
}

TEST(BoundedQueue, FifoAndClose) {
  BoundedQueue<int> q(2);
  EXPECT_TRUE(q.push(1));
  EXPECT_TRUE(q.push(2));
  EXPECT_EQ(q.high_water(), 2u);
  EXPECT_EQ(q.pop(), 1);
  q.close();
  EXPECT_FALSE(q.push(3));
  EXPECT_EQ(q.pop(), 2);
  EXPECT_EQ(q.pop(), std::nullopt);
  EXPECT_THROW(BoundedQueue<int>(0), std::invalid_argument);
}

TEST(BoundedQueue, ProducerBlocksWhenFull) {
  BoundedQueue<int> q(1);
  ASSERT_TRUE(q.push(0));
  std::atomic<bool> pushed{false};
  std::jthread producer([&] {
    q.push(1);
    pushed = true;
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  EXPECT_FALSE(pushed.load());
  EXPECT_EQ(q.pop(), 0);
  producer.join();
  EXPECT_TRUE(pushed.load());
  EXPECT_EQ(q.high_water(), 1u);
}

struct PipelineFixture : ::testing::Test {
  static constexpr std::size_t kSeq = 4096;
  static constexpr std::size_t kWidth = 64;
  Tensor<float> x = random_tensor<float>({kSeq, kWidth}, 7);
  AngleTable<float> table = make_angle_table<float>(arange_positions(kSeq), kWidth, PairingMode::half);
  StructuredMap map = build_m(PairingMode::half, kWidth);
  Tensor<float> sequential = rome_forward(x, table, map, ApplyPath::gather);
};

TEST_F(PipelineFixture, SingleTileDegeneratesToSequential) {
  PipelineConfig cfg;
  cfg.tile_rows = kSeq;
  cfg.queue_depth = 1;
  PipelineStats stats;
  EXPECT_EQ(pipelined_rome(x, table, map, cfg, &stats), sequential);
  EXPECT_EQ(stats.tiles, 1u);
}

TEST_F(PipelineFixture, IdenticalAcrossTileSizesAndWorkers) {
  for (std::size_t tile : {32u, 128u, 512u, 1000u}) {
    for (std::size_t depth : {1u, 4u}) {
      for (std::size_t workers : {1u, 3u}) {
        PipelineConfig cfg;
        cfg.tile_rows = tile;
        cfg.queue_depth = depth;
        cfg.workers_stage1 = workers;
        cfg.workers_stage2 = workers;
        PipelineStats stats;
        EXPECT_EQ(pipelined_rome(x, table, map, cfg, &stats), sequential)
            << "tile=" << tile << " depth=" << depth << " workers=" << workers;
        EXPECT_EQ(stats.produced, stats.tiles);
        EXPECT_EQ(stats.consumed, stats.tiles);
        EXPECT_LE(stats.max_in_flight, depth);
      }
    }
  }
}

TEST_F(PipelineFixture, ScheduleFuzzing) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    std::mutex rng_mutex;
    std::mt19937_64 rng(seed);
    PipelineConfig cfg;
    cfg.tile_rows = 128;
    cfg.queue_depth = 2;
    cfg.workers_stage1 = 2;
    cfg.workers_stage2 = 2;
    cfg.on_tile = [&](PipelineStage, std::size_t) {
      std::size_t us = 0;
      {
        std::lock_guard lock(rng_mutex);
        us = std::uniform_int_distribution<std::size_t>(0, 300)(rng);
      }
      std::this_thread::sleep_for(std::chrono::microseconds(us));
    };
    PipelineStats stats;
    EXPECT_EQ(pipelined_rome(x, table, map, cfg, &stats), sequential) << "seed " << seed;
    EXPECT_LE(stats.max_in_flight, cfg.queue_depth);
  }
}

TEST_F(PipelineFixture, SlowConsumerFillsQueueToDepth) {
  PipelineConfig cfg;
  cfg.tile_rows = 64;
  cfg.queue_depth = 3;
  cfg.on_tile = [](PipelineStage stage, std::size_t) {
    if (stage == PipelineStage::combine) std::this_thread::sleep_for(std::chrono::microseconds(500));
  };
  PipelineStats stats;
  EXPECT_EQ(pipelined_rome(x, table, map, cfg, &stats), sequential);
  EXPECT_EQ(stats.max_in_flight, 3u);
}

TEST_F(PipelineFixture, HookExceptionPropagates) {
  PipelineConfig cfg;
  cfg.tile_rows = 64;
  cfg.on_tile = [](PipelineStage stage, std::size_t tile) {
    if (stage == PipelineStage::combine && tile == 5) throw std::runtime_error("boom");
  };
  EXPECT_THROW(pipelined_rome(x, table, map, cfg), std::runtime_error);
}

TEST_F(PipelineFixture, RejectsBadConfig) {
  PipelineConfig cfg;
  cfg.tile_rows = 0;
  EXPECT_THROW(pipelined_rome(x, table, map, cfg), std::invalid_argument);
  cfg.tile_rows = 4;
  cfg.queue_depth = 0;
  EXPECT_THROW(pipelined_rome(x, table, map, cfg), std::invalid_argument);
}

TEST(PipelineExt, MatchesUnifiedForm) {
  const auto x = random_tensor<float>({2, 300, 128}, 3);
  const std::vector<std::size_t> dims{44, 44, 40};
  const auto grids = grid_3d(3, 10, 10);
  const auto table = make_angle_table_nd<float>(grids, FreqSpec{10000.0, dims}, PairingMode::interleave_half);
  const auto ext = build_extension_maps(dims);
  const auto expect = rome_ext_forward(x, table, ext);
  PipelineConfig cfg;
  cfg.tile_rows = 37;
  Tensor<float> out;
  pipelined_rome_ext(x, table, ext, cfg, out);
  EXPECT_EQ(out, expect);
}

}  // namespace
}  // namespace rome
