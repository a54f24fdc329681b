#include "rome/pipeline.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "kernels.hpp"
#include "rome/bounded_queue.hpp"

namespace rome {

void PipelineConfig::validate() const {
  if (tile_rows == 0) throw std::invalid_argument("tile_rows must be at least 1");
  if (queue_depth == 0) throw std::invalid_argument("queue_depth must be at least 1");
  if (workers_stage1 == 0 || workers_stage2 == 0) throw std::invalid_argument("each stage needs at least one worker");
}

namespace {

template <typename T>
struct Tile {
  std::size_t index = 0;
  std::size_t first_row = 0;
  std::size_t rows = 0;
  std::vector<T> lhs;  // M1 x (extension only)
  std::vector<T> rhs;  // M x, or M2 x
};

// Stage 1 fills a tile; stage 2 writes the tile's rows of `out`.
template <typename T, typename Produce, typename Consume>
void run_pipeline(std::size_t total_rows, const PipelineConfig& cfg, Produce produce, Consume consume,
                  PipelineStats* stats) {
  cfg.validate();
  const std::size_t tiles = (total_rows + cfg.tile_rows - 1) / cfg.tile_rows;
  BoundedQueue<Tile<T>> queue(cfg.queue_depth);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> produced{0};
  std::atomic<std::size_t> consumed{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto fail = [&](std::exception_ptr e) {
    {
      std::lock_guard lock(error_mutex);
      if (!error) error = e;
    }
    queue.close();
  };

  std::vector<std::jthread> stage2;
  for (std::size_t w = 0; w < cfg.workers_stage2; ++w) {
    stage2.emplace_back([&] {
      try {
        while (auto tile = queue.pop()) {
          if (cfg.on_tile) cfg.on_tile(PipelineStage::combine, tile->index);
          consume(*tile);
          consumed.fetch_add(1, std::memory_order_relaxed);
        }
      } catch (...) {
        fail(std::current_exception());
      }
    });
  }

  {
    std::vector<std::jthread> stage1;
    for (std::size_t w = 0; w < cfg.workers_stage1; ++w) {
      stage1.emplace_back([&] {
        try {
          for (std::size_t t = next.fetch_add(1); t < tiles; t = next.fetch_add(1)) {
            if (cfg.on_tile) cfg.on_tile(PipelineStage::permute, t);
            Tile<T> tile;
            tile.index = t;
            tile.first_row = t * cfg.tile_rows;
            tile.rows = std::min(cfg.tile_rows, total_rows - tile.first_row);
            produce(tile);
            if (!queue.push(std::move(tile))) return;
            produced.fetch_add(1, std::memory_order_relaxed);
          }
        } catch (...) {
          fail(std::current_exception());
        }
      });
    }
  }  // stage 1 joined
  queue.close();
  stage2.clear();  // joins

  if (error) std::rethrow_exception(error);
  if (stats != nullptr) {
    stats->tiles = tiles;
    stats->produced = produced.load();
    stats->consumed = consumed.load();
    stats->max_in_flight = queue.high_water();
  }
}

}  // namespace

template <typename T>
void pipelined_rome(const Tensor<T>& x, const AngleTable<T>& angles, const StructuredMap& map,
                    const PipelineConfig& cfg, Tensor<T>& out, PipelineStats* stats) {
  check_rome_inputs(x, angles, map);
  if (out.shape() != x.shape()) out = Tensor<T>(x.shape());
  const std::size_t d = x.width();
  const std::size_t seq = angles.seq_len;

  auto produce = [&](Tile<T>& tile) {
    tile.rhs.resize(tile.rows * d);
    for (std::size_t i = 0; i < tile.rows; ++i) {
      apply_structured_row<T>(map, x.row(tile.first_row + i), std::span<T>(tile.rhs.data() + i * d, d));
    }
  };
  auto consume = [&](const Tile<T>& tile) {
    for (std::size_t i = 0; i < tile.rows; ++i) {
      const std::size_t r = tile.first_row + i;
      const std::size_t s = r % seq;
      detail::mul_add_mul_kernel(angles.cos_row(s).data(), x.row(r).data(), angles.sin_row(s).data(),
                                 tile.rhs.data() + i * d, out.row(r).data(), d);
    }
  };
  run_pipeline<T>(x.rows(), cfg, produce, consume, stats);
}

template <typename T>
Tensor<T> pipelined_rome(const Tensor<T>& x, const AngleTable<T>& angles, const StructuredMap& map,
                         const PipelineConfig& cfg, PipelineStats* stats) {
  Tensor<T> out;
  pipelined_rome(x, angles, map, cfg, out, stats);
  return out;
}

template <typename T>
void pipelined_rome_ext(const Tensor<T>& x, const AngleTable<T>& angles, const ExtensionMaps& ext,
                        const PipelineConfig& cfg, Tensor<T>& out, PipelineStats* stats) {
  if (angles.mode != PairingMode::interleave_half || angles.dims != ext.m1.dims) {
    throw DimensionError("extension maps need an interleave-half angle table with matching blocks");
  }
  check_rome_inputs(x, angles, ext.m1);
  if (out.shape() != x.shape()) out = Tensor<T>(x.shape());
  const std::size_t d = x.width();
  const std::size_t seq = angles.seq_len;

  auto produce = [&](Tile<T>& tile) {
    tile.lhs.resize(tile.rows * d);
    tile.rhs.resize(tile.rows * d);
    for (std::size_t i = 0; i < tile.rows; ++i) {
      const auto xr = x.row(tile.first_row + i);
      apply_structured_row<T>(ext.m1, xr, std::span<T>(tile.lhs.data() + i * d, d));
      apply_structured_row<T>(ext.m2, xr, std::span<T>(tile.rhs.data() + i * d, d));
    }
  };
  auto consume = [&](const Tile<T>& tile) {
    for (std::size_t i = 0; i < tile.rows; ++i) {
      const std::size_t r = tile.first_row + i;
      const std::size_t s = r % seq;
      detail::mul_add_mul_kernel(angles.cos_row(s).data(), tile.lhs.data() + i * d, angles.sin_row(s).data(),
                                 tile.rhs.data() + i * d, out.row(r).data(), d);
    }
  };
  run_pipeline<T>(x.rows(), cfg, produce, consume, stats);
}

#define ROME_INSTANTIATE(T)                                                                                   \
  template Tensor<T> pipelined_rome<T>(const Tensor<T>&, const AngleTable<T>&, const StructuredMap&,          \
                                       const PipelineConfig&, PipelineStats*);                                \
  template void pipelined_rome<T>(const Tensor<T>&, const AngleTable<T>&, const StructuredMap&,               \
                                  const PipelineConfig&, Tensor<T>&, PipelineStats*);                         \
  template void pipelined_rome_ext<T>(const Tensor<T>&, const AngleTable<T>&, const ExtensionMaps&,           \
                                      const PipelineConfig&, Tensor<T>&, PipelineStats*);

ROME_INSTANTIATE(float)
ROME_INSTANTIATE(double)
#undef ROME_INSTANTIATE

}  // namespace rome
