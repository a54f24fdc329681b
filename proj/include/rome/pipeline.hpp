#pragma once

#include <cstddef>
#include <functional>

#include "rome/rome.hpp"

namespace rome {

enum class PipelineStage { permute = 1, combine = 2 };

/// Two-stage tile pipeline standing in for matrix-unit / vector-unit overlap:
/// stage 1 produces M x for a tile of rows, stage 2 combines it with cos/sin
/// through mul_add_mul. Tiles are whole rows.
struct PipelineConfig {
  std::size_t tile_rows = 128;
  std::size_t queue_depth = 4;
  std::size_t workers_stage1 = 1;
  std::size_t workers_stage2 = 1;
  /// Called by a worker before it handles `tile`. Test hook for injecting
  /// delays; leave empty in production.
  std::function<void(PipelineStage, std::size_t tile)> on_tile;

  void validate() const;
};

struct PipelineStats {
  std::size_t tiles = 0;
  std::size_t produced = 0;
  std::size_t consumed = 0;
  /// Largest number of finished stage-1 tiles waiting for stage 2 at once.
  std::size_t max_in_flight = 0;
};

/// Same result as rome_forward(gather), bit for bit, for any config and any
/// thread interleaving.
template <typename T>
Tensor<T> pipelined_rome(const Tensor<T>& x, const AngleTable<T>& angles, const StructuredMap& map,
                         const PipelineConfig& cfg = {}, PipelineStats* stats = nullptr);

template <typename T>
void pipelined_rome(const Tensor<T>& x, const AngleTable<T>& angles, const StructuredMap& map,
                    const PipelineConfig& cfg, Tensor<T>& out, PipelineStats* stats = nullptr);

/// Interleave-half variant; stage 1 produces both M1 x and M2 x.
template <typename T>
void pipelined_rome_ext(const Tensor<T>& x, const AngleTable<T>& angles, const ExtensionMaps& ext,
                        const PipelineConfig& cfg, Tensor<T>& out, PipelineStats* stats = nullptr);

}  // namespace rome
