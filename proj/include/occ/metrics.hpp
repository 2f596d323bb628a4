// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef OCC_METRICS_HPP
#define OCC_METRICS_HPP

#include <array>
#include <cstdint>
#include <optional>

#include "occ/core.hpp"

namespace occ {

// N x 13 per-voxel scores, columns in class-slot order (free, 11 semantic
// classes, unknown).
class ClassScores {
 public:
  ClassScores(GridSpec spec, RowMatrix values);

  const GridSpec& spec() const noexcept { return spec_; }
  const RowMatrix& values() const noexcept { return values_; }

 private:
  GridSpec spec_;
  RowMatrix values_;
};

// Argmax over free + semantic columns; the unknown column is never chosen.
VoxelGrid decode_occupancy(const ClassScores& scores);

// Occupancy IoU in percent over voxels whose ground truth is not unknown.
double binary_iou(const VoxelGrid& pred, const VoxelGrid& gt);

struct SemanticIou {
  double miou = 0.0;
  // Index c - 1 holds class c; empty when the class is absent from both.
  std::array<std::optional<double>, cls::kNumSemantic> per_class{};
};

// With benchmark_mode, absent classes count as 0 and all 11 are averaged.
SemanticIou semantic_miou(const VoxelGrid& pred, const VoxelGrid& gt,
                          bool benchmark_mode = false);

// 13 x 13 confusion counts [gt slot][pred slot] over every voxel.
using ConfusionMatrix =
    std::array<std::array<std::uint64_t, cls::kNumScoreColumns>, cls::kNumScoreColumns>;
ConfusionMatrix confusion(const VoxelGrid& pred, const VoxelGrid& gt);

}  // namespace occ

#endif  // OCC_METRICS_HPP
