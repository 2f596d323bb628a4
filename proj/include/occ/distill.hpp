// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef OCC_DISTILL_HPP
#define OCC_DISTILL_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "occ/core.hpp"
#include "occ/lift.hpp"

namespace occ {

// Per-pixel region identifiers from a 2D mask model.
class LabelMap {
 public:
  static constexpr std::uint32_t kIgnore = 0xFFFFFFFFu;

  LabelMap(int width, int height, std::vector<std::uint32_t> ids);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::uint32_t at(int u, int v) const {
    return ids_[static_cast<std::size_t>(v) * width_ + u];
  }
  std::span<const std::uint32_t> ids() const noexcept { return ids_; }

 private:
  int width_, height_;
  std::vector<std::uint32_t> ids_;
};

// Pixel -> superpixel index in [0, Q) or kNone. Every index in [0, Q) is used.
class SuperpixelPartition {
 public:
  static constexpr std::uint32_t kNone = 0xFFFFFFFFu;

  SuperpixelPartition(int width, int height, std::vector<std::uint32_t> index);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::uint32_t count() const noexcept { return count_; }
  std::uint32_t at(int u, int v) const {
    return index_[static_cast<std::size_t>(v) * width_ + u];
  }
  std::span<const std::uint32_t> indices() const noexcept { return index_; }

 private:
  int width_, height_;
  std::uint32_t count_ = 0;
  std::vector<std::uint32_t> index_;
};

// Voxel -> superpixel index or kNone.
class SupervoxelAssignment {
 public:
  static constexpr std::uint32_t kNone = SuperpixelPartition::kNone;

  SupervoxelAssignment(GridSpec spec, std::uint32_t count,
                       std::vector<std::uint32_t> index);

  const GridSpec& spec() const noexcept { return spec_; }
  std::uint32_t count() const noexcept { return count_; }
  std::span<const std::uint32_t> indices() const noexcept { return index_; }
  std::size_t assigned_voxels() const;

 private:
  GridSpec spec_;
  std::uint32_t count_;
  std::vector<std::uint32_t> index_;
};

// Per-pixel D-dimensional features; row v * width + u.
class FeatureMap {
 public:
  FeatureMap(int width, int height, RowMatrix values);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Eigen::Index dim() const noexcept { return values_.cols(); }
  const RowMatrix& values() const noexcept { return values_; }

 private:
  int width_, height_;
  RowMatrix values_;
};

// Q x D pooled rows with a validity flag per row.
struct PooledFeatures {
  RowMatrix rows;
  std::vector<bool> valid;

  Eigen::Index count() const noexcept { return rows.rows(); }
  Eigen::Index dim() const noexcept { return rows.cols(); }
  std::size_t valid_count() const;
};

// Region ids -> superpixels, numbered in row-major first-occurrence order.
// With split_components each 4-connected component of an id is its own
// superpixel.
SuperpixelPartition superpixels_from_mask(const LabelMap& mask, bool split_components);

// Majority superpixel over the mapped pixels of each voxel, ties to the
// lowest index.
SupervoxelAssignment assign_supervoxels(const SuperpixelPartition& part,
                                        const PixelVoxelMap& map,
                                        const GridSpec& spec);

PooledFeatures pool_superpixel_features(const FeatureMap& features,
                                        const SuperpixelPartition& part);

PooledFeatures pool_supervoxel_features(const VoxelFeatures& voxels,
                                        const SupervoxelAssignment& assign);

inline constexpr double kDefaultTemperature = 0.07;

struct ContrastiveOptions {
  double tau = kDefaultTemperature;
  // L2-normalize rows before the dot product.
  bool normalize = false;
  // Divide by the number of matched pairs instead of summing.
  bool mean = false;
};

struct ContrastiveResult {
  double loss = 0.0;
  std::size_t valid_pairs = 0;
  // d loss / d f3d; zero on invalid rows. Empty unless requested.
  RowMatrix grad;
};

// Sum over matched rows i of -log softmax_j(<f3d_i, f2d_j> / tau)_i, where j
// runs over the matched rows. A row pair is matched when both rows are valid.
ContrastiveResult contrastive_loss(const PooledFeatures& f3d, const PooledFeatures& f2d,
                                   const ContrastiveOptions& options = {});

ContrastiveResult contrastive_loss_grad(const PooledFeatures& f3d,
                                        const PooledFeatures& f2d,
                                        const ContrastiveOptions& options = {});

}  // namespace occ

#endif  // OCC_DISTILL_HPP
