// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef OCC_VOXELIZE_HPP
#define OCC_VOXELIZE_HPP

#include <array>
#include <cstdint>
#include <unordered_map>

#include "occ/core.hpp"

namespace occ {

// Point counts per class slot (see class_slot()).
using ClassCounts = std::array<std::uint32_t, cls::kNumScoreColumns>;

// Sparse per-voxel class histogram.
class VoxelHistogram {
 public:
  explicit VoxelHistogram(GridSpec spec) : spec_(std::move(spec)) {}

  const GridSpec& spec() const noexcept { return spec_; }
  const std::unordered_map<std::int64_t, ClassCounts>& voxels() const noexcept {
    return voxels_;
  }
  std::uint64_t dropped() const noexcept { return dropped_; }
  std::uint64_t total() const noexcept { return total_; }

  void add(std::int64_t voxel, ClassCode label, std::uint32_t count = 1);
  void add_dropped(std::uint64_t n) { dropped_ += n; }

  bool operator==(const VoxelHistogram&) const = default;

 private:
  GridSpec spec_;
  std::unordered_map<std::int64_t, ClassCounts> voxels_;
  std::uint64_t dropped_ = 0;
  std::uint64_t total_ = 0;
};

// Voxel of p under the grid's half-open binning, except that points lying on
// the grid's upper face are clamped into the last layer. Returns -1 when p
// falls outside.
std::int64_t bin_point(const Vec3& p, const GridSpec& spec);

VoxelHistogram accumulate(const SemanticPointCloud& cloud, const GridSpec& spec);

// Per-(voxel, class) sum. Specs must be identical.
VoxelHistogram merge(const VoxelHistogram& a, const VoxelHistogram& b);

// Empty voxels are free. Otherwise the semantic class with the largest count
// wins (ties to the lowest code); voxels without any semantic points are
// unknown.
VoxelGrid vote(const VoxelHistogram& hist);

ClassCode vote_counts(const ClassCounts& counts);

// Origin at the component-wise minimum; dims cover the maximum point.
GridSpec auto_spec(const SemanticPointCloud& cloud, double voxel_size);

// Copies `grid` into `target` by integer voxel offset; uncovered target voxels
// are unknown. Voxel sizes must match and origins must differ by a whole
// number of voxels.
VoxelGrid window_to_grid(const VoxelGrid& grid, const GridSpec& target);

}  // namespace occ

#endif  // OCC_VOXELIZE_HPP
