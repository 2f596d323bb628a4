// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef OCC_LIFT_HPP
#define OCC_LIFT_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "occ/core.hpp"

namespace occ {

// Pixel -> linear voxel index. Each pixel maps to at most one voxel; a voxel
// may collect any number of pixels.
class PixelVoxelMap {
 public:
  static constexpr std::uint32_t kUnmapped = 0xFFFFFFFFu;

  PixelVoxelMap(int width, int height);
  PixelVoxelMap(int width, int height, std::vector<std::uint32_t> entries);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::uint32_t at(int u, int v) const {
    return entries_[static_cast<std::size_t>(v) * width_ + u];
  }
  void set(int u, int v, std::uint32_t voxel) {
    entries_[static_cast<std::size_t>(v) * width_ + u] = voxel;
  }
  std::span<const std::uint32_t> entries() const noexcept { return entries_; }
  std::size_t mapped_count() const;

  bool operator==(const PixelVoxelMap&) const = default;

 private:
  int width_, height_;
  std::vector<std::uint32_t> entries_;
};

// Camera-frame point of pixel (u, v) at depth d. Pixel centers sit on integer
// coordinates; +x right, +y down, +z forward.
inline Vec3 unproject(const CameraIntrinsics& k, double u, double v, double d) {
  return {d * (u - k.cx()) / k.fx(), d * (v - k.cy()) / k.fy(), d};
}

// World points for every valid pixel, row-major. Labels are all unknown.
SemanticPointCloud backproject(const DepthMap& depth,
                               const CameraIntrinsics& intr,
                               const CameraPose& pose);

// Same, carrying a per-pixel class label (row-major, width*height entries).
SemanticPointCloud backproject_labeled(const DepthMap& depth,
                                       const CameraIntrinsics& intr,
                                       const CameraPose& pose,
                                       std::span<const ClassCode> labels);

PixelVoxelMap build_pixel_voxel_map(const DepthMap& depth,
                                    const CameraIntrinsics& intr,
                                    const CameraPose& pose,
                                    const GridSpec& spec);

}  // namespace occ

#endif  // OCC_LIFT_HPP
