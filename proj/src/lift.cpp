// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/lift.hpp"

#include <algorithm>
#include <limits>

#include "parallel.hpp"

namespace occ {

PixelVoxelMap::PixelVoxelMap(int width, int height)
    : PixelVoxelMap(width, height,
                    std::vector<std::uint32_t>(
                        static_cast<std::size_t>(std::max(width, 0)) *
                            std::max(height, 0),
                        kUnmapped)) {}

PixelVoxelMap::PixelVoxelMap(int width, int height,
                             std::vector<std::uint32_t> entries)
    : width_(width), height_(height), entries_(std::move(entries)) {
  if (width < 1 || height < 1) {
    fail(ErrorCode::kInvalidArgument, "pixel map must be at least 1x1");
  }
  if (entries_.size() != static_cast<std::size_t>(width) * height) {
    fail(ErrorCode::kDimensionMismatch, "pixel map entries do not match width*height");
  }
}

std::size_t PixelVoxelMap::mapped_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(),
                    [](std::uint32_t e) { return e != kUnmapped; }));
}

namespace {

void check_dims(const DepthMap& depth, const CameraIntrinsics& intr) {
  if (depth.width() != intr.width() || depth.height() != intr.height()) {
    fail(ErrorCode::kDimensionMismatch,
         "depth map is " + std::to_string(depth.width()) + "x" +
             std::to_string(depth.height()) + " but intrinsics are " +
             std::to_string(intr.width()) + "x" + std::to_string(intr.height()));
  }
}

SemanticPointCloud lift_impl(const DepthMap& depth, const CameraIntrinsics& intr,
                             const CameraPose& pose,
                             std::span<const ClassCode> labels) {
  check_dims(depth, intr);
  const int w = depth.width();
  const int h = depth.height();
  // Rows are lifted independently and concatenated in row order.
  std::vector<SemanticPointCloud> rows(static_cast<std::size_t>(h));
  detail::parallel_for(
      static_cast<std::size_t>(h),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t v = begin; v < end; ++v) {
          auto& row = rows[v];
          for (int u = 0; u < w; ++u) {
            const float d = depth.at(u, static_cast<int>(v));
            if (!is_valid_depth(d)) continue;
            const ClassCode label =
                labels.empty() ? cls::kUnknown
                               : labels[v * static_cast<std::size_t>(w) + u];
            row.push_back(pose.apply(unproject(intr, u, static_cast<double>(v), d)),
                          label);
          }
        }
      },
      16);
  SemanticPointCloud out;
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  out.reserve(total);
  for (const auto& r : rows) out.append(r);
  return out;
}

}  // namespace

SemanticPointCloud backproject(const DepthMap& depth,
                               const CameraIntrinsics& intr,
                               const CameraPose& pose) {
  return lift_impl(depth, intr, pose, {});
}

SemanticPointCloud backproject_labeled(const DepthMap& depth,
                                       const CameraIntrinsics& intr,
                                       const CameraPose& pose,
                                       std::span<const ClassCode> labels) {
  if (labels.size() != static_cast<std::size_t>(depth.width()) * depth.height()) {
    fail(ErrorCode::kDimensionMismatch, "label map does not match depth map");
  }
  for (auto l : labels) {
    if (!is_valid_class(l)) {
      fail(ErrorCode::kInvalidClass, "invalid class code " + std::to_string(l));
    }
  }
  return lift_impl(depth, intr, pose, labels);
}

PixelVoxelMap build_pixel_voxel_map(const DepthMap& depth,
                                    const CameraIntrinsics& intr,
                                    const CameraPose& pose,
                                    const GridSpec& spec) {
  check_dims(depth, intr);
  if (spec.num_voxels() >
      static_cast<std::int64_t>(PixelVoxelMap::kUnmapped)) {
    fail(ErrorCode::kInvalidArgument, "grid too large for a 32-bit pixel map");
  }
  const int w = depth.width();
  const int h = depth.height();
  std::vector<std::uint32_t> entries(static_cast<std::size_t>(w) * h,
                                     PixelVoxelMap::kUnmapped);
  detail::parallel_for(
      static_cast<std::size_t>(h),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t v = begin; v < end; ++v) {
          for (int u = 0; u < w; ++u) {
            const float d = depth.at(u, static_cast<int>(v));
            if (!is_valid_depth(d)) continue;
            const Vec3 p =
                pose.apply(unproject(intr, u, static_cast<double>(v), d));
            const VoxelCoord c = spec.voxel_of(p);
            if (!spec.contains(c)) continue;
            entries[v * w + u] = static_cast<std::uint32_t>(linear_index(c, spec));
          }
        }
      },
      16);
  return PixelVoxelMap(w, h, std::move(entries));
}

}  // namespace occ
