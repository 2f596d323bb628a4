// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

// Procedural cuboid rooms with exact ray-cast depth, used as ground truth for
// the reconstruction and voxelization stages.

#ifndef OCC_SYNTH_HPP
#define OCC_SYNTH_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "occ/cloud_ops.hpp"
#include "occ/core.hpp"
#include "occ/distill.hpp"

namespace occ {

struct Box {
  Vec3 min;
  Vec3 max;
  ClassCode label = cls::kObject;

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  // Distance from an inside point to the nearest face; negative outside.
  double depth_inside(const Vec3& p) const;
  // Distance from p to the box boundary, inside or out.
  double surface_distance(const Vec3& p) const;
  // Ray parameter of the first hit in front of the origin, if any.
  std::optional<double> intersect(const Vec3& origin, const Vec3& dir) const;
};

struct CuboidScene {
  // Interior spans [0, room_size] on every axis; room_size.z() is the wall
  // height.
  Vec3 room_size = Vec3(4.0, 4.0, 2.8);
  double shell_thickness = 0.1;
  std::vector<Box> boxes;

  double wall_height() const { return room_size.z(); }
  double nearest_surface_distance(const Vec3& p) const;
};

using CameraTrajectory = std::vector<CameraPose>;

struct SceneConfig {
  Vec3 min_room = Vec3(3.4, 3.4, kDefaultWallHeight);
  Vec3 max_room = Vec3(4.6, 4.6, kDefaultWallHeight);
  // Horizontal room extents are snapped to (k + 1/2) * snap so that both wall
  // faces sit at the same fractional voxel offset. 0 disables snapping.
  double snap = kBenchmarkVoxelSize;
  double shell_thickness = 0.1;
  int furniture_count = 4;
  int frames = 8;
  double camera_min_height = 1.3;
  double camera_max_height = 1.6;
  // Frames alternate between these pitches (degrees, positive looks up).
  double pitch_up_deg = 30.0;
  double pitch_down_deg = -35.0;
};

CameraIntrinsics default_synth_intrinsics();

struct GeneratedScene {
  CuboidScene scene;
  CameraTrajectory trajectory;
};

// Deterministic in (seed, config). Furniture classes are drawn from chair,
// bed, sofa, table, furniture and object.
GeneratedScene generate_scene(std::uint64_t seed, const SceneConfig& config = {});

struct RenderedFrame {
  DepthMap depth;
  // Class code of the hit box; kIgnore where the ray misses.
  LabelMap labels;
  // Index of the hit box; kIgnore where the ray misses.
  LabelMap instances;
};

RenderedFrame render_frame(const CuboidScene& scene, const CameraPose& pose,
                           const CameraIntrinsics& intr);

// Class codes per pixel (unknown where the label map is ignored).
std::vector<ClassCode> class_codes(const LabelMap& labels);

// Majority over an n x n x n sample lattice per voxel; samples_per_voxel must
// be a perfect cube. Samples inside several boxes take the class of the box
// they are deepest in. Ties go to the lowest code, so free wins 50/50 splits.
VoxelGrid analytic_grid(const CuboidScene& scene, const GridSpec& spec,
                        int samples_per_voxel = 8);

// Benchmark-shaped grid whose origin sits 3/4 voxel below the room corner, so
// every interior face except the ceiling lies on a quarter-voxel plane.
GridSpec scene_grid_spec(double voxel_size = kBenchmarkVoxelSize,
                         const std::array<std::int64_t, 3>& dims = kBenchmarkDims);

// Deterministic per-class embedding (13 x dim) plus Gaussian noise, giving
// pixel and voxel features that agree on matching classes.
RowMatrix class_embedding(int dim, std::uint64_t seed);
RowMatrix synthetic_pixel_features(const LabelMap& labels, const RowMatrix& embedding,
                                   double noise, std::uint64_t seed);
RowMatrix synthetic_voxel_features(const VoxelGrid& grid, const RowMatrix& embedding,
                                   double noise, std::uint64_t seed);

}  // namespace occ

#endif  // OCC_SYNTH_HPP
