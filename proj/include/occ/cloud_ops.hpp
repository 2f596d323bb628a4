// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef OCC_CLOUD_OPS_HPP
#define OCC_CLOUD_OPS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "occ/core.hpp"

namespace occ {

// n . p + d = 0, |n| = 1.
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;

  Plane() = default;
  Plane(const Vec3& n, double d);

  double signed_distance(const Vec3& p) const { return normal.dot(p) + offset; }
};

// Keeps points with at least `min_neighbors` other points within `radius`.
SemanticPointCloud radius_filter(const SemanticPointCloud& cloud, double radius,
                                 std::size_t min_neighbors);

// Mean distance to the k nearest other points, per point.
std::vector<double> mean_knn_distances(const SemanticPointCloud& cloud,
                                       std::size_t k);

// Keeps points whose mean k-NN distance is at most mu + std_ratio * sigma,
// where sigma is the sample standard deviation over all points.
SemanticPointCloud statistical_filter(const SemanticPointCloud& cloud,
                                      std::size_t k, double std_ratio);

// 5% of the bounding-box diagonal.
double default_filter_radius(const SemanticPointCloud& cloud);

struct FloorFitOptions {
  std::size_t iterations = 500;
  double inlier_threshold = 0.02;
  std::uint64_t seed = 0;
  // Rough up direction. Only planes whose normal lies within
  // `max_tilt_deg` of it (either sign) are floor candidates.
  Vec3 up_hint = Vec3::UnitZ();
  double max_tilt_deg = 40.0;
  // Planes to extract before choosing the floor.
  int max_planes = 12;
  // A plane needs at least this fraction of the cloud to count as dominant.
  double min_support = 0.03;
  // RANSAC hypotheses are scored on at most this many points.
  std::size_t score_sample = 20000;
};

// Sequential RANSAC. Among the dominant planes that face the up hint, the one
// whose inliers sit lowest along it is the floor. The normal is oriented so
// most points lie on its positive side.
Plane estimate_floor_plane(const SemanticPointCloud& cloud,
                           const FloorFitOptions& options = {});

// Minimal rotation taking the floor normal to +z, then a z shift putting the
// floor at z = 0.
std::pair<SemanticPointCloud, SimilarityTransform> align_z_up(
    const SemanticPointCloud& cloud, const Plane& floor);

inline constexpr double kDefaultWallHeight = 2.8;
inline constexpr double kWallHeightPercentile = 99.0;

// Linear-interpolated percentile (q in [0, 100]) of z.
double z_percentile(const SemanticPointCloud& cloud, double q);

// Scales the cloud so the 99th z-percentile lands on target_wall_height.
std::pair<SemanticPointCloud, double> metric_scale(
    const SemanticPointCloud& cloud, double target_wall_height = kDefaultWallHeight);

}  // namespace occ

#endif  // OCC_CLOUD_OPS_HPP
