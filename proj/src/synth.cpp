// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "parallel.hpp"

namespace occ {

double Box::depth_inside(const Vec3& p) const {
  const Vec3 lo = p - min;
  const Vec3 hi = max - p;
  return std::min(lo.minCoeff(), hi.minCoeff());
}

double Box::surface_distance(const Vec3& p) const {
  const double inside = depth_inside(p);
  if (inside >= 0.0) return inside;
  const Vec3 outside = (min - p).cwiseMax(p - max).cwiseMax(0.0);
  return outside.norm();
}

std::optional<double> Box::intersect(const Vec3& origin, const Vec3& dir) const {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (dir[a] == 0.0) {
      if (origin[a] < min[a] || origin[a] > max[a]) return std::nullopt;
      continue;
    }
    double t0 = (min[a] - origin[a]) / dir[a];
    double t1 = (max[a] - origin[a]) / dir[a];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  if (t_near <= 0.0) return std::nullopt;
  return t_near;
}

double CuboidScene::nearest_surface_distance(const Vec3& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : boxes) best = std::min(best, b.surface_distance(p));
  return best;
}

CameraIntrinsics default_synth_intrinsics() {
  return CameraIntrinsics(110.0, 110.0, 79.5, 59.5, 160, 120);
}

namespace {

struct FurnitureShape {
  ClassCode label;
  Vec3 min_size;
  Vec3 max_size;
};

constexpr double kClearance = 0.1;

const FurnitureShape kShapes[] = {
    {cls::kChair, Vec3(0.45, 0.45, 0.8), Vec3(0.6, 0.6, 1.0)},
    {cls::kBed, Vec3(1.4, 1.9, 0.45), Vec3(1.8, 2.1, 0.6)},
    {cls::kSofa, Vec3(1.6, 0.8, 0.7), Vec3(2.1, 1.0, 0.9)},
    {cls::kTable, Vec3(0.8, 0.6, 0.7), Vec3(1.5, 1.0, 0.8)},
    {cls::kFurniture, Vec3(0.8, 0.4, 1.2), Vec3(1.2, 0.6, 2.0)},
    {cls::kObject, Vec3(0.2, 0.2, 0.2), Vec3(0.4, 0.4, 0.5)},
};

double uniform(std::mt19937_64& rng, double lo, double hi) {
  if (hi <= lo) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double snap_extent(double v, double snap) {
  if (snap <= 0.0) return v;
  return (std::floor(v / snap - 0.5) + 0.5) * snap;
}

bool overlaps(const Box& a, const Box& b, double margin) {
  for (int i = 0; i < 3; ++i) {
    if (a.max[i] + margin <= b.min[i] || b.max[i] + margin <= a.min[i]) return false;
  }
  return true;
}

Mat3 look_rotation(double yaw, double pitch) {
  const Vec3 forward(std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw),
                     std::sin(pitch));
  const Vec3 right = forward.cross(Vec3::UnitZ()).normalized();
  const Vec3 down = forward.cross(right);
  Mat3 r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  return r;
}

}  // namespace

GeneratedScene generate_scene(std::uint64_t seed, const SceneConfig& config) {
  if ((config.min_room.array() <= 0.0).any() ||
      (config.max_room.array() < config.min_room.array()).any()) {
    fail(ErrorCode::kInvalidArgument, "invalid room size range");
  }
  if (config.furniture_count < 0 || config.frames < 3) {
    fail(ErrorCode::kInvalidArgument, "need furniture_count >= 0 and frames >= 3");
  }
  if (!(config.shell_thickness > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "shell thickness must be positive");
  }
  std::mt19937_64 rng(seed);
  GeneratedScene out;
  CuboidScene& scene = out.scene;
  Vec3 size;
  for (int a = 0; a < 3; ++a) size[a] = uniform(rng, config.min_room[a], config.max_room[a]);
  size.x() = snap_extent(size.x(), config.snap);
  size.y() = snap_extent(size.y(), config.snap);
  if ((size.array() <= 1.0).any()) fail(ErrorCode::kInvalidArgument, "room too small");
  scene.room_size = size;
  scene.shell_thickness = config.shell_thickness;
  const double t = config.shell_thickness;
  const double w = size.x(), l = size.y(), h = size.z();
  scene.boxes = {
      {Vec3(-t, -t, -t), Vec3(w + t, l + t, 0.0), cls::kFloor},
      {Vec3(-t, -t, h), Vec3(w + t, l + t, h + t), cls::kCeiling},
      {Vec3(-t, -t, 0.0), Vec3(0.0, l + t, h), cls::kWall},
      {Vec3(w, -t, 0.0), Vec3(w + t, l + t, h), cls::kWall},
      {Vec3(0.0, -t, 0.0), Vec3(w, 0.0, h), cls::kWall},
      {Vec3(0.0, l, 0.0), Vec3(w, l + t, h), cls::kWall},
  };
  const std::size_t shell = scene.boxes.size();

  for (int f = 0; f < config.furniture_count; ++f) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const auto& shape = kShapes[std::uniform_int_distribution<int>(0, 5)(rng)];
      Vec3 dims;
      for (int a = 0; a < 3; ++a) dims[a] = uniform(rng, shape.min_size[a], shape.max_size[a]);
      if (std::uniform_int_distribution<int>(0, 1)(rng) == 1) std::swap(dims.x(), dims.y());
      const double x0 = uniform(rng, kClearance, w - kClearance - dims.x());
      const double y0 = uniform(rng, kClearance, l - kClearance - dims.y());
      if (x0 < kClearance || y0 < kClearance || dims.z() > h - kClearance) continue;
      Box box{Vec3(x0, y0, 0.0), Vec3(x0 + dims.x(), y0 + dims.y(), dims.z()), shape.label};
      bool clash = false;
      for (std::size_t b = shell; b < scene.boxes.size() && !clash; ++b) {
        clash = overlaps(box, scene.boxes[b], kClearance);
      }
      if (clash) continue;
      scene.boxes.push_back(box);
      placed = true;
    }
    if (!placed) {
      fail(ErrorCode::kInvalidArgument,
           "infeasible scene config: could not place furniture item " + std::to_string(f));
    }
  }

  const double margin = 0.6;
  const double base_yaw = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < config.frames; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 500 && !placed; ++attempt) {
      const Vec3 c(uniform(rng, margin, w - margin), uniform(rng, margin, l - margin),
                   uniform(rng, config.camera_min_height, config.camera_max_height));
      bool clear = true;
      for (std::size_t b = shell; b < scene.boxes.size() && clear; ++b) {
        clear = scene.boxes[b].surface_distance(c) > 0.3 && !scene.boxes[b].contains(c);
      }
      if (!clear) continue;
      const double yaw = base_yaw + 2.0 * std::numbers::pi * i / config.frames +
                         uniform(rng, -0.3, 0.3);
      const double pitch =
          (i % 2 == 0 ? config.pitch_up_deg : config.pitch_down_deg) * std::numbers::pi / 180.0;
      out.trajectory.emplace_back(look_rotation(yaw, pitch), c);
      placed = true;
    }
    if (!placed) fail(ErrorCode::kInvalidArgument, "infeasible scene config: no free camera position");
  }
  return out;
}

RenderedFrame render_frame(const CuboidScene& scene, const CameraPose& pose,
                           const CameraIntrinsics& intr) {
  const int w = intr.width();
  const int h = intr.height();
  std::vector<float> depth(static_cast<std::size_t>(w) * h,
                           std::numeric_limits<float>::quiet_NaN());
  std::vector<std::uint32_t> labels(depth.size(), LabelMap::kIgnore);
  std::vector<std::uint32_t> instances(depth.size(), LabelMap::kIgnore);
  const Mat3 r = pose.rotation();
  const Vec3 origin = pose.translation();
  detail::parallel_for(
      static_cast<std::size_t>(h),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t v = begin; v < end; ++v) {
          for (int u = 0; u < w; ++u) {
            // Camera-frame direction with unit z, so the ray parameter is depth.
            const Vec3 dir = r * Vec3((u - intr.cx()) / intr.fx(),
                                      (static_cast<double>(v) - intr.cy()) / intr.fy(), 1.0);
            double best = std::numeric_limits<double>::infinity();
            std::size_t hit = scene.boxes.size();
            for (std::size_t b = 0; b < scene.boxes.size(); ++b) {
              const auto t = scene.boxes[b].intersect(origin, dir);
              if (t && *t < best) {
                best = *t;
                hit = b;
              }
            }
            if (hit == scene.boxes.size()) continue;
            const std::size_t p = v * w + u;
            depth[p] = static_cast<float>(best);
            labels[p] = scene.boxes[hit].label;
            instances[p] = static_cast<std::uint32_t>(hit);
          }
        }
      },
      8);
  return {DepthMap(w, h, std::move(depth)), LabelMap(w, h, std::move(labels)),
          LabelMap(w, h, std::move(instances))};
}

std::vector<ClassCode> class_codes(const LabelMap& labels) {
  std::vector<ClassCode> out(labels.ids().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto id = labels.ids()[i];
    out[i] = (id == LabelMap::kIgnore || !is_valid_class(static_cast<int>(id)))
                 ? cls::kUnknown
                 : static_cast<ClassCode>(id);
  }
  return out;
}

VoxelGrid analytic_grid(const CuboidScene& scene, const GridSpec& spec, int samples_per_voxel) {
  if (samples_per_voxel < 1) fail(ErrorCode::kInvalidArgument, "samples_per_voxel must be >= 1");
  const int n = static_cast<int>(std::lround(std::cbrt(samples_per_voxel)));
  if (n * n * n != samples_per_voxel) {
    fail(ErrorCode::kInvalidArgument, "samples_per_voxel must be a perfect cube");
  }
  VoxelGrid grid(spec, cls::kFree);
  auto labels = grid.labels();
  const double step = spec.voxel_size() / n;
  detail::parallel_for(
      static_cast<std::size_t>(spec.num_voxels()),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
          const VoxelCoord c = delinearize(static_cast<std::int64_t>(i), spec);
          const Vec3 corner = spec.origin() + spec.voxel_size() * Vec3(static_cast<double>(c.x),
                                                                       static_cast<double>(c.y),
                                                                       static_cast<double>(c.z));
          std::array<int, cls::kNumScoreColumns> votes{};
          for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
              for (int k = 0; k < n; ++k) {
                const Vec3 p = corner + step * Vec3(a + 0.5, b + 0.5, k + 0.5);
                int label = cls::kFree;
                double deepest = -1.0;
                for (const auto& box : scene.boxes) {
                  if (!box.contains(p)) continue;
                  const double d = box.depth_inside(p);
                  if (d > deepest || (d == deepest && box.label < label)) {
                    deepest = d;
                    label = box.label;
                  }
                }
                ++votes[class_slot(static_cast<ClassCode>(label))];
              }
            }
          }
          int best = 0;
          for (int s = 1; s <= cls::kNumSemantic; ++s) {
            if (votes[s] > votes[best]) best = s;
          }
          labels[i] = static_cast<ClassCode>(best);
        }
      },
      256);
  return grid;
}

GridSpec scene_grid_spec(double voxel_size, const std::array<std::int64_t, 3>& dims) {
  const double o = -0.75 * voxel_size;
  return GridSpec(Vec3(o, o, o), voxel_size, dims);
}

RowMatrix class_embedding(int dim, std::uint64_t seed) {
  if (dim < 1) fail(ErrorCode::kInvalidArgument, "feature dim must be >= 1");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> normal(0.0, 1.0);
  RowMatrix e(cls::kNumScoreColumns, dim);
  for (Eigen::Index r = 0; r < e.rows(); ++r) {
    for (Eigen::Index c = 0; c < e.cols(); ++c) e(r, c) = normal(rng);
  }
  return e;
}

namespace {

RowMatrix noisy_rows(std::span<const std::uint32_t> slots, const RowMatrix& embedding,
                     double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RowMatrix out(static_cast<Eigen::Index>(slots.size()), embedding.cols());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    for (Eigen::Index c = 0; c < embedding.cols(); ++c) {
      out(static_cast<Eigen::Index>(i), c) = embedding(slots[i], c) + noise * normal(rng);
    }
  }
  return out;
}

}  // namespace

RowMatrix synthetic_pixel_features(const LabelMap& labels, const RowMatrix& embedding,
                                   double noise, std::uint64_t seed) {
  const auto codes = class_codes(labels);
  std::vector<std::uint32_t> slots(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) slots[i] = class_slot(codes[i]);
  return noisy_rows(slots, embedding, noise, seed);
}

RowMatrix synthetic_voxel_features(const VoxelGrid& grid, const RowMatrix& embedding,
                                   double noise, std::uint64_t seed) {
  std::vector<std::uint32_t> slots(grid.labels().size());
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = class_slot(grid.labels()[i]);
  return noisy_rows(slots, embedding, noise, seed);
}

}  // namespace occ
