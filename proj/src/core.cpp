// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/core.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace occ {

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

const char* class_name(ClassCode code) noexcept {
  static constexpr const char* kNames[] = {
      "free",  "ceiling", "floor", "wall", "window",    "chair",
      "bed",   "sofa",    "table", "tvs",  "furniture", "object"};
  if (code <= cls::kNumSemantic) return kNames[code];
  if (code == cls::kUnknown) return "unknown";
  return "invalid";
}

CameraIntrinsics::CameraIntrinsics(double fx, double fy, double cx, double cy,
                                   int width, int height)
    : fx_(fx), fy_(fy), cx_(cx), cy_(cy), width_(width), height_(height) {
  if (!std::isfinite(fx) || !std::isfinite(fy) || !std::isfinite(cx) ||
      !std::isfinite(cy)) {
    fail(ErrorCode::kNonFinite, "camera intrinsics must be finite");
  }
  if (fx <= 0.0 || fy <= 0.0) {
    fail(ErrorCode::kInvalidArgument, "focal lengths must be positive");
  }
  if (width < 1 || height < 1) {
    fail(ErrorCode::kInvalidArgument, "image size must be at least 1x1");
  }
}

void check_rotation(const Mat3& r, const char* what) {
  if (!r.allFinite()) {
    fail(ErrorCode::kNonFinite, std::string(what) + ": non-finite rotation");
  }
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > 1e-6) {
    fail(ErrorCode::kInvalidArgument,
         std::string(what) + ": rotation block is not orthonormal");
  }
  if (std::abs(r.determinant() - 1.0) > 1e-6) {
    fail(ErrorCode::kInvalidArgument,
         std::string(what) + ": rotation determinant is not +1");
  }
}

CameraPose::CameraPose(const Mat4& cam_to_world) : cam_to_world_(cam_to_world) {
  if (!cam_to_world.allFinite()) {
    fail(ErrorCode::kNonFinite, "camera pose must be finite");
  }
  check_rotation(cam_to_world.topLeftCorner<3, 3>(), "camera pose");
  const Eigen::RowVector4d last = cam_to_world.row(3);
  if (last != Eigen::RowVector4d(0, 0, 0, 1)) {
    fail(ErrorCode::kInvalidArgument, "camera pose last row must be (0,0,0,1)");
  }
}

CameraPose::CameraPose(const Mat3& rotation, const Vec3& translation) {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  *this = CameraPose(m);
}

DepthMap::DepthMap(int width, int height)
    : DepthMap(width, height,
               std::vector<float>(static_cast<std::size_t>(std::max(width, 0)) *
                                      std::max(height, 0),
                                  0.0f)) {}

DepthMap::DepthMap(int width, int height, std::vector<float> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width < 1 || height < 1) {
    fail(ErrorCode::kInvalidArgument, "depth map must be at least 1x1");
  }
  if (values_.size() != static_cast<std::size_t>(width) * height) {
    fail(ErrorCode::kDimensionMismatch, "depth values do not match width*height");
  }
}

bool DepthMap::valid(int u, int v) const { return is_valid_depth(at(u, v)); }

void SemanticPointCloud::append(const SemanticPointCloud& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
}

void SemanticPointCloud::validate() const {
  if (points.size() != labels.size()) {
    fail(ErrorCode::kDimensionMismatch, "point and label counts differ");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite()) {
      fail(ErrorCode::kNonFinite, "point " + std::to_string(i) + " is not finite");
    }
    if (!is_valid_class(labels[i])) {
      fail(ErrorCode::kInvalidClass,
           "point " + std::to_string(i) + " has invalid class " +
               std::to_string(labels[i]));
    }
  }
}

GridSpec::GridSpec(const Vec3& origin, double voxel_size,
                   const std::array<std::int64_t, 3>& dims)
    : origin_(origin), voxel_size_(voxel_size), dims_(dims) {
  if (!origin.allFinite() || !std::isfinite(voxel_size)) {
    fail(ErrorCode::kNonFinite, "grid origin and voxel size must be finite");
  }
  if (voxel_size <= 0.0) {
    fail(ErrorCode::kInvalidArgument, "voxel size must be positive");
  }
  for (auto d : dims) {
    if (d < 1) fail(ErrorCode::kInvalidArgument, "grid dims must be >= 1");
  }
  // Guard against overflowing the linear index.
  const double n = static_cast<double>(dims[0]) * dims[1] * dims[2];
  if (n > 9.0e15) fail(ErrorCode::kInvalidArgument, "grid is too large");
}

VoxelCoord GridSpec::voxel_of(const Vec3& p) const {
  // Clamp before the integer cast; anything this far out is outside any grid.
  const Vec3 rel = ((p - origin_) / voxel_size_).cwiseMax(-1e15).cwiseMin(1e15);
  return {static_cast<std::int64_t>(std::floor(rel.x())),
          static_cast<std::int64_t>(std::floor(rel.y())),
          static_cast<std::int64_t>(std::floor(rel.z()))};
}

Vec3 GridSpec::voxel_center(const VoxelCoord& c) const {
  return origin_ + voxel_size_ * Vec3(static_cast<double>(c.x) + 0.5,
                                      static_cast<double>(c.y) + 0.5,
                                      static_cast<double>(c.z) + 0.5);
}

std::int64_t linear_index(const VoxelCoord& c, const GridSpec& spec) {
  if (!spec.contains(c)) {
    std::ostringstream os;
    os << "index out of grid: (" << c.x << "," << c.y << "," << c.z << ")";
    fail(ErrorCode::kOutOfRange, os.str());
  }
  const auto& d = spec.dims();
  return c.x + d[0] * (c.y + d[1] * c.z);
}

VoxelCoord delinearize(std::int64_t index, const GridSpec& spec) {
  if (index < 0 || index >= spec.num_voxels()) {
    fail(ErrorCode::kOutOfRange,
         "index out of grid: " + std::to_string(index));
  }
  const auto& d = spec.dims();
  const std::int64_t plane = d[0] * d[1];
  return {index % d[0], (index % plane) / d[0], index / plane};
}

VoxelGrid::VoxelGrid(GridSpec spec, ClassCode fill)
    : spec_(std::move(spec)),
      labels_(static_cast<std::size_t>(spec_.num_voxels()), fill) {
  if (!is_valid_class(fill)) fail(ErrorCode::kInvalidClass, "invalid fill class");
}

VoxelGrid::VoxelGrid(GridSpec spec, std::vector<ClassCode> labels)
    : spec_(std::move(spec)), labels_(std::move(labels)) {
  if (labels_.size() != static_cast<std::size_t>(spec_.num_voxels())) {
    fail(ErrorCode::kLengthMismatch, "label count does not match grid dims");
  }
  for (auto l : labels_) {
    if (!is_valid_class(l)) {
      fail(ErrorCode::kInvalidClass,
           "invalid class code " + std::to_string(l) + " in grid");
    }
  }
}

void VoxelGrid::set(std::int64_t i, ClassCode label) {
  if (i < 0 || i >= spec_.num_voxels()) {
    fail(ErrorCode::kOutOfRange, "index out of grid: " + std::to_string(i));
  }
  if (!is_valid_class(label)) {
    fail(ErrorCode::kInvalidClass, "invalid class code " + std::to_string(label));
  }
  labels_[i] = label;
}

VoxelFeatures::VoxelFeatures(GridSpec spec, RowMatrix values)
    : spec_(std::move(spec)), values_(std::move(values)) {
  if (values_.rows() != spec_.num_voxels()) {
    fail(ErrorCode::kDimensionMismatch,
         "voxel feature rows do not match the grid voxel count");
  }
  if (!values_.allFinite()) {
    fail(ErrorCode::kNonFinite, "voxel features must be finite");
  }
}

SimilarityTransform SimilarityTransform::after(
    const SimilarityTransform& first) const {
  // s2 (R2 (s1 (R1 p + t1)) + t2) = s2 s1 (R2 R1 p + R2 t1 + t2 / s1)
  SimilarityTransform out;
  out.rotation = rotation * first.rotation;
  out.translation = rotation * first.translation + translation / first.scale;
  out.scale = scale * first.scale;
  return out;
}

Mat4 SimilarityTransform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = scale * rotation;
  m.topRightCorner<3, 1>() = scale * translation;
  return m;
}

void SimilarityTransform::validate() const {
  check_rotation(rotation, "similarity transform");
  if (!translation.allFinite() || !std::isfinite(scale)) {
    fail(ErrorCode::kNonFinite, "similarity transform must be finite");
  }
  if (scale <= 0.0) {
    fail(ErrorCode::kInvalidArgument, "similarity scale must be positive");
  }
}

SemanticPointCloud transform_cloud(const SemanticPointCloud& cloud,
                                   const SimilarityTransform& t) {
  SemanticPointCloud out;
  out.labels = cloud.labels;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(t.apply(p));
  return out;
}

CameraPose transform_pose(const CameraPose& pose, const SimilarityTransform& t) {
  // s (R (Rc x + tc) + t) = (R Rc)(s x) + s (R tc + t)
  return CameraPose(t.rotation * pose.rotation(),
                    t.scale * (t.rotation * pose.translation() + t.translation));
}

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_thread_count(unsigned n) { g_threads.store(n); }

unsigned thread_count() {
  const unsigned n = g_threads.load();
  if (n != 0) return n;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace occ
