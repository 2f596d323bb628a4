// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef OCC_CORE_HPP
#define OCC_CORE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace occ {

// Error categories. The C API maps each of these onto an occ_status value,
// so the numbering here is part of the ABI.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kOutOfRange = 2,
  kDimensionMismatch = 3,
  kSpecMismatch = 4,
  kInsufficientPoints = 5,
  kDegenerate = 6,
  kNoMatchedPairs = 7,
  kNonFinite = 8,
  kIo = 9,
  kBadMagic = 10,
  kBadVersion = 11,
  kLengthMismatch = 12,
  kInvalidClass = 13,
  kUnresolvedPath = 14,
  kParse = 15,
  kBadDtype = 16,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// ---------------------------------------------------------------------------
// Class codes

using ClassCode = std::uint8_t;

namespace cls {
inline constexpr ClassCode kFree = 0;
inline constexpr ClassCode kCeiling = 1;
inline constexpr ClassCode kFloor = 2;
inline constexpr ClassCode kWall = 3;
inline constexpr ClassCode kWindow = 4;
inline constexpr ClassCode kChair = 5;
inline constexpr ClassCode kBed = 6;
inline constexpr ClassCode kSofa = 7;
inline constexpr ClassCode kTable = 8;
inline constexpr ClassCode kTvs = 9;
inline constexpr ClassCode kFurniture = 10;
inline constexpr ClassCode kObject = 11;
inline constexpr ClassCode kUnknown = 255;

inline constexpr int kNumSemantic = 11;
// Score columns: free, 11 semantics, unknown.
inline constexpr int kNumScoreColumns = 13;
}  // namespace cls

constexpr bool is_valid_class(int code) noexcept {
  return (code >= 0 && code <= cls::kNumSemantic) || code == cls::kUnknown;
}

constexpr bool is_semantic(int code) noexcept {
  return code >= 1 && code <= cls::kNumSemantic;
}

const char* class_name(ClassCode code) noexcept;

// Column in a 13-wide class table (free=0 .. object=11, unknown=12).
constexpr int class_slot(ClassCode code) noexcept {
  return code == cls::kUnknown ? 12 : static_cast<int>(code);
}

// ---------------------------------------------------------------------------
// Cameras

class CameraIntrinsics {
 public:
  CameraIntrinsics(double fx, double fy, double cx, double cy, int width,
                   int height);

  double fx() const noexcept { return fx_; }
  double fy() const noexcept { return fy_; }
  double cx() const noexcept { return cx_; }
  double cy() const noexcept { return cy_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool operator==(const CameraIntrinsics&) const = default;

 private:
  double fx_, fy_, cx_, cy_;
  int width_, height_;
};

// Rigid camera-to-world transform. Orthonormality and det(R) = +1 are checked
// at construction with tolerance 1e-6.
class CameraPose {
 public:
  CameraPose() : cam_to_world_(Mat4::Identity()) {}
  explicit CameraPose(const Mat4& cam_to_world);
  CameraPose(const Mat3& rotation, const Vec3& translation);

  const Mat4& matrix() const noexcept { return cam_to_world_; }
  Mat3 rotation() const { return cam_to_world_.topLeftCorner<3, 3>(); }
  Vec3 translation() const { return cam_to_world_.topRightCorner<3, 1>(); }

  Vec3 apply(const Vec3& p) const {
    return cam_to_world_.topLeftCorner<3, 3>() * p +
           cam_to_world_.topRightCorner<3, 1>();
  }

 private:
  Mat4 cam_to_world_;
};

// Throws kInvalidArgument unless R is a rotation (tolerance 1e-6).
void check_rotation(const Mat3& r, const char* what);

// Depth along camera +z in meters. A pixel is valid iff finite and > 0.
class DepthMap {
 public:
  DepthMap(int width, int height);
  DepthMap(int width, int height, std::vector<float> values);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  float at(int u, int v) const { return values_[index(u, v)]; }
  float& at(int u, int v) { return values_[index(u, v)]; }
  bool valid(int u, int v) const;
  std::span<const float> values() const noexcept { return values_; }

 private:
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * width_ + u;
  }
  int width_, height_;
  std::vector<float> values_;
};

inline bool is_valid_depth(float d) noexcept {
  return std::isfinite(d) && d > 0.0f;
}

// ---------------------------------------------------------------------------
// Point clouds

struct SemanticPointCloud {
  std::vector<Vec3> points;
  std::vector<ClassCode> labels;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  void reserve(std::size_t n) {
    points.reserve(n);
    labels.reserve(n);
  }
  void push_back(const Vec3& p, ClassCode label) {
    points.push_back(p);
    labels.push_back(label);
  }
  void append(const SemanticPointCloud& other);

  // Throws unless the sizes agree, coordinates are finite and labels valid.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Voxel grids

struct VoxelCoord {
  std::int64_t x = 0, y = 0, z = 0;
  bool operator==(const VoxelCoord&) const = default;
};

class GridSpec {
 public:
  GridSpec(const Vec3& origin, double voxel_size,
           const std::array<std::int64_t, 3>& dims);

  const Vec3& origin() const noexcept { return origin_; }
  double voxel_size() const noexcept { return voxel_size_; }
  const std::array<std::int64_t, 3>& dims() const noexcept { return dims_; }
  std::int64_t num_voxels() const noexcept {
    return dims_[0] * dims_[1] * dims_[2];
  }
  Vec3 extent() const {
    return Vec3(dims_[0], dims_[1], dims_[2]) * voxel_size_;
  }

  bool contains(const VoxelCoord& c) const noexcept {
    return c.x >= 0 && c.y >= 0 && c.z >= 0 && c.x < dims_[0] &&
           c.y < dims_[1] && c.z < dims_[2];
  }

  // floor((p - origin) / voxel_size) per axis; may lie outside the grid.
  VoxelCoord voxel_of(const Vec3& p) const;
  Vec3 voxel_center(const VoxelCoord& c) const;

  bool operator==(const GridSpec&) const = default;

 private:
  Vec3 origin_;
  double voxel_size_;
  std::array<std::int64_t, 3> dims_;
};

// x fastest: x + X * (y + Y * z). Throws kOutOfRange for coords outside.
std::int64_t linear_index(const VoxelCoord& c, const GridSpec& spec);
VoxelCoord delinearize(std::int64_t index, const GridSpec& spec);

// Benchmark grid: 60 x 60 x 36 voxels of 8 cm.
inline constexpr double kBenchmarkVoxelSize = 0.08;
inline constexpr std::array<std::int64_t, 3> kBenchmarkDims = {60, 60, 36};

class VoxelGrid {
 public:
  explicit VoxelGrid(GridSpec spec, ClassCode fill = cls::kFree);
  VoxelGrid(GridSpec spec, std::vector<ClassCode> labels);

  const GridSpec& spec() const noexcept { return spec_; }
  std::span<const ClassCode> labels() const noexcept { return labels_; }
  std::span<ClassCode> labels() noexcept { return labels_; }
  ClassCode at(std::int64_t i) const { return labels_[i]; }
  ClassCode at(const VoxelCoord& c) const {
    return labels_[linear_index(c, spec_)];
  }
  void set(std::int64_t i, ClassCode label);

  bool operator==(const VoxelGrid&) const = default;

 private:
  GridSpec spec_;
  std::vector<ClassCode> labels_;
};

// Per-voxel feature rows (N x D).
class VoxelFeatures {
 public:
  VoxelFeatures(GridSpec spec, RowMatrix values);

  const GridSpec& spec() const noexcept { return spec_; }
  const RowMatrix& values() const noexcept { return values_; }
  Eigen::Index dim() const noexcept { return values_.cols(); }

 private:
  GridSpec spec_;
  RowMatrix values_;
};

// Rotation + translation + uniform scale: p -> s * (R p + t).
struct SimilarityTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double scale = 1.0;

  Vec3 apply(const Vec3& p) const { return scale * (rotation * p + translation); }
  // Apply `this` after `first`.
  SimilarityTransform after(const SimilarityTransform& first) const;
  Mat4 matrix() const;
  void validate() const;
};

SemanticPointCloud transform_cloud(const SemanticPointCloud& cloud,
                                   const SimilarityTransform& t);

// Re-expresses a camera in the frame produced by `t`. Depth values must be
// multiplied by the returned scale for the lifted points to land on the
// transformed cloud.
CameraPose transform_pose(const CameraPose& pose, const SimilarityTransform& t);

// ---------------------------------------------------------------------------
// Threading

// Worker count used by the parallel stages. 0 selects hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

}  // namespace occ

#endif  // OCC_CORE_HPP
