// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

// On-disk formats. All integers are little-endian.
//
// Tensor file (.occt)
//   "OCCT" | u32 version = 1 | u32 dtype | u32 ndim | u64 dims[ndim] | payload
//   dtype: 0 = u8, 1 = u16, 2 = u32, 3 = f32, 4 = f64. Payload is row-major
//   with the last dimension fastest and must be exactly prod(dims) elements.
//
// Grid file (.occg)
//   "OCCG" | u32 version = 1 | u32 X, Y, Z | f32 voxel_size | f32 origin[3]
//   | X*Y*Z class-code bytes, x fastest.

#ifndef OCC_IO_HPP
#define OCC_IO_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "occ/cloud_ops.hpp"
#include "occ/core.hpp"
#include "occ/distill.hpp"
#include "occ/lift.hpp"
#include "occ/metrics.hpp"

namespace occ {

enum class DType : std::uint32_t { kU8 = 0, kU16 = 1, kU32 = 2, kF32 = 3, kF64 = 4 };

std::size_t dtype_size(DType t);
const char* dtype_name(DType t);

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::uint32_t kMaxTensorRank = 8;

// Dense tensor with host-order payload bytes.
class Tensor {
 public:
  Tensor() = default;
  Tensor(DType dtype, std::vector<std::uint64_t> shape);

  template <typename T>
  static Tensor from(DType dtype, std::vector<std::uint64_t> shape, std::span<const T> values);

  DType dtype() const noexcept { return dtype_; }
  const std::vector<std::uint64_t>& shape() const noexcept { return shape_; }
  std::uint64_t element_count() const noexcept;
  std::span<const std::byte> bytes() const noexcept { return data_; }
  std::span<std::byte> bytes() noexcept { return data_; }

  // Checked element views; throw kBadDtype on a type mismatch.
  template <typename T>
  std::span<const T> view() const;
  template <typename T>
  std::span<T> view();

  // Any numeric dtype widened to double.
  std::vector<double> to_double() const;

  bool operator==(const Tensor&) const = default;

 private:
  DType dtype_ = DType::kU8;
  std::vector<std::uint64_t> shape_;
  std::vector<std::byte> data_;
};

std::vector<std::byte> encode_tensor(const Tensor& t);
// Validates the header completely before touching the payload.
Tensor decode_tensor(std::span<const std::byte> bytes);
std::vector<std::byte> encode_grid(const VoxelGrid& grid);
VoxelGrid decode_grid(std::span<const std::byte> bytes);

// Rounds origin and voxel size to f32, the precision grid files store.
GridSpec file_precision(const GridSpec& spec);

std::vector<std::byte> read_file(const std::filesystem::path& path);
// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::byte> bytes);

void write_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor(const std::filesystem::path& path);
void write_grid(const std::filesystem::path& path, const VoxelGrid& grid);
VoxelGrid read_grid(const std::filesystem::path& path);

// Stages several outputs and publishes them together; anything not committed
// is removed on destruction.
class OutputBatch {
 public:
  OutputBatch() = default;
  OutputBatch(const OutputBatch&) = delete;
  OutputBatch& operator=(const OutputBatch&) = delete;
  ~OutputBatch();

  void add(const std::filesystem::path& path, std::vector<std::byte> bytes);
  void add_tensor(const std::filesystem::path& path, const Tensor& t);
  void add_grid(const std::filesystem::path& path, const VoxelGrid& grid);
  void add_text(const std::filesystem::path& path, const std::string& text);
  void commit();

 private:
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_;
  bool committed_ = false;
};

// ---------------------------------------------------------------------------
// Conversions between tensors and domain types

Tensor depth_to_tensor(const DepthMap& depth);
DepthMap tensor_to_depth(const Tensor& t);

Tensor classes_to_tensor(std::span<const ClassCode> labels, int width, int height);
std::vector<ClassCode> tensor_to_classes(const Tensor& t, int width, int height);

Tensor label_map_to_tensor(const LabelMap& m);
LabelMap tensor_to_label_map(const Tensor& t);

Tensor pixel_map_to_tensor(const PixelVoxelMap& m);
PixelVoxelMap tensor_to_pixel_map(const Tensor& t);

Tensor partition_to_tensor(const SuperpixelPartition& p);
SuperpixelPartition tensor_to_partition(const Tensor& t);

// f32 [H, W, D].
Tensor feature_map_to_tensor(const FeatureMap& f);
FeatureMap tensor_to_feature_map(const Tensor& t);

// f32 [N, D].
Tensor matrix_to_tensor_f32(const RowMatrix& m);
// f64 [rows, cols].
Tensor matrix_to_tensor_f64(const RowMatrix& m);
RowMatrix tensor_to_matrix(const Tensor& t);

VoxelFeatures tensor_to_voxel_features(const Tensor& t, const GridSpec& spec);
ClassScores tensor_to_scores(const Tensor& t, const GridSpec& spec);

// f64 [Q, D]; invalid rows are all-NaN.
Tensor pooled_to_tensor(const PooledFeatures& p);
PooledFeatures tensor_to_pooled(const Tensor& t);

// f64 [N, 4]: x, y, z, class code.
Tensor cloud_to_tensor(const SemanticPointCloud& c);
SemanticPointCloud tensor_to_cloud(const Tensor& t);

// f64 [4, 4] holding s * [R | t].
Tensor transform_to_tensor(const SimilarityTransform& t);
SimilarityTransform tensor_to_transform(const Tensor& t);

// ---------------------------------------------------------------------------
// Manifests
//
//   occ-manifest: 1
//   grid: gt.occg                  (clip level, optional)
//   voxel_features: vox.occt       (clip level, optional)
//   scores: scores.occt            (clip level, optional)
//   frame: 0                       (starts a frame record)
//   intrinsics: fx fy cx cy width height
//   cam_to_world: 16 row-major numbers
//   depth: f000_depth.occt
//   labels: f000_labels.occt       (optional)
//   mask: f000_mask.occt           (optional)
//   features: f000_feat.occt       (optional)
//
// Relative paths resolve against the manifest's directory. Blank lines and
// lines starting with '#' are ignored.

struct FrameRecord {
  CameraIntrinsics intrinsics;
  CameraPose pose;
  std::filesystem::path depth;
  std::optional<std::filesystem::path> labels;
  std::optional<std::filesystem::path> mask;
  std::optional<std::filesystem::path> features;
};

struct FrameManifest {
  std::optional<std::filesystem::path> grid;
  std::optional<std::filesystem::path> voxel_features;
  std::optional<std::filesystem::path> scores;
  std::vector<FrameRecord> frames;
};

// Parses text; paths are resolved against `base` but not checked.
FrameManifest parse_manifest(const std::string& text, const std::filesystem::path& base);
// Parses and checks that every referenced file exists.
FrameManifest load_manifest(const std::filesystem::path& path);
// Paths are written relative to `base` when they live beneath it.
std::string format_manifest(const FrameManifest& m, const std::filesystem::path& base);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace occ

#endif  // OCC_IO_HPP
