// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace occ {

namespace fs = std::filesystem;

std::size_t dtype_size(DType t) {
  switch (t) {
    case DType::kU8: return 1;
    case DType::kU16: return 2;
    case DType::kU32: return 4;
    case DType::kF32: return 4;
    case DType::kF64: return 8;
  }
  fail(ErrorCode::kBadDtype, "unknown dtype");
}

const char* dtype_name(DType t) {
  switch (t) {
    case DType::kU8: return "u8";
    case DType::kU16: return "u16";
    case DType::kU32: return "u32";
    case DType::kF32: return "f32";
    case DType::kF64: return "f64";
  }
  return "invalid";
}

namespace {

template <typename T>
constexpr DType dtype_of();
template <> constexpr DType dtype_of<std::uint8_t>() { return DType::kU8; }
template <> constexpr DType dtype_of<std::uint16_t>() { return DType::kU16; }
template <> constexpr DType dtype_of<std::uint32_t>() { return DType::kU32; }
template <> constexpr DType dtype_of<float>() { return DType::kF32; }
template <> constexpr DType dtype_of<double>() { return DType::kF64; }

// Element count, or nullopt when the product overflows.
std::optional<std::uint64_t> checked_product(std::span<const std::uint64_t> dims) {
  std::uint64_t n = 1;
  for (auto d : dims) {
    if (d != 0 && n > std::numeric_limits<std::uint64_t>::max() / d) return std::nullopt;
    n *= d;
  }
  return n;
}

void swap_elements(std::span<std::byte> data, std::size_t width) {
  if constexpr (std::endian::native == std::endian::little) {
    (void)data;
    (void)width;
  } else {
    for (std::size_t i = 0; i + width <= data.size(); i += width) {
      std::reverse(data.begin() + i, data.begin() + i + width);
    }
  }
}

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::byte*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename T>
  void le(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::byte buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    bytes(buf, sizeof(T));
  }
  std::vector<std::byte> take() { return std::move(out_); }

 private:
  std::vector<std::byte> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::byte> data) : data_(data) {}

  std::size_t remaining() const { return data_.size() - pos_; }

  std::span<const std::byte> take(std::size_t n, const char* what) {
    if (n > remaining()) {
      fail(ErrorCode::kLengthMismatch, std::string("truncated file while reading ") + what);
    }
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  template <typename T>
  T le(const char* what) {
    auto s = take(sizeof(T), what);
    std::byte buf[sizeof(T)];
    std::memcpy(buf, s.data(), sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
  }

 private:
  std::span<const std::byte> data_;
  std::size_t pos_ = 0;
};

void check_magic(Reader& r, const char* magic) {
  if (r.remaining() < 4) fail(ErrorCode::kBadMagic, "file too short for magic");
  auto m = r.take(4, "magic");
  if (std::memcmp(m.data(), magic, 4) != 0) {
    fail(ErrorCode::kBadMagic, std::string("bad magic: expected ") + magic);
  }
  const auto version = r.le<std::uint32_t>("version");
  if (version != kFormatVersion) {
    fail(ErrorCode::kBadVersion, "unsupported format version " + std::to_string(version));
  }
}

}  // namespace

Tensor::Tensor(DType dtype, std::vector<std::uint64_t> shape)
    : dtype_(dtype), shape_(std::move(shape)) {
  if (shape_.size() > kMaxTensorRank) fail(ErrorCode::kInvalidArgument, "tensor rank too large");
  const auto n = checked_product(shape_);
  if (!n || *n > (std::numeric_limits<std::size_t>::max() / 8)) {
    fail(ErrorCode::kInvalidArgument, "tensor too large");
  }
  data_.assign(static_cast<std::size_t>(*n) * dtype_size(dtype), std::byte{0});
}

template <typename T>
Tensor Tensor::from(DType dtype, std::vector<std::uint64_t> shape, std::span<const T> values) {
  if (dtype != dtype_of<T>()) fail(ErrorCode::kBadDtype, "dtype does not match element type");
  Tensor t(dtype, std::move(shape));
  if (values.size() != t.element_count()) {
    fail(ErrorCode::kLengthMismatch, "value count does not match tensor shape");
  }
  if (!values.empty()) std::memcpy(t.data_.data(), values.data(), values.size_bytes());
  return t;
}

std::uint64_t Tensor::element_count() const noexcept {
  return data_.size() / dtype_size(dtype_);
}

template <typename T>
std::span<const T> Tensor::view() const {
  if (dtype_ != dtype_of<T>()) {
    fail(ErrorCode::kBadDtype, std::string("tensor dtype is ") + dtype_name(dtype_));
  }
  return {reinterpret_cast<const T*>(data_.data()), data_.size() / sizeof(T)};
}

template <typename T>
std::span<T> Tensor::view() {
  if (dtype_ != dtype_of<T>()) {
    fail(ErrorCode::kBadDtype, std::string("tensor dtype is ") + dtype_name(dtype_));
  }
  return {reinterpret_cast<T*>(data_.data()), data_.size() / sizeof(T)};
}

#define OCC_INSTANTIATE(T)                                                               \
  template Tensor Tensor::from<T>(DType, std::vector<std::uint64_t>, std::span<const T>); \
  template std::span<const T> Tensor::view<T>() const;                                   \
  template std::span<T> Tensor::view<T>();
OCC_INSTANTIATE(std::uint8_t)
OCC_INSTANTIATE(std::uint16_t)
OCC_INSTANTIATE(std::uint32_t)
OCC_INSTANTIATE(float)
OCC_INSTANTIATE(double)
#undef OCC_INSTANTIATE

std::vector<double> Tensor::to_double() const {
  std::vector<double> out(element_count());
  auto widen = [&](auto v) { std::copy(v.begin(), v.end(), out.begin()); };
  switch (dtype_) {
    case DType::kU8: widen(view<std::uint8_t>()); break;
    case DType::kU16: widen(view<std::uint16_t>()); break;
    case DType::kU32: widen(view<std::uint32_t>()); break;
    case DType::kF32: widen(view<float>()); break;
    case DType::kF64: widen(view<double>()); break;
  }
  return out;
}

std::vector<std::byte> encode_tensor(const Tensor& t) {
  Writer w;
  w.bytes("OCCT", 4);
  w.le<std::uint32_t>(kFormatVersion);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(t.dtype()));
  w.le<std::uint32_t>(static_cast<std::uint32_t>(t.shape().size()));
  for (auto d : t.shape()) w.le<std::uint64_t>(d);
  auto out = w.take();
  const std::size_t header = out.size();
  out.insert(out.end(), t.bytes().begin(), t.bytes().end());
  swap_elements(std::span(out).subspan(header), dtype_size(t.dtype()));
  return out;
}

Tensor decode_tensor(std::span<const std::byte> bytes) {
  Reader r(bytes);
  check_magic(r, "OCCT");
  const auto raw_dtype = r.le<std::uint32_t>("dtype");
  if (raw_dtype > static_cast<std::uint32_t>(DType::kF64)) {
    fail(ErrorCode::kBadDtype, "unknown dtype " + std::to_string(raw_dtype));
  }
  const auto dtype = static_cast<DType>(raw_dtype);
  const auto ndim = r.le<std::uint32_t>("ndim");
  if (ndim > kMaxTensorRank) {
    fail(ErrorCode::kParse, "tensor rank " + std::to_string(ndim) + " exceeds limit");
  }
  std::vector<std::uint64_t> dims(ndim);
  for (auto& d : dims) d = r.le<std::uint64_t>("dims");
  const auto count = checked_product(dims);
  const std::uint64_t width = dtype_size(dtype);
  if (!count || *count > std::numeric_limits<std::uint64_t>::max() / width ||
      *count * width != r.remaining()) {
    fail(ErrorCode::kLengthMismatch, "tensor payload length does not match its header");
  }
  Tensor t(dtype, std::move(dims));
  auto payload = r.take(t.bytes().size(), "payload");
  std::memcpy(t.bytes().data(), payload.data(), payload.size());
  swap_elements(t.bytes(), width);
  return t;
}

GridSpec file_precision(const GridSpec& spec) {
  auto round = [](double v) { return static_cast<double>(static_cast<float>(v)); };
  const Vec3& o = spec.origin();
  return GridSpec(Vec3(round(o.x()), round(o.y()), round(o.z())), round(spec.voxel_size()),
                  spec.dims());
}

std::vector<std::byte> encode_grid(const VoxelGrid& grid) {
  const auto& spec = grid.spec();
  for (auto d : spec.dims()) {
    if (d > std::numeric_limits<std::uint32_t>::max()) {
      fail(ErrorCode::kInvalidArgument, "grid dims exceed the file format limit");
    }
  }
  Writer w;
  w.bytes("OCCG", 4);
  w.le<std::uint32_t>(kFormatVersion);
  for (auto d : spec.dims()) w.le<std::uint32_t>(static_cast<std::uint32_t>(d));
  w.le<float>(static_cast<float>(spec.voxel_size()));
  for (int a = 0; a < 3; ++a) w.le<float>(static_cast<float>(spec.origin()[a]));
  const auto labels = grid.labels();
  w.bytes(labels.data(), labels.size());
  return w.take();
}

VoxelGrid decode_grid(std::span<const std::byte> bytes) {
  Reader r(bytes);
  check_magic(r, "OCCG");
  std::array<std::int64_t, 3> dims{};
  for (auto& d : dims) d = r.le<std::uint32_t>("dims");
  const float size = r.le<float>("voxel size");
  Vec3 origin;
  for (int a = 0; a < 3; ++a) origin[a] = r.le<float>("origin");
  const auto count = static_cast<std::uint64_t>(dims[0]) * dims[1] * dims[2];
  if (count != r.remaining()) {
    fail(ErrorCode::kLengthMismatch, "grid payload length does not match its header");
  }
  if (!std::isfinite(size) || !(size > 0.0f) || !origin.allFinite() || count == 0) {
    fail(ErrorCode::kParse, "invalid grid header");
  }
  auto payload = r.take(count, "payload");
  std::vector<ClassCode> labels(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto b = static_cast<ClassCode>(payload[i]);
    if (!is_valid_class(b)) {
      fail(ErrorCode::kInvalidClass,
           "invalid class code " + std::to_string(b) + " at voxel " + std::to_string(i));
    }
    labels[i] = b;
  }
  return VoxelGrid(GridSpec(origin, size, dims), std::move(labels));
}

std::vector<std::byte> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  if (size < 0) fail(ErrorCode::kIo, "cannot size " + path.string());
  in.seekg(0, std::ios::beg);
  std::vector<std::byte> data(static_cast<std::size_t>(size));
  if (size > 0 && !in.read(reinterpret_cast<char*>(data.data()), size)) {
    fail(ErrorCode::kIo, "cannot read " + path.string());
  }
  return data;
}

namespace {

fs::path temp_sibling(const fs::path& path) {
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
  return tmp;
}

void write_raw(const fs::path& path, std::span<const std::byte> bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace

void write_file_atomic(const fs::path& path, std::span<const std::byte> bytes) {
  const fs::path tmp = temp_sibling(path);
  try {
    write_raw(tmp, bytes);
    fs::rename(tmp, path);
  } catch (const fs::filesystem_error& e) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    fail(ErrorCode::kIo, e.what());
  } catch (...) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    throw;
  }
}

void write_tensor(const fs::path& path, const Tensor& t) {
  write_file_atomic(path, encode_tensor(t));
}

Tensor read_tensor(const fs::path& path) { return decode_tensor(read_file(path)); }

void write_grid(const fs::path& path, const VoxelGrid& grid) {
  write_file_atomic(path, encode_grid(grid));
}

VoxelGrid read_grid(const fs::path& path) { return decode_grid(read_file(path)); }

OutputBatch::~OutputBatch() {
  if (committed_) return;
  for (const auto& [tmp, final_path] : staged_) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
  }
}

void OutputBatch::add(const fs::path& path, std::vector<std::byte> bytes) {
  const fs::path tmp = temp_sibling(path);
  staged_.emplace_back(tmp, path);
  write_raw(tmp, bytes);
}

void OutputBatch::add_tensor(const fs::path& path, const Tensor& t) {
  add(path, encode_tensor(t));
}

void OutputBatch::add_grid(const fs::path& path, const VoxelGrid& grid) {
  add(path, encode_grid(grid));
}

void OutputBatch::add_text(const fs::path& path, const std::string& text) {
  std::vector<std::byte> bytes(text.size());
  std::memcpy(bytes.data(), text.data(), text.size());
  add(path, std::move(bytes));
}

void OutputBatch::commit() {
  for (const auto& [tmp, final_path] : staged_) {
    std::error_code ec;
    fs::rename(tmp, final_path, ec);
    if (ec) fail(ErrorCode::kIo, "cannot publish " + final_path.string() + ": " + ec.message());
  }
  committed_ = true;
}

// ---------------------------------------------------------------------------
// Conversions

namespace {

void expect_rank(const Tensor& t, std::size_t rank, const char* what) {
  if (t.shape().size() != rank) {
    fail(ErrorCode::kDimensionMismatch, std::string(what) + " tensor must have rank " +
                                            std::to_string(rank));
  }
}

std::pair<int, int> image_dims(const Tensor& t, const char* what) {
  if (t.shape().size() < 2) {
    fail(ErrorCode::kDimensionMismatch, std::string(what) + " tensor must be [H, W, ...]");
  }
  const auto h = t.shape()[0];
  const auto w = t.shape()[1];
  if (h == 0 || w == 0 || h > (1u << 20) || w > (1u << 20)) {
    fail(ErrorCode::kDimensionMismatch, std::string(what) + " image size out of range");
  }
  return {static_cast<int>(w), static_cast<int>(h)};
}

std::vector<std::uint64_t> hw(int width, int height) {
  return {static_cast<std::uint64_t>(height), static_cast<std::uint64_t>(width)};
}

}  // namespace

Tensor depth_to_tensor(const DepthMap& depth) {
  return Tensor::from<float>(DType::kF32, hw(depth.width(), depth.height()), depth.values());
}

DepthMap tensor_to_depth(const Tensor& t) {
  expect_rank(t, 2, "depth");
  const auto [w, h] = image_dims(t, "depth");
  std::vector<float> v;
  if (t.dtype() == DType::kF32) {
    const auto s = t.view<float>();
    v.assign(s.begin(), s.end());
  } else {
    const auto d = t.to_double();
    v.assign(d.begin(), d.end());
  }
  return DepthMap(w, h, std::move(v));
}

Tensor classes_to_tensor(std::span<const ClassCode> labels, int width, int height) {
  return Tensor::from<std::uint8_t>(DType::kU8, hw(width, height), labels);
}

std::vector<ClassCode> tensor_to_classes(const Tensor& t, int width, int height) {
  expect_rank(t, 2, "labels");
  const auto [w, h] = image_dims(t, "labels");
  if (w != width || h != height) fail(ErrorCode::kDimensionMismatch, "label image size mismatch");
  const auto s = t.view<std::uint8_t>();
  for (auto b : s) {
    if (!is_valid_class(b)) fail(ErrorCode::kInvalidClass, "invalid class code " + std::to_string(b));
  }
  return {s.begin(), s.end()};
}

Tensor label_map_to_tensor(const LabelMap& m) {
  return Tensor::from<std::uint32_t>(DType::kU32, hw(m.width(), m.height()), m.ids());
}

LabelMap tensor_to_label_map(const Tensor& t) {
  expect_rank(t, 2, "mask");
  const auto [w, h] = image_dims(t, "mask");
  if (t.dtype() == DType::kU32) {
    const auto s = t.view<std::uint32_t>();
    return LabelMap(w, h, {s.begin(), s.end()});
  }
  if (t.dtype() == DType::kU8 || t.dtype() == DType::kU16) {
    // Narrow masks reserve their all-ones value for "ignore".
    const std::uint32_t narrow_ignore = t.dtype() == DType::kU8 ? 0xFFu : 0xFFFFu;
    std::vector<std::uint32_t> ids;
    for (double d : t.to_double()) {
      const auto v = static_cast<std::uint32_t>(d);
      ids.push_back(v == narrow_ignore ? LabelMap::kIgnore : v);
    }
    return LabelMap(w, h, std::move(ids));
  }
  fail(ErrorCode::kBadDtype, "mask tensor must be an unsigned integer type");
}

Tensor pixel_map_to_tensor(const PixelVoxelMap& m) {
  return Tensor::from<std::uint32_t>(DType::kU32, hw(m.width(), m.height()), m.entries());
}

PixelVoxelMap tensor_to_pixel_map(const Tensor& t) {
  expect_rank(t, 2, "pixel map");
  const auto [w, h] = image_dims(t, "pixel map");
  const auto s = t.view<std::uint32_t>();
  return PixelVoxelMap(w, h, {s.begin(), s.end()});
}

Tensor partition_to_tensor(const SuperpixelPartition& p) {
  return Tensor::from<std::uint32_t>(DType::kU32, hw(p.width(), p.height()), p.indices());
}

SuperpixelPartition tensor_to_partition(const Tensor& t) {
  expect_rank(t, 2, "partition");
  const auto [w, h] = image_dims(t, "partition");
  const auto s = t.view<std::uint32_t>();
  return SuperpixelPartition(w, h, {s.begin(), s.end()});
}

Tensor feature_map_to_tensor(const FeatureMap& f) {
  const RowMatrix& v = f.values();
  std::vector<float> data(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) data[i] = static_cast<float>(v.data()[i]);
  return Tensor::from<float>(DType::kF32,
                             {static_cast<std::uint64_t>(f.height()),
                              static_cast<std::uint64_t>(f.width()),
                              static_cast<std::uint64_t>(f.dim())},
                             data);
}

FeatureMap tensor_to_feature_map(const Tensor& t) {
  expect_rank(t, 3, "feature");
  const auto [w, h] = image_dims(t, "feature");
  const auto d = t.shape()[2];
  if (d == 0) fail(ErrorCode::kDimensionMismatch, "feature dim must be >= 1");
  const auto values = t.to_double();
  RowMatrix m = Eigen::Map<const RowMatrix>(values.data(), static_cast<Eigen::Index>(w) * h,
                                            static_cast<Eigen::Index>(d));
  return FeatureMap(w, h, std::move(m));
}

Tensor matrix_to_tensor_f32(const RowMatrix& m) {
  std::vector<float> data(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.size(); ++i) data[i] = static_cast<float>(m.data()[i]);
  return Tensor::from<float>(DType::kF32,
                             {static_cast<std::uint64_t>(m.rows()),
                              static_cast<std::uint64_t>(m.cols())},
                             data);
}

Tensor matrix_to_tensor_f64(const RowMatrix& m) {
  return Tensor::from<double>(
      DType::kF64, {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())},
      std::span<const double>(m.data(), static_cast<std::size_t>(m.size())));
}

RowMatrix tensor_to_matrix(const Tensor& t) {
  expect_rank(t, 2, "matrix");
  const auto values = t.to_double();
  return Eigen::Map<const RowMatrix>(values.data(), static_cast<Eigen::Index>(t.shape()[0]),
                                     static_cast<Eigen::Index>(t.shape()[1]));
}

VoxelFeatures tensor_to_voxel_features(const Tensor& t, const GridSpec& spec) {
  return VoxelFeatures(spec, tensor_to_matrix(t));
}

ClassScores tensor_to_scores(const Tensor& t, const GridSpec& spec) {
  return ClassScores(spec, tensor_to_matrix(t));
}

Tensor pooled_to_tensor(const PooledFeatures& p) {
  RowMatrix m = p.rows;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (!p.valid[r]) m.row(r).setConstant(std::numeric_limits<double>::quiet_NaN());
  }
  return matrix_to_tensor_f64(m);
}

PooledFeatures tensor_to_pooled(const Tensor& t) {
  PooledFeatures p;
  p.rows = tensor_to_matrix(t);
  p.valid.assign(p.rows.rows(), true);
  for (Eigen::Index r = 0; r < p.rows.rows(); ++r) {
    if (p.rows.row(r).array().isNaN().any()) {
      p.valid[r] = false;
      p.rows.row(r).setZero();
    }
  }
  return p;
}

Tensor cloud_to_tensor(const SemanticPointCloud& c) {
  std::vector<double> data;
  data.reserve(c.size() * 4);
  for (std::size_t i = 0; i < c.size(); ++i) {
    data.insert(data.end(), {c.points[i].x(), c.points[i].y(), c.points[i].z(),
                             static_cast<double>(c.labels[i])});
  }
  return Tensor::from<double>(DType::kF64, {c.size(), 4}, data);
}

SemanticPointCloud tensor_to_cloud(const Tensor& t) {
  expect_rank(t, 2, "cloud");
  if (t.shape()[1] != 4) fail(ErrorCode::kDimensionMismatch, "cloud tensor must be [N, 4]");
  const auto v = t.to_double();
  SemanticPointCloud c;
  c.reserve(static_cast<std::size_t>(t.shape()[0]));
  for (std::size_t i = 0; i + 3 < v.size(); i += 4) {
    const double l = v[i + 3];
    if (!(l >= 0.0 && l <= 255.0) || l != std::floor(l) || !is_valid_class(static_cast<int>(l))) {
      fail(ErrorCode::kInvalidClass, "invalid class code in cloud tensor");
    }
    c.push_back(Vec3(v[i], v[i + 1], v[i + 2]), static_cast<ClassCode>(l));
  }
  c.validate();
  return c;
}

Tensor transform_to_tensor(const SimilarityTransform& t) {
  const Mat4 m = t.matrix();
  RowMatrix r = m;
  return matrix_to_tensor_f64(r);
}

SimilarityTransform tensor_to_transform(const Tensor& t) {
  const RowMatrix m = tensor_to_matrix(t);
  if (m.rows() != 4 || m.cols() != 4) fail(ErrorCode::kDimensionMismatch, "transform must be 4x4");
  SimilarityTransform out;
  const Mat3 sr = m.topLeftCorner(3, 3);
  out.scale = std::cbrt(sr.determinant());
  if (!(out.scale > 0.0)) fail(ErrorCode::kInvalidArgument, "transform scale must be positive");
  out.rotation = sr / out.scale;
  out.translation = m.topRightCorner(3, 1) / out.scale;
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Manifests

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<double> parse_numbers(const std::string& s, std::size_t expected, int line) {
  std::vector<double> out;
  const char* p = s.data();
  const char* end = s.data() + s.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p == end) break;
    double v = 0.0;
    const auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc()) {
      fail(ErrorCode::kParse, "line " + std::to_string(line) + ": expected a number");
    }
    out.push_back(v);
    p = res.ptr;
  }
  if (out.size() != expected) {
    fail(ErrorCode::kParse, "line " + std::to_string(line) + ": expected " +
                                std::to_string(expected) + " numbers, got " +
                                std::to_string(out.size()));
  }
  return out;
}

struct PendingFrame {
  int line = 0;
  std::optional<std::vector<double>> intrinsics;
  std::optional<std::vector<double>> pose;
  std::optional<fs::path> depth, labels, mask, features;
};

FrameRecord finish_frame(const PendingFrame& f) {
  const std::string where = "frame starting at line " + std::to_string(f.line);
  if (!f.intrinsics) fail(ErrorCode::kParse, where + ": missing intrinsics");
  if (!f.pose) fail(ErrorCode::kParse, where + ": missing cam_to_world");
  if (!f.depth) fail(ErrorCode::kParse, where + ": missing depth");
  const auto& k = *f.intrinsics;
  for (int i : {4, 5}) {
    if (k[i] != std::floor(k[i]) || k[i] < 1 || k[i] > (1 << 20)) {
      fail(ErrorCode::kParse, where + ": image size must be a positive integer");
    }
  }
  Mat4 m;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = (*f.pose)[r * 4 + c];
  }
  return FrameRecord{CameraIntrinsics(k[0], k[1], k[2], k[3], static_cast<int>(k[4]),
                                      static_cast<int>(k[5])),
                     CameraPose(m), *f.depth, f.labels, f.mask, f.features};
}

}  // namespace

FrameManifest parse_manifest(const std::string& text, const fs::path& base) {
  FrameManifest out;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool saw_header = false;
  std::optional<PendingFrame> frame;
  auto resolve = [&](const std::string& v) {
    fs::path p(v);
    return p.is_absolute() ? p : base / p;
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected 'key: value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, colon));
    const std::string value = trim(std::string_view(line).substr(colon + 1));
    if (!saw_header) {
      if (key != "occ-manifest") fail(ErrorCode::kParse, "missing 'occ-manifest' header");
      if (value != "1") fail(ErrorCode::kBadVersion, "unsupported manifest version " + value);
      saw_header = true;
      continue;
    }
    if (key == "frame") {
      if (frame) out.frames.push_back(finish_frame(*frame));
      frame = PendingFrame{line_no, {}, {}, {}, {}, {}, {}};
      continue;
    }
    if (value.empty()) {
      fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": empty value for " + key);
    }
    if (!frame) {
      if (key == "grid") out.grid = resolve(value);
      else if (key == "voxel_features") out.voxel_features = resolve(value);
      else if (key == "scores") out.scores = resolve(value);
      else fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": unknown key " + key);
      continue;
    }
    if (key == "intrinsics") frame->intrinsics = parse_numbers(value, 6, line_no);
    else if (key == "cam_to_world") frame->pose = parse_numbers(value, 16, line_no);
    else if (key == "depth") frame->depth = resolve(value);
    else if (key == "labels") frame->labels = resolve(value);
    else if (key == "mask") frame->mask = resolve(value);
    else if (key == "features") frame->features = resolve(value);
    else fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": unknown key " + key);
  }
  if (!saw_header) fail(ErrorCode::kParse, "missing 'occ-manifest' header");
  if (frame) out.frames.push_back(finish_frame(*frame));
  return out;
}

FrameManifest load_manifest(const fs::path& path) {
  const auto bytes = read_file(path);
  const std::string text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  FrameManifest m = parse_manifest(text, path.parent_path());
  auto check = [](const std::optional<fs::path>& p) {
    if (p && !fs::is_regular_file(*p)) {
      fail(ErrorCode::kUnresolvedPath, "referenced file not found: " + p->string());
    }
  };
  check(m.grid);
  check(m.voxel_features);
  check(m.scores);
  for (const auto& f : m.frames) {
    check(f.depth);
    check(f.labels);
    check(f.mask);
    check(f.features);
  }
  return m;
}

std::string format_manifest(const FrameManifest& m, const fs::path& base) {
  auto rel = [&](const fs::path& p) {
    const fs::path r = p.lexically_relative(base);
    if (!r.empty() && *r.begin() != "..") return r.generic_string();
    return p.generic_string();
  };
  std::ostringstream os;
  os << "occ-manifest: 1\n";
  if (m.grid) os << "grid: " << rel(*m.grid) << "\n";
  if (m.voxel_features) os << "voxel_features: " << rel(*m.voxel_features) << "\n";
  if (m.scores) os << "scores: " << rel(*m.scores) << "\n";
  for (std::size_t i = 0; i < m.frames.size(); ++i) {
    const auto& f = m.frames[i];
    const auto& k = f.intrinsics;
    os << "\nframe: " << i << "\n";
    os << "intrinsics: " << format_double(k.fx()) << " " << format_double(k.fy()) << " "
       << format_double(k.cx()) << " " << format_double(k.cy()) << " " << k.width() << " "
       << k.height() << "\n";
    os << "cam_to_world:";
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) os << " " << format_double(f.pose.matrix()(r, c));
    }
    os << "\n";
    os << "depth: " << rel(f.depth) << "\n";
    if (f.labels) os << "labels: " << rel(*f.labels) << "\n";
    if (f.mask) os << "mask: " << rel(*f.mask) << "\n";
    if (f.features) os << "features: " << rel(*f.features) << "\n";
  }
  return os.str();
}

}  // namespace occ
