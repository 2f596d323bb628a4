// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "occ/core.hpp"
#include "test_util.hpp"

namespace occ {
namespace {

const GridSpec kBench(Vec3::Zero(), kBenchmarkVoxelSize, kBenchmarkDims);

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

TEST(LinearIndex, Examples) {
  EXPECT_EQ(linear_index({0, 0, 0}, kBench), 0);
  EXPECT_EQ(linear_index({59, 59, 35}, kBench), 60 * 60 * 36 - 1);
  EXPECT_EQ(linear_index({1, 0, 0}, kBench), 1);
  EXPECT_EQ(linear_index({0, 1, 0}, kBench), 60);
  EXPECT_EQ(linear_index({0, 0, 1}, kBench), 3600);
}

TEST(LinearIndex, OutOfRange) {
  EXPECT_EQ(code_of([] { linear_index({60, 0, 0}, kBench); }), ErrorCode::kOutOfRange);
  EXPECT_EQ(code_of([] { linear_index({0, -1, 0}, kBench); }), ErrorCode::kOutOfRange);
  EXPECT_EQ(code_of([] { linear_index({0, 0, 36}, kBench); }), ErrorCode::kOutOfRange);
}

TEST(Delinearize, Examples) {
  EXPECT_EQ(delinearize(0, kBench), (VoxelCoord{0, 0, 0}));
  EXPECT_EQ(delinearize(60, kBench), (VoxelCoord{0, 1, 0}));
  EXPECT_EQ(delinearize(3600, kBench), (VoxelCoord{0, 0, 1}));
  EXPECT_EQ(code_of([] { delinearize(129600, kBench); }), ErrorCode::kOutOfRange);
  EXPECT_EQ(code_of([] { delinearize(-1, kBench); }), ErrorCode::kOutOfRange);
}

TEST(LinearIndex, RoundTrip) {
  const GridSpec spec(Vec3(1, 2, 3), 0.5, {7, 5, 3});
  for (std::int64_t i = 0; i < spec.num_voxels(); ++i) {
    EXPECT_EQ(linear_index(delinearize(i, spec), spec), i);
  }
  for (std::int64_t z = 0; z < 3; ++z) {
    for (std::int64_t y = 0; y < 5; ++y) {
      for (std::int64_t x = 0; x < 7; ++x) {
        const VoxelCoord c{x, y, z};
        EXPECT_EQ(delinearize(linear_index(c, spec), spec), c);
      }
    }
  }
}

TEST(GridSpec, BenchmarkShape) {
  EXPECT_EQ(kBench.num_voxels(), 129600);
  const Vec3 e = kBench.extent();
  EXPECT_NEAR(e.x(), 4.8, 1e-12);
  EXPECT_NEAR(e.y(), 4.8, 1e-12);
  EXPECT_NEAR(e.z(), 2.88, 1e-12);
}

TEST(GridSpec, Invariants) {
  EXPECT_EQ(code_of([] { GridSpec(Vec3::Zero(), 0.0, {1, 1, 1}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { GridSpec(Vec3::Zero(), -1.0, {1, 1, 1}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { GridSpec(Vec3::Zero(), 1.0, {0, 1, 1}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { GridSpec(Vec3(NAN, 0, 0), 1.0, {1, 1, 1}); }), ErrorCode::kNonFinite);
}

TEST(GridSpec, VoxelOfHalfOpen) {
  const GridSpec spec(Vec3::Zero(), 0.5, {4, 4, 4});
  EXPECT_EQ(spec.voxel_of(Vec3(0, 0, 0)), (VoxelCoord{0, 0, 0}));
  EXPECT_EQ(spec.voxel_of(Vec3(0.5, 0.25, 1.0)), (VoxelCoord{1, 0, 2}));
  EXPECT_EQ(spec.voxel_of(Vec3(-0.01, 0, 0)), (VoxelCoord{-1, 0, 0}));
  EXPECT_EQ(spec.voxel_center({1, 2, 3}), Vec3(0.75, 1.25, 1.75));
}

TEST(ClassCode, ValidSet) {
  int valid = 0;
  for (int c = 0; c < 256; ++c) valid += is_valid_class(c);
  EXPECT_EQ(valid, 13);
  EXPECT_TRUE(is_valid_class(255));
  EXPECT_FALSE(is_valid_class(12));
  EXPECT_FALSE(is_semantic(0));
  EXPECT_FALSE(is_semantic(255));
  EXPECT_TRUE(is_semantic(11));
  EXPECT_STREQ(class_name(cls::kCeiling), "ceiling");
  EXPECT_STREQ(class_name(cls::kObject), "object");
  EXPECT_STREQ(class_name(cls::kUnknown), "unknown");
  EXPECT_EQ(class_slot(cls::kUnknown), 12);
}

TEST(CameraIntrinsics, Invariants) {
  EXPECT_NO_THROW(CameraIntrinsics(100, 100, 50, 50, 1, 1));
  EXPECT_EQ(code_of([] { CameraIntrinsics(0, 100, 50, 50, 10, 10); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { CameraIntrinsics(100, -1, 50, 50, 10, 10); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { CameraIntrinsics(100, 100, INFINITY, 50, 10, 10); }),
            ErrorCode::kNonFinite);
  EXPECT_EQ(code_of([] { CameraIntrinsics(100, 100, 50, 50, 0, 10); }),
            ErrorCode::kInvalidArgument);
}

TEST(CameraPose, RejectsNonRigid) {
  Mat4 m = Mat4::Identity();
  EXPECT_NO_THROW(CameraPose{m});
  m(0, 0) = 1.01;
  EXPECT_EQ(code_of([&] { CameraPose{m}; }), ErrorCode::kInvalidArgument);
  m = Mat4::Identity();
  m(0, 0) = -1.0;  // reflection
  EXPECT_EQ(code_of([&] { CameraPose{m}; }), ErrorCode::kInvalidArgument);
  m = Mat4::Identity();
  m(3, 0) = 0.5;
  EXPECT_EQ(code_of([&] { CameraPose{m}; }), ErrorCode::kInvalidArgument);
}

TEST(CameraPose, AcceptsRandomRotations) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    EXPECT_NO_THROW(CameraPose(testing::random_rotation(rng), Vec3(1, 2, 3)));
  }
}

TEST(DepthMap, Validity) {
  DepthMap d(3, 1, {1.0f, 0.0f, NAN});
  EXPECT_TRUE(d.valid(0, 0));
  EXPECT_FALSE(d.valid(1, 0));
  EXPECT_FALSE(d.valid(2, 0));
  EXPECT_FALSE(is_valid_depth(-1.0f));
  EXPECT_FALSE(is_valid_depth(INFINITY));
  EXPECT_EQ(code_of([] { DepthMap(2, 2, {1.0f}); }), ErrorCode::kDimensionMismatch);
}

TEST(SemanticPointCloud, Validate) {
  SemanticPointCloud c;
  c.push_back(Vec3(0, 0, 0), 3);
  EXPECT_NO_THROW(c.validate());
  c.labels[0] = 12;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::kInvalidClass);
  c.labels[0] = 1;
  c.points[0].x() = NAN;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::kNonFinite);
  c.points[0].x() = 0;
  c.labels.push_back(1);
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::kDimensionMismatch);
}

TEST(VoxelGrid, Invariants) {
  const GridSpec spec(Vec3::Zero(), 1.0, {2, 1, 1});
  EXPECT_EQ(code_of([&] { VoxelGrid(spec, std::vector<ClassCode>{1}); }),
            ErrorCode::kLengthMismatch);
  EXPECT_EQ(code_of([&] { VoxelGrid(spec, std::vector<ClassCode>{1, 13}); }),
            ErrorCode::kInvalidClass);
  VoxelGrid g(spec);
  EXPECT_EQ(g.at(1), cls::kFree);
  g.set(1, cls::kUnknown);
  EXPECT_EQ(g.at(VoxelCoord{1, 0, 0}), cls::kUnknown);
  EXPECT_EQ(code_of([&] { g.set(0, 200); }), ErrorCode::kInvalidClass);
}

TEST(VoxelFeatures, Invariants) {
  const GridSpec spec(Vec3::Zero(), 1.0, {2, 1, 1});
  EXPECT_NO_THROW(VoxelFeatures(spec, RowMatrix::Zero(2, 3)));
  EXPECT_EQ(code_of([&] { VoxelFeatures(spec, RowMatrix::Zero(3, 3)); }),
            ErrorCode::kDimensionMismatch);
  RowMatrix bad = RowMatrix::Zero(2, 3);
  bad(1, 1) = NAN;
  EXPECT_EQ(code_of([&] { VoxelFeatures(spec, bad); }), ErrorCode::kNonFinite);
}

TEST(SimilarityTransform, ComposeAndPose) {
  std::mt19937_64 rng(5);
  SimilarityTransform a{testing::random_rotation(rng), Vec3(1, -2, 0.5), 1.7};
  SimilarityTransform b{testing::random_rotation(rng), Vec3(0.3, 0.1, -1), 0.6};
  const SimilarityTransform ab = b.after(a);
  const CameraPose pose(testing::random_rotation(rng), Vec3(0.2, 0.4, 1.1));
  const CameraPose moved = transform_pose(pose, ab);
  for (int i = 0; i < 20; ++i) {
    const Vec3 p(testing::uniform(rng, -3, 3), testing::uniform(rng, -3, 3),
                 testing::uniform(rng, -3, 3));
    EXPECT_LT((ab.apply(p) - b.apply(a.apply(p))).norm(), 1e-12);
    const Vec3 m = ab.matrix().topLeftCorner<3, 3>() * p + ab.matrix().topRightCorner<3, 1>();
    EXPECT_LT((m - ab.apply(p)).norm(), 1e-12);
    // Camera-frame point x at depth scaled by s lands on the transformed world point.
    EXPECT_LT((moved.apply(ab.scale * p) - ab.apply(pose.apply(p))).norm(), 1e-12);
  }
}

TEST(Threads, SetAndQuery) {
  set_thread_count(3);
  EXPECT_EQ(thread_count(), 3u);
  set_thread_count(0);
  EXPECT_GE(thread_count(), 1u);
}

}  // namespace
}  // namespace occ
