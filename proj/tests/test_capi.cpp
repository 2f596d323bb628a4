// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "occ/occ.h"

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& tag) {
  auto dir = fs::temp_directory_path() /
             ("occ_capi_" + tag + "_" + std::to_string(std::random_device{}()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(CApi, StatusStringsAndVersion) {
  EXPECT_STREQ(occ_status_string(OCC_OK), "ok");
  EXPECT_STRNE(occ_status_string(OCC_ERR_BAD_MAGIC), occ_status_string(OCC_ERR_BAD_VERSION));
  EXPECT_STREQ(occ_version(), "0.1.0");
}

TEST(CApi, NullArgumentsRejected) {
  EXPECT_EQ(occ_config_create(nullptr), OCC_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(occ_cloud_create(nullptr, nullptr, 3, nullptr), OCC_ERR_INVALID_ARGUMENT);
  int64_t idx = 0;
  EXPECT_EQ(occ_linear_index(nullptr, 0, 0, 0, &idx), OCC_ERR_INVALID_ARGUMENT);
  EXPECT_GT(std::strlen(occ_last_error()), 0u);
}

TEST(CApi, ConfigRoundTrip) {
  occ_config* cfg = nullptr;
  ASSERT_EQ(occ_config_create(&cfg), OCC_OK);
  double v = 0;
  ASSERT_EQ(occ_config_get_double(cfg, "voxel_size", &v), OCC_OK);
  EXPECT_EQ(v, 0.08);
  ASSERT_EQ(occ_config_get_double(cfg, "tau", &v), OCC_OK);
  EXPECT_EQ(v, 0.07);
  EXPECT_EQ(occ_config_set_double(cfg, "tau", 0.5), OCC_OK);
  occ_config_get_double(cfg, "tau", &v);
  EXPECT_EQ(v, 0.5);
  EXPECT_EQ(occ_config_set_double(cfg, "nope", 1.0), OCC_ERR_INVALID_ARGUMENT);
  int64_t i = 0;
  ASSERT_EQ(occ_config_get_int(cfg, "seed", &i), OCC_OK);
  EXPECT_EQ(i, 42);
  EXPECT_EQ(occ_config_set_int(cfg, "stat_k", -1), OCC_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(occ_config_set_int(cfg, "normalize", 1), OCC_OK);
  occ_config_get_int(cfg, "normalize", &i);
  EXPECT_EQ(i, 1);
  int64_t dims[3];
  occ_config_get_dims(cfg, dims);
  EXPECT_EQ(dims[0], 60);
  EXPECT_EQ(dims[2], 36);
  EXPECT_EQ(occ_config_set_string(cfg, "anchor", "min"), OCC_OK);
  EXPECT_EQ(occ_config_set_string(cfg, "anchor", "sideways"), OCC_ERR_INVALID_ARGUMENT);
  occ_config_destroy(cfg);
}

TEST(CApi, LinearIndex) {
  const int64_t dims[3] = {60, 60, 36};
  int64_t idx = -1;
  EXPECT_EQ(occ_linear_index(dims, 59, 59, 35, &idx), OCC_OK);
  EXPECT_EQ(idx, 129599);
  EXPECT_EQ(occ_linear_index(dims, 60, 0, 0, &idx), OCC_ERR_OUT_OF_RANGE);
}

TEST(CApi, CloudFilterVoxelizeAndMetrics) {
  std::vector<double> xyz = {0.01, 0.01, 0.01, 0.02, 0.02, 0.02, 0.03, 0.01, 0.02,
                             0.13, 0.01, 0.01, 5.0,  5.0,  5.0};
  std::vector<uint8_t> labels = {2, 2, 3, 4, 1};
  occ_cloud* cloud = nullptr;
  ASSERT_EQ(occ_cloud_create(xyz.data(), labels.data(), 5, &cloud), OCC_OK);
  EXPECT_EQ(occ_cloud_size(cloud), 5u);

  occ_cloud* kept = nullptr;
  ASSERT_EQ(occ_radius_filter(cloud, 0.2, 1, &kept), OCC_OK);
  EXPECT_EQ(occ_cloud_size(kept), 4u);
  occ_cloud_destroy(kept);

  const double origin[3] = {0, 0, 0};
  const int64_t dims[3] = {2, 1, 1};
  occ_grid* grid = nullptr;
  ASSERT_EQ(occ_voxelize(cloud, origin, 0.1, dims, &grid), OCC_OK);
  size_t n = 0;
  const uint8_t* l = occ_grid_labels(grid, &n);
  ASSERT_EQ(n, 2u);
  EXPECT_EQ(l[0], 2);
  EXPECT_EQ(l[1], 4);

  const uint8_t gt_labels[2] = {1, 2};
  const uint8_t pred_labels[2] = {1, 1};
  occ_grid *gt = nullptr, *pred = nullptr;
  ASSERT_EQ(occ_grid_create(origin, 1.0, dims, gt_labels, &gt), OCC_OK);
  ASSERT_EQ(occ_grid_create(origin, 1.0, dims, pred_labels, &pred), OCC_OK);
  double iou = 0, miou = 0, per[11];
  int present[11];
  ASSERT_EQ(occ_binary_iou(pred, gt, &iou), OCC_OK);
  EXPECT_EQ(iou, 100.0);
  ASSERT_EQ(occ_semantic_miou(pred, gt, 0, &miou, per, present), OCC_OK);
  EXPECT_EQ(miou, 25.0);
  EXPECT_EQ(per[0], 50.0);
  EXPECT_EQ(present[1], 1);
  EXPECT_EQ(present[2], 0);
  EXPECT_EQ(occ_binary_iou(pred, grid, &iou), OCC_ERR_SPEC_MISMATCH);

  const uint8_t bad[2] = {1, 12};
  occ_grid* invalid = nullptr;
  EXPECT_EQ(occ_grid_create(origin, 1.0, dims, bad, &invalid), OCC_ERR_INVALID_CLASS);
  EXPECT_EQ(invalid, nullptr);

  occ_grid_destroy(gt);
  occ_grid_destroy(pred);
  occ_grid_destroy(grid);
  occ_cloud_destroy(cloud);
}

TEST(CApi, FileRoundTrips) {
  const auto dir = temp_dir("files");
  const double xyz[6] = {1, 2, 3, -1, -2, -3};
  const uint8_t labels[2] = {5, 255};
  occ_cloud* cloud = nullptr;
  ASSERT_EQ(occ_cloud_create(xyz, labels, 2, &cloud), OCC_OK);
  const std::string cpath = (dir / "c.occt").string();
  ASSERT_EQ(occ_cloud_write(cpath.c_str(), cloud), OCC_OK);
  occ_cloud* back = nullptr;
  ASSERT_EQ(occ_cloud_read(cpath.c_str(), &back), OCC_OK);
  double xyz2[6];
  uint8_t labels2[2];
  ASSERT_EQ(occ_cloud_copy(back, xyz2, labels2), OCC_OK);
  EXPECT_EQ(std::memcmp(xyz, xyz2, sizeof xyz), 0);
  EXPECT_EQ(labels2[1], 255);

  const double origin[3] = {0.5, 0.25, -1};
  const int64_t dims[3] = {3, 2, 1};
  const uint8_t gl[6] = {0, 1, 2, 3, 11, 255};
  occ_grid* grid = nullptr;
  ASSERT_EQ(occ_grid_create(origin, 0.25, dims, gl, &grid), OCC_OK);
  const std::string gpath = (dir / "g.occg").string();
  ASSERT_EQ(occ_grid_write(gpath.c_str(), grid), OCC_OK);
  occ_grid* gback = nullptr;
  ASSERT_EQ(occ_grid_read(gpath.c_str(), &gback), OCC_OK);
  double o2[3], vs = 0;
  int64_t d2[3];
  occ_grid_info(gback, o2, &vs, d2);
  EXPECT_EQ(vs, 0.25);
  EXPECT_EQ(o2[1], 0.25);
  EXPECT_EQ(d2[0], 3);
  size_t n = 0;
  EXPECT_EQ(std::memcmp(occ_grid_labels(gback, &n), gl, 6), 0);

  occ_grid* missing = nullptr;
  EXPECT_EQ(occ_grid_read((dir / "nope.occg").string().c_str(), &missing), OCC_ERR_IO);
  EXPECT_EQ(occ_grid_read(cpath.c_str(), &missing), OCC_ERR_BAD_MAGIC);

  occ_grid_destroy(grid);
  occ_grid_destroy(gback);
  occ_cloud_destroy(cloud);
  occ_cloud_destroy(back);
  fs::remove_all(dir);
}

TEST(CApi, ContrastiveLoss) {
  const double eye[4] = {1, 0, 0, 1};
  double loss = 0, grad[4];
  size_t pairs = 0;
  ASSERT_EQ(occ_contrastive_loss(eye, nullptr, eye, nullptr, 2, 2, 1.0, 0, 0, &loss, &pairs, grad),
            OCC_OK);
  EXPECT_NEAR(loss, 2 * std::log1p(std::exp(-1.0)), 1e-12);
  EXPECT_EQ(pairs, 2u);
  const uint8_t none[2] = {0, 0};
  EXPECT_EQ(occ_contrastive_loss(eye, none, eye, nullptr, 2, 2, 1.0, 0, 0, &loss, &pairs, nullptr),
            OCC_ERR_NO_MATCHED_PAIRS);
  EXPECT_NE(std::string(occ_last_error()).find("no matched pairs"), std::string::npos);
}

TEST(CApi, RunStageSynthAndEval) {
  const auto dir = temp_dir("stage");
  occ_config* cfg = nullptr;
  occ_config_create(&cfg);
  occ_config_set_int(cfg, "synth_frames", 3);
  occ_stage_args* args = nullptr;
  occ_stage_args_create(&args);
  occ_stage_args_set_path(args, "out", (dir / "s").string().c_str());
  char* summary = nullptr;
  ASSERT_EQ(occ_run_stage("synth", cfg, args, &summary), OCC_OK) << occ_last_error();
  EXPECT_EQ(std::string(summary).rfind("stage=synth ", 0), 0u);
  occ_string_free(summary);
  occ_stage_args_destroy(args);

  occ_stage_args_create(&args);
  const std::string gt = (dir / "s" / "gt.occg").string();
  occ_stage_args_set_path(args, "gt", gt.c_str());
  occ_stage_args_set_path(args, "pred", gt.c_str());
  ASSERT_EQ(occ_run_stage("eval", cfg, args, &summary), OCC_OK);
  EXPECT_NE(std::string(summary).find("iou=100.0 miou=100.0"), std::string::npos) << summary;
  occ_string_free(summary);
  summary = nullptr;
  EXPECT_EQ(occ_run_stage("bogus", cfg, args, &summary), OCC_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(summary, nullptr);
  occ_stage_args_destroy(args);
  occ_config_destroy(cfg);
  fs::remove_all(dir);
}

}  // namespace
