/* SPDX-FileCopyrightText: 2026 The occkit Authors
 * SPDX-License-Identifier: Apache-2.0 */

/* C interface to the occupancy toolkit.
 *
 * Every function returns an occ_status. On failure the message of the most
 * recent error on the calling thread is available from occ_last_error().
 * Objects are opaque handles released with their *_destroy function; strings
 * returned through char** are released with occ_string_free. */

#ifndef OCC_OCC_H
#define OCC_OCC_H

#include <stddef.h>
#include <stdint.h>

#if defined(OCC_BUILDING_LIBRARY)
#define OCC_API __attribute__((visibility("default")))
#else
#define OCC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum occ_status {
  OCC_OK = 0,
  OCC_ERR_INVALID_ARGUMENT = 1,
  OCC_ERR_OUT_OF_RANGE = 2,
  OCC_ERR_DIMENSION_MISMATCH = 3,
  OCC_ERR_SPEC_MISMATCH = 4,
  OCC_ERR_INSUFFICIENT_POINTS = 5,
  OCC_ERR_DEGENERATE = 6,
  OCC_ERR_NO_MATCHED_PAIRS = 7,
  OCC_ERR_NON_FINITE = 8,
  OCC_ERR_IO = 9,
  OCC_ERR_BAD_MAGIC = 10,
  OCC_ERR_BAD_VERSION = 11,
  OCC_ERR_LENGTH_MISMATCH = 12,
  OCC_ERR_INVALID_CLASS = 13,
  OCC_ERR_UNRESOLVED_PATH = 14,
  OCC_ERR_PARSE = 15,
  OCC_ERR_BAD_DTYPE = 16,
  OCC_ERR_INTERNAL = 99
} occ_status;

OCC_API const char* occ_status_string(occ_status status);
OCC_API const char* occ_last_error(void);
OCC_API const char* occ_version(void);
OCC_API void occ_string_free(char* s);

/* 0 selects the available hardware parallelism. */
OCC_API void occ_set_threads(unsigned n);

/* ---- Pipeline configuration ------------------------------------------- */

typedef struct occ_config occ_config;

OCC_API occ_status occ_config_create(occ_config** out);
OCC_API void occ_config_destroy(occ_config* cfg);

/* Keys: filter_radius, std_ratio, inlier_threshold, wall_height,
 * voxel_size, tau, feature_noise, perturb_tilt_deg, perturb_scale,
 * perturb_lift. */
OCC_API occ_status occ_config_set_double(occ_config* cfg, const char* key, double value);
OCC_API occ_status occ_config_get_double(const occ_config* cfg, const char* key, double* value);
/* Keys: min_neighbors, stat_k, ransac_iterations, seed, threads,
 * synth_frames, synth_furniture, feature_dim; flags: normalize,
 * mean_reduction, split_components, benchmark_mode. */
OCC_API occ_status occ_config_set_int(occ_config* cfg, const char* key, int64_t value);
OCC_API occ_status occ_config_get_int(const occ_config* cfg, const char* key, int64_t* value);
/* Key: anchor ("auto", "grid" or "min"). */
OCC_API occ_status occ_config_set_string(occ_config* cfg, const char* key, const char* value);
OCC_API occ_status occ_config_set_dims(occ_config* cfg, int64_t x, int64_t y, int64_t z);
OCC_API occ_status occ_config_get_dims(const occ_config* cfg, int64_t dims[3]);

typedef struct occ_stage_args occ_stage_args;

OCC_API occ_status occ_stage_args_create(occ_stage_args** out);
OCC_API void occ_stage_args_destroy(occ_stage_args* args);
OCC_API occ_status occ_stage_args_set_path(occ_stage_args* args, const char* key,
                                           const char* path);
OCC_API occ_status occ_stage_args_add_pair(occ_stage_args* args, const char* f3d,
                                           const char* f2d);

/* Runs one pipeline stage; *summary receives the key=value records. */
OCC_API occ_status occ_run_stage(const char* stage, const occ_config* cfg,
                                 const occ_stage_args* args, char** summary);

/* ---- Point clouds ------------------------------------------------------ */

typedef struct occ_cloud occ_cloud;

/* xyz holds 3n doubles; labels may be NULL (all unknown). */
OCC_API occ_status occ_cloud_create(const double* xyz, const uint8_t* labels, size_t n,
                                    occ_cloud** out);
OCC_API void occ_cloud_destroy(occ_cloud* cloud);
OCC_API size_t occ_cloud_size(const occ_cloud* cloud);
/* Copies into caller buffers of 3n doubles and n bytes; either may be NULL. */
OCC_API occ_status occ_cloud_copy(const occ_cloud* cloud, double* xyz, uint8_t* labels);
OCC_API occ_status occ_cloud_read(const char* path, occ_cloud** out);
OCC_API occ_status occ_cloud_write(const char* path, const occ_cloud* cloud);

OCC_API occ_status occ_radius_filter(const occ_cloud* cloud, double radius,
                                     size_t min_neighbors, occ_cloud** out);
OCC_API occ_status occ_statistical_filter(const occ_cloud* cloud, size_t k, double std_ratio,
                                          occ_cloud** out);

/* ---- Voxel grids ------------------------------------------------------- */

typedef struct occ_grid occ_grid;

/* labels may be NULL (all free). */
OCC_API occ_status occ_grid_create(const double origin[3], double voxel_size,
                                   const int64_t dims[3], const uint8_t* labels,
                                   occ_grid** out);
OCC_API void occ_grid_destroy(occ_grid* grid);
OCC_API occ_status occ_grid_info(const occ_grid* grid, double origin[3], double* voxel_size,
                                 int64_t dims[3]);
/* Borrowed pointer valid until the grid is destroyed. */
OCC_API const uint8_t* occ_grid_labels(const occ_grid* grid, size_t* count);
OCC_API occ_status occ_grid_read(const char* path, occ_grid** out);
OCC_API occ_status occ_grid_write(const char* path, const occ_grid* grid);

OCC_API occ_status occ_linear_index(const int64_t dims[3], int64_t x, int64_t y, int64_t z,
                                    int64_t* index);

/* Majority vote of the cloud into the given grid geometry. */
OCC_API occ_status occ_voxelize(const occ_cloud* cloud, const double origin[3],
                                double voxel_size, const int64_t dims[3], occ_grid** out);

/* ---- Metrics ----------------------------------------------------------- */

OCC_API occ_status occ_binary_iou(const occ_grid* pred, const occ_grid* gt, double* iou);
/* per_class[c - 1] and present[c - 1] describe class c; both may be NULL. */
OCC_API occ_status occ_semantic_miou(const occ_grid* pred, const occ_grid* gt,
                                     int benchmark_mode, double* miou, double per_class[11],
                                     int present[11]);

/* ---- Contrastive loss -------------------------------------------------- */

/* f3d and f2d are row-major q x d; valid flags may be NULL (all valid).
 * grad, when non-NULL, receives q x d values of d loss / d f3d. */
OCC_API occ_status occ_contrastive_loss(const double* f3d, const uint8_t* valid3d,
                                        const double* f2d, const uint8_t* valid2d, size_t q,
                                        size_t d, double tau, int normalize, int mean,
                                        double* loss, size_t* valid_pairs, double* grad);

#ifdef __cplusplus
}
#endif

#endif /* OCC_OCC_H */
