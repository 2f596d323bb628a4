// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/occ.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "occ/cloud_ops.hpp"
#include "occ/distill.hpp"
#include "occ/io.hpp"
#include "occ/metrics.hpp"
#include "occ/pipeline.hpp"
#include "occ/voxelize.hpp"

struct occ_config {
  occ::PipelineConfig value;
};

struct occ_stage_args {
  occ::StageArgs value;
};

struct occ_cloud {
  occ::SemanticPointCloud value;
};

struct occ_grid {
  occ::VoxelGrid value;
};

namespace {

thread_local std::string g_last_error;

occ_status set_error(occ_status s, const char* what) {
  g_last_error = what;
  return s;
}

template <typename F>
occ_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return OCC_OK;
  } catch (const occ::Error& e) {
    return set_error(static_cast<occ_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(OCC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(OCC_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(OCC_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) occ::fail(occ::ErrorCode::kInvalidArgument, what);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

double* double_field(occ::PipelineConfig& c, const std::string& key) {
  if (key == "filter_radius") return &c.filter_radius;
  if (key == "std_ratio") return &c.std_ratio;
  if (key == "inlier_threshold") return &c.inlier_threshold;
  if (key == "wall_height") return &c.wall_height;
  if (key == "voxel_size") return &c.voxel_size;
  if (key == "tau") return &c.tau;
  if (key == "feature_noise") return &c.feature_noise;
  if (key == "perturb_tilt_deg") return &c.perturb_tilt_deg;
  if (key == "perturb_scale") return &c.perturb_scale;
  if (key == "perturb_lift") return &c.perturb_lift;
  occ::fail(occ::ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
}

occ::Vec3 vec3(const double v[3]) { return {v[0], v[1], v[2]}; }

std::array<std::int64_t, 3> dims3(const int64_t d[3]) { return {d[0], d[1], d[2]}; }

template <typename Fn>
void with_int_field(occ::PipelineConfig& c, const std::string& key, Fn&& fn) {
  if (key == "min_neighbors") return fn(c.min_neighbors);
  if (key == "stat_k") return fn(c.stat_k);
  if (key == "ransac_iterations") return fn(c.ransac_iterations);
  if (key == "seed") return fn(c.seed);
  if (key == "threads") return fn(c.threads);
  if (key == "synth_frames") return fn(c.synth_frames);
  if (key == "synth_furniture") return fn(c.synth_furniture);
  if (key == "feature_dim") return fn(c.feature_dim);
  if (key == "normalize") return fn(c.normalize);
  if (key == "mean_reduction") return fn(c.mean_reduction);
  if (key == "split_components") return fn(c.split_components);
  if (key == "benchmark_mode") return fn(c.benchmark_mode);
  occ::fail(occ::ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
}

}  // namespace

extern "C" {

const char* occ_status_string(occ_status status) {
  switch (status) {
    case OCC_OK: return "ok";
    case OCC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case OCC_ERR_OUT_OF_RANGE: return "index out of grid";
    case OCC_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case OCC_ERR_SPEC_MISMATCH: return "grid spec mismatch";
    case OCC_ERR_INSUFFICIENT_POINTS: return "insufficient points";
    case OCC_ERR_DEGENERATE: return "degenerate input";
    case OCC_ERR_NO_MATCHED_PAIRS: return "no matched pairs";
    case OCC_ERR_NON_FINITE: return "non-finite input";
    case OCC_ERR_IO: return "i/o error";
    case OCC_ERR_BAD_MAGIC: return "bad magic";
    case OCC_ERR_BAD_VERSION: return "version mismatch";
    case OCC_ERR_LENGTH_MISMATCH: return "length mismatch";
    case OCC_ERR_INVALID_CLASS: return "invalid class code";
    case OCC_ERR_UNRESOLVED_PATH: return "unresolved path";
    case OCC_ERR_PARSE: return "parse error";
    case OCC_ERR_BAD_DTYPE: return "bad dtype";
    case OCC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* occ_last_error(void) { return g_last_error.c_str(); }

const char* occ_version(void) { return "0.1.0"; }

void occ_string_free(char* s) { std::free(s); }

void occ_set_threads(unsigned n) { occ::set_thread_count(n); }

occ_status occ_config_create(occ_config** out) {
  return guard([&] {
    require(out != nullptr, "null output");
    *out = new occ_config{};
  });
}

void occ_config_destroy(occ_config* cfg) { delete cfg; }

occ_status occ_config_set_double(occ_config* cfg, const char* key, double value) {
  return guard([&] {
    require(cfg && key, "null argument");
    *double_field(cfg->value, key) = value;
  });
}

occ_status occ_config_get_double(const occ_config* cfg, const char* key, double* value) {
  return guard([&] {
    require(cfg && key && value, "null argument");
    *value = *double_field(const_cast<occ::PipelineConfig&>(cfg->value), key);
  });
}

occ_status occ_config_set_int(occ_config* cfg, const char* key, int64_t value) {
  return guard([&] {
    require(cfg && key, "null argument");
    with_int_field(cfg->value, key, [&](auto& field) {
      using T = std::remove_reference_t<decltype(field)>;
      if constexpr (std::is_same_v<T, bool>) {
        field = value != 0;
      } else {
        if constexpr (std::is_unsigned_v<T>) require(value >= 0, "value must be non-negative");
        if (static_cast<int64_t>(static_cast<T>(value)) != value) {
          occ::fail(occ::ErrorCode::kInvalidArgument, std::string("value out of range for ") + key);
        }
        field = static_cast<T>(value);
      }
    });
  });
}

occ_status occ_config_get_int(const occ_config* cfg, const char* key, int64_t* value) {
  return guard([&] {
    require(cfg && key && value, "null argument");
    with_int_field(const_cast<occ::PipelineConfig&>(cfg->value), key,
                   [&](auto& field) { *value = static_cast<int64_t>(field); });
  });
}

occ_status occ_config_set_string(occ_config* cfg, const char* key, const char* value) {
  return guard([&] {
    require(cfg && key && value, "null argument");
    if (std::string(key) != "anchor") {
      occ::fail(occ::ErrorCode::kInvalidArgument, std::string("unknown config key '") + key + "'");
    }
    cfg->value.anchor = occ::parse_anchor(value);
  });
}

occ_status occ_config_set_dims(occ_config* cfg, int64_t x, int64_t y, int64_t z) {
  return guard([&] {
    require(cfg != nullptr, "null argument");
    cfg->value.dims = {x, y, z};
  });
}

occ_status occ_config_get_dims(const occ_config* cfg, int64_t dims[3]) {
  return guard([&] {
    require(cfg && dims, "null argument");
    for (int a = 0; a < 3; ++a) dims[a] = cfg->value.dims[a];
  });
}

occ_status occ_stage_args_create(occ_stage_args** out) {
  return guard([&] {
    require(out != nullptr, "null output");
    *out = new occ_stage_args{};
  });
}

void occ_stage_args_destroy(occ_stage_args* args) { delete args; }

occ_status occ_stage_args_set_path(occ_stage_args* args, const char* key, const char* path) {
  return guard([&] {
    require(args && key && path, "null argument");
    args->value.paths[key] = path;
  });
}

occ_status occ_stage_args_add_pair(occ_stage_args* args, const char* f3d, const char* f2d) {
  return guard([&] {
    require(args && f3d && f2d, "null argument");
    args->value.f3d.emplace_back(f3d);
    args->value.f2d.emplace_back(f2d);
  });
}

occ_status occ_run_stage(const char* stage, const occ_config* cfg, const occ_stage_args* args,
                         char** summary) {
  return guard([&] {
    require(stage && cfg && args && summary, "null argument");
    *summary = nullptr;
    *summary = copy_string(occ::run_stage(stage, cfg->value, args->value));
  });
}

occ_status occ_cloud_create(const double* xyz, const uint8_t* labels, size_t n,
                            occ_cloud** out) {
  return guard([&] {
    require(out != nullptr && (xyz != nullptr || n == 0), "null argument");
    occ::SemanticPointCloud c;
    c.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      c.push_back({xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]},
                  labels ? labels[i] : occ::cls::kUnknown);
    }
    c.validate();
    *out = new occ_cloud{std::move(c)};
  });
}

void occ_cloud_destroy(occ_cloud* cloud) { delete cloud; }

size_t occ_cloud_size(const occ_cloud* cloud) { return cloud ? cloud->value.size() : 0; }

occ_status occ_cloud_copy(const occ_cloud* cloud, double* xyz, uint8_t* labels) {
  return guard([&] {
    require(cloud != nullptr, "null argument");
    const auto& c = cloud->value;
    for (size_t i = 0; i < c.size(); ++i) {
      if (xyz) {
        for (int a = 0; a < 3; ++a) xyz[3 * i + a] = c.points[i][a];
      }
      if (labels) labels[i] = c.labels[i];
    }
  });
}

occ_status occ_cloud_read(const char* path, occ_cloud** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new occ_cloud{occ::tensor_to_cloud(occ::read_tensor(path))};
  });
}

occ_status occ_cloud_write(const char* path, const occ_cloud* cloud) {
  return guard([&] {
    require(path && cloud, "null argument");
    occ::write_tensor(path, occ::cloud_to_tensor(cloud->value));
  });
}

occ_status occ_radius_filter(const occ_cloud* cloud, double radius, size_t min_neighbors,
                             occ_cloud** out) {
  return guard([&] {
    require(cloud && out, "null argument");
    *out = new occ_cloud{occ::radius_filter(cloud->value, radius, min_neighbors)};
  });
}

occ_status occ_statistical_filter(const occ_cloud* cloud, size_t k, double std_ratio,
                                  occ_cloud** out) {
  return guard([&] {
    require(cloud && out, "null argument");
    *out = new occ_cloud{occ::statistical_filter(cloud->value, k, std_ratio)};
  });
}

occ_status occ_grid_create(const double origin[3], double voxel_size, const int64_t dims[3],
                           const uint8_t* labels, occ_grid** out) {
  return guard([&] {
    require(origin && dims && out, "null argument");
    occ::GridSpec spec(vec3(origin), voxel_size, dims3(dims));
    if (labels) {
      std::vector<occ::ClassCode> l(labels, labels + spec.num_voxels());
      *out = new occ_grid{occ::VoxelGrid(spec, std::move(l))};
    } else {
      *out = new occ_grid{occ::VoxelGrid(spec)};
    }
  });
}

void occ_grid_destroy(occ_grid* grid) { delete grid; }

occ_status occ_grid_info(const occ_grid* grid, double origin[3], double* voxel_size,
                         int64_t dims[3]) {
  return guard([&] {
    require(grid != nullptr, "null argument");
    const auto& s = grid->value.spec();
    for (int a = 0; a < 3; ++a) {
      if (origin) origin[a] = s.origin()[a];
      if (dims) dims[a] = s.dims()[a];
    }
    if (voxel_size) *voxel_size = s.voxel_size();
  });
}

const uint8_t* occ_grid_labels(const occ_grid* grid, size_t* count) {
  if (!grid) return nullptr;
  if (count) *count = grid->value.labels().size();
  return grid->value.labels().data();
}

occ_status occ_grid_read(const char* path, occ_grid** out) {
  return guard([&] {
    require(path && out, "null argument");
    *out = new occ_grid{occ::read_grid(path)};
  });
}

occ_status occ_grid_write(const char* path, const occ_grid* grid) {
  return guard([&] {
    require(path && grid, "null argument");
    occ::write_grid(path, grid->value);
  });
}

occ_status occ_linear_index(const int64_t dims[3], int64_t x, int64_t y, int64_t z,
                            int64_t* index) {
  return guard([&] {
    require(dims && index, "null argument");
    const occ::GridSpec spec(occ::Vec3::Zero(), 1.0, dims3(dims));
    *index = occ::linear_index({x, y, z}, spec);
  });
}

occ_status occ_voxelize(const occ_cloud* cloud, const double origin[3], double voxel_size,
                        const int64_t dims[3], occ_grid** out) {
  return guard([&] {
    require(cloud && origin && dims && out, "null argument");
    const occ::GridSpec spec(vec3(origin), voxel_size, dims3(dims));
    *out = new occ_grid{occ::vote(occ::accumulate(cloud->value, spec))};
  });
}

occ_status occ_binary_iou(const occ_grid* pred, const occ_grid* gt, double* iou) {
  return guard([&] {
    require(pred && gt && iou, "null argument");
    *iou = occ::binary_iou(pred->value, gt->value);
  });
}

occ_status occ_semantic_miou(const occ_grid* pred, const occ_grid* gt, int benchmark_mode,
                             double* miou, double per_class[11], int present[11]) {
  return guard([&] {
    require(pred && gt && miou, "null argument");
    const auto r = occ::semantic_miou(pred->value, gt->value, benchmark_mode != 0);
    *miou = r.miou;
    for (int c = 0; c < occ::cls::kNumSemantic; ++c) {
      if (per_class) per_class[c] = r.per_class[c].value_or(0.0);
      if (present) present[c] = r.per_class[c].has_value();
    }
  });
}

occ_status occ_contrastive_loss(const double* f3d, const uint8_t* valid3d, const double* f2d,
                                const uint8_t* valid2d, size_t q, size_t d, double tau,
                                int normalize, int mean, double* loss, size_t* valid_pairs,
                                double* grad) {
  return guard([&] {
    require(f3d && f2d && loss, "null argument");
    auto pooled = [&](const double* v, const uint8_t* valid) {
      occ::PooledFeatures p;
      p.rows = Eigen::Map<const occ::RowMatrix>(v, static_cast<Eigen::Index>(q),
                                                static_cast<Eigen::Index>(d));
      p.valid.resize(q);
      for (size_t i = 0; i < q; ++i) p.valid[i] = valid ? valid[i] != 0 : true;
      return p;
    };
    const occ::ContrastiveOptions opt{tau, normalize != 0, mean != 0};
    const auto a = pooled(f3d, valid3d);
    const auto b = pooled(f2d, valid2d);
    const auto r = grad ? occ::contrastive_loss_grad(a, b, opt) : occ::contrastive_loss(a, b, opt);
    *loss = r.loss;
    if (valid_pairs) *valid_pairs = r.valid_pairs;
    if (grad) std::memcpy(grad, r.grad.data(), q * d * sizeof(double));
  });
}

}  // extern "C"
