// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Talks to the library only through occ.h.

#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "occ/occ.h"

namespace {

void check(occ_status s) {
  if (s != OCC_OK) {
    std::fprintf(stderr, "occ: %s: %s\n", occ_status_string(s), occ_last_error());
    std::exit(static_cast<int>(s));
  }
}

struct ConfigDeleter {
  void operator()(occ_config* c) const { occ_config_destroy(c); }
};
struct ArgsDeleter {
  void operator()(occ_stage_args* a) const { occ_stage_args_destroy(a); }
};

// Parameter values, seeded from the library defaults.
struct Params {
  std::map<std::string, double> reals;
  std::map<std::string, std::int64_t> ints;
  std::map<std::string, bool> flags;
  std::vector<std::int64_t> dims;
  std::string anchor = "auto";

  explicit Params(const occ_config* cfg) {
    for (const char* k : {"filter_radius", "std_ratio", "inlier_threshold", "wall_height",
                          "voxel_size", "tau", "feature_noise", "perturb_tilt_deg",
                          "perturb_scale", "perturb_lift"}) {
      check(occ_config_get_double(cfg, k, &reals[k]));
    }
    for (const char* k : {"min_neighbors", "stat_k", "ransac_iterations", "seed", "threads",
                          "synth_frames", "synth_furniture", "feature_dim"}) {
      check(occ_config_get_int(cfg, k, &ints[k]));
    }
    for (const char* k : {"normalize", "mean_reduction", "split_components", "benchmark_mode"}) {
      std::int64_t v = 0;
      check(occ_config_get_int(cfg, k, &v));
      flags[k] = v != 0;
    }
    std::int64_t d[3];
    check(occ_config_get_dims(cfg, d));
    dims.assign(d, d + 3);
  }

  void apply(occ_config* cfg) const {
    for (const auto& [k, v] : reals) check(occ_config_set_double(cfg, k.c_str(), v));
    for (const auto& [k, v] : ints) check(occ_config_set_int(cfg, k.c_str(), v));
    for (const auto& [k, v] : flags) check(occ_config_set_int(cfg, k.c_str(), v ? 1 : 0));
    check(occ_config_set_dims(cfg, dims[0], dims[1], dims[2]));
    check(occ_config_set_string(cfg, "anchor", anchor.c_str()));
  }
};

struct Stage {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> paths;
  std::vector<std::string> f3d, f2d;
};

void add_params(CLI::App* sub, Params& p, const std::string& stage) {
  auto real = [&](const char* flag, const char* key, const char* help) {
    sub->add_option(flag, p.reals[key], help)->capture_default_str();
  };
  auto integer = [&](const char* flag, const char* key, const char* help) {
    sub->add_option(flag, p.ints[key], help)->capture_default_str();
  };
  auto flag = [&](const char* name, const char* key, const char* help) {
    sub->add_flag(name, p.flags[key], help);
  };
  sub->add_option("--seed", p.ints["seed"], "Random seed [invented default]")
      ->capture_default_str();
  sub->add_option("--threads", p.ints["threads"],
                  "Worker threads, 0 = available parallelism [invented default]")
      ->capture_default_str();
  if (stage == "synth") {
    real("--voxel-size", "voxel_size", "Ground-truth voxel edge in meters [paper default]");
    sub->add_option("--dims", p.dims, "Ground-truth grid dims X,Y,Z [paper default]")
        ->delimiter(',')
        ->expected(3)
        ->capture_default_str();
    integer("--frames", "synth_frames", "Rendered frames [invented default]");
    integer("--furniture", "synth_furniture", "Furniture boxes [invented default]");
    integer("--feature-dim", "feature_dim", "Synthetic feature dimension [invented default]");
    real("--feature-noise", "feature_noise", "Synthetic feature noise [invented default]");
    real("--tilt-deg", "perturb_tilt_deg", "Tilt applied to the clip [invented default]");
    real("--scale", "perturb_scale", "Scale applied to the clip [invented default]");
    real("--lift", "perturb_lift", "Shift along the tilted up axis [invented default]");
  }
  if (stage == "filter" || stage == "run") {
    real("--radius", "filter_radius",
         "Radius filter radius, <= 0 = 5% of bounding diagonal [invented default]");
    integer("--min-neighbors", "min_neighbors", "Radius filter neighbors [invented default]");
    integer("--k", "stat_k", "Statistical filter neighbors [invented default]");
    real("--std-ratio", "std_ratio", "Statistical filter std ratio [invented default]");
  }
  if (stage == "align" || stage == "run") {
    integer("--ransac-iterations", "ransac_iterations", "Floor RANSAC trials [invented default]");
    real("--inlier-threshold", "inlier_threshold",
         "Floor inlier distance, <= 0 = 0.3% of bounding diagonal [invented default]");
    real("--wall-height", "wall_height", "Target wall height in meters [paper default]");
  }
  if (stage == "voxelize" || stage == "run") {
    real("--voxel-size", "voxel_size", "Voxel edge in meters [paper default]");
    sub->add_option("--dims", p.dims, "Grid dims X,Y,Z [paper default]")
        ->delimiter(',')
        ->expected(3)
        ->capture_default_str();
    sub->add_option("--anchor", p.anchor,
                    "Grid placement: auto, grid (manifest grid) or min (cloud minimum) "
                    "[invented default]")
        ->capture_default_str();
  }
  if (stage == "superpix" || stage == "run") {
    flag("--split-components", "split_components",
         "One superpixel per 4-connected mask component [invented default: off]");
  }
  if (stage == "loss" || stage == "run") {
    real("--tau", "tau", "Contrastive temperature [invented default]");
    flag("--normalize", "normalize", "L2-normalize pooled rows [invented default: off]");
    flag("--mean", "mean_reduction", "Average over matched pairs instead of summing "
                                     "[invented default: off]");
  }
  if (stage == "eval" || stage == "run") {
    flag("--benchmark", "benchmark_mode", "Average all 11 classes, absent ones as 0 "
                                          "[invented default: off]");
  }
}

void add_path(Stage& st, const char* key, const char* help, bool required) {
  std::string flag = std::string("--") + key;
  for (auto& c : flag) {
    if (c == '_') c = '-';
  }
  auto* opt = st.app->add_option(flag, st.paths[key], help);
  if (required) opt->required();
}

}  // namespace

int main(int argc, char** argv) {
  occ_config* raw_cfg = nullptr;
  check(occ_config_create(&raw_cfg));
  std::unique_ptr<occ_config, ConfigDeleter> cfg(raw_cfg);
  Params params(cfg.get());

  CLI::App app{"Semantic occupancy toolkit: posed frames to voxel grids, distillation loss "
               "and evaluation."};
  app.require_subcommand(1);
  app.set_version_flag("--version", occ_version());

  std::map<std::string, Stage> stages;
  auto stage = [&](const char* name, const char* help) -> Stage& {
    Stage& st = stages[name];
    st.app = app.add_subcommand(name, help);
    add_params(st.app, params, name);
    return st;
  };

  {
    Stage& s = stage("synth", "Render a procedural room into a frame manifest");
    add_path(s, "out", "Output directory", true);
  }
  {
    Stage& s = stage("lift", "Back-project every frame into one labeled cloud");
    add_path(s, "manifest", "Frame manifest", true);
    add_path(s, "out", "Output cloud tensor", true);
  }
  {
    Stage& s = stage("filter", "Radius then statistical outlier removal");
    add_path(s, "in", "Input cloud tensor", true);
    add_path(s, "out", "Output cloud tensor", true);
  }
  {
    Stage& s = stage("align", "Fit the floor, rotate to z-up and scale to the wall height");
    add_path(s, "in", "Input cloud tensor", true);
    add_path(s, "out", "Output cloud tensor", true);
    add_path(s, "transform", "Output 4x4 transform tensor", true);
    add_path(s, "manifest", "Manifest whose cameras give the rough up direction", false);
  }
  {
    Stage& s = stage("voxelize", "Majority-vote a cloud into a voxel grid");
    add_path(s, "in", "Input cloud tensor", true);
    add_path(s, "out", "Output grid", true);
    add_path(s, "manifest", "Manifest whose grid anchors the output", false);
  }
  {
    Stage& s = stage("map", "Pixel to voxel maps for every frame");
    add_path(s, "manifest", "Frame manifest", true);
    add_path(s, "grid", "Grid giving the voxel geometry", true);
    add_path(s, "transform", "Transform from the align stage", false);
    add_path(s, "out", "Output directory", true);
  }
  {
    Stage& s = stage("superpix", "Superpixels from the frame masks");
    add_path(s, "manifest", "Frame manifest", true);
    add_path(s, "out", "Output directory", true);
  }
  {
    Stage& s = stage("pool", "Pool pixel and voxel features per superpixel");
    add_path(s, "manifest", "Frame manifest", true);
    add_path(s, "grid", "Grid giving the voxel geometry", true);
    add_path(s, "maps", "Directory written by the map stage", true);
    add_path(s, "superpixels", "Directory written by the superpix stage", true);
    add_path(s, "voxel_features", "Voxel features overriding the manifest", false);
    add_path(s, "out", "Output directory", true);
  }
  {
    Stage& s = stage("loss", "Contrastive loss over pooled feature pairs");
    s.app->add_option("--f3d", s.f3d, "Pooled voxel features, one per pair")->required();
    s.app->add_option("--f2d", s.f2d, "Pooled pixel features, one per pair")->required();
  }
  {
    Stage& s = stage("eval", "IoU and mIoU of a prediction against ground truth");
    add_path(s, "gt", "Ground-truth grid", true);
    auto* pred = s.app->add_option("--pred", s.paths["pred"], "Predicted grid");
    auto* scores = s.app->add_option("--scores", s.paths["scores"], "Per-voxel class scores");
    pred->excludes(scores);
  }
  {
    Stage& s = stage("run", "Every stage from a manifest to grid, loss and metrics");
    add_path(s, "manifest", "Frame manifest", true);
    add_path(s, "out", "Output directory", true);
  }

  CLI11_PARSE(app, argc, argv);

  for (auto& [name, st] : stages) {
    if (!st.app->parsed()) continue;
    params.apply(cfg.get());
    occ_stage_args* raw_args = nullptr;
    check(occ_stage_args_create(&raw_args));
    std::unique_ptr<occ_stage_args, ArgsDeleter> args(raw_args);
    for (const auto& [key, value] : st.paths) {
      if (!value.empty()) check(occ_stage_args_set_path(args.get(), key.c_str(), value.c_str()));
    }
    if (st.f3d.size() != st.f2d.size()) {
      std::fprintf(stderr, "occ: --f3d and --f2d must be given the same number of times\n");
      return static_cast<int>(OCC_ERR_INVALID_ARGUMENT);
    }
    for (std::size_t i = 0; i < st.f3d.size(); ++i) {
      check(occ_stage_args_add_pair(args.get(), st.f3d[i].c_str(), st.f2d[i].c_str()));
    }
    char* summary = nullptr;
    check(occ_run_stage(name.c_str(), cfg.get(), args.get(), &summary));
    std::fputs(summary, stdout);
    occ_string_free(summary);
  }
  return 0;
}
