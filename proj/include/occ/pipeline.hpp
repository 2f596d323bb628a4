// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

// File-to-file pipeline stages behind the command-line tool. Every stage
// returns its summary as key=value records, one line per record.

#ifndef OCC_PIPELINE_HPP
#define OCC_PIPELINE_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "occ/cloud_ops.hpp"
#include "occ/core.hpp"
#include "occ/distill.hpp"

namespace occ {

enum class Anchor {
  // The manifest's ground-truth grid when it has one, otherwise kMin.
  kAuto,
  // Exactly the manifest ground-truth grid's origin, voxel size and dims.
  kGrid,
  // Grid origin at the minimum corner of the cloud.
  kMin,
};

Anchor parse_anchor(const std::string& s);
const char* anchor_name(Anchor a);

struct PipelineConfig {
  // Radius filter; radius <= 0 selects 5% of the bounding diagonal.
  double filter_radius = 0.0;
  std::size_t min_neighbors = 4;
  // Statistical filter.
  std::size_t stat_k = 16;
  double std_ratio = 2.0;

  // Floor fit; threshold <= 0 selects 0.3% of the bounding diagonal.
  std::size_t ransac_iterations = 500;
  double inlier_threshold = 0.0;

  double wall_height = kDefaultWallHeight;
  double voxel_size = kBenchmarkVoxelSize;
  std::array<std::int64_t, 3> dims = kBenchmarkDims;
  Anchor anchor = Anchor::kAuto;

  double tau = kDefaultTemperature;
  bool normalize = false;
  bool mean_reduction = false;
  bool split_components = false;
  bool benchmark_mode = false;

  std::uint64_t seed = 42;
  unsigned threads = 0;

  // synth only.
  int synth_frames = 8;
  int synth_furniture = 4;
  int feature_dim = 16;
  double feature_noise = 0.1;
  // Similarity applied to the rendered clip, to exercise alignment.
  double perturb_tilt_deg = 0.0;
  double perturb_scale = 1.0;
  // Shift along the tilted up axis, in meters before scaling.
  double perturb_lift = 0.0;

  // Throws kInvalidArgument when a value violates a stage precondition.
  void validate() const;
};

// Named file arguments ("manifest", "in", "out", ...) plus the paired
// pooled-feature lists read by the loss stage.
struct StageArgs {
  std::map<std::string, std::filesystem::path> paths;
  std::vector<std::filesystem::path> f3d;
  std::vector<std::filesystem::path> f2d;

  bool has(const std::string& key) const { return paths.count(key) != 0; }
  const std::filesystem::path& path(const std::string& key) const;
};

const std::vector<std::string>& stage_names();

// Runs one stage. Outputs are staged and published only when the stage
// succeeds.
std::string run_stage(const std::string& stage, const PipelineConfig& config,
                      const StageArgs& args);

// Number formatting used by the summaries: shortest round trip, always with
// a decimal point.
std::string format_number(double v);

}  // namespace occ

#endif  // OCC_PIPELINE_HPP
