// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

#include "occ/io.hpp"
#include "occ/lift.hpp"
#include "occ/metrics.hpp"
#include "occ/synth.hpp"
#include "occ/voxelize.hpp"

namespace occ {

namespace fs = std::filesystem;

Anchor parse_anchor(const std::string& s) {
  if (s == "auto") return Anchor::kAuto;
  if (s == "grid") return Anchor::kGrid;
  if (s == "min") return Anchor::kMin;
  fail(ErrorCode::kInvalidArgument, "unknown anchor '" + s + "' (auto, grid, min)");
}

const char* anchor_name(Anchor a) {
  switch (a) {
    case Anchor::kAuto: return "auto";
    case Anchor::kGrid: return "grid";
    case Anchor::kMin: return "min";
  }
  return "auto";
}

void PipelineConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::kInvalidArgument, what);
  };
  require(std::isfinite(filter_radius), "filter radius must be finite");
  require(min_neighbors >= 1, "min_neighbors must be >= 1");
  require(stat_k >= 1, "statistical k must be >= 1");
  require(std::isfinite(std_ratio) && std_ratio > 0.0, "std_ratio must be > 0");
  require(ransac_iterations >= 1, "RANSAC iterations must be >= 1");
  require(std::isfinite(inlier_threshold), "inlier threshold must be finite");
  require(std::isfinite(wall_height) && wall_height > 0.0, "wall height must be > 0");
  require(std::isfinite(voxel_size) && voxel_size > 0.0, "voxel size must be > 0");
  for (auto d : dims) require(d >= 1 && d <= (1 << 16), "grid dims must be in [1, 65536]");
  require(std::isfinite(tau) && tau > 0.0, "tau must be > 0");
  require(synth_frames >= 3, "synth needs at least 3 frames");
  require(synth_furniture >= 0, "furniture count must be >= 0");
  require(feature_dim >= 1, "feature dim must be >= 1");
  require(std::isfinite(feature_noise) && feature_noise >= 0.0, "feature noise must be >= 0");
  require(std::isfinite(perturb_tilt_deg) && std::abs(perturb_tilt_deg) < 90.0,
          "tilt must be within (-90, 90) degrees");
  require(std::isfinite(perturb_scale) && perturb_scale > 0.0, "perturb scale must be > 0");
  require(std::isfinite(perturb_lift), "perturb lift must be finite");
}

const fs::path& StageArgs::path(const std::string& key) const {
  const auto it = paths.find(key);
  if (it == paths.end()) fail(ErrorCode::kInvalidArgument, "missing required path --" + key);
  return it->second;
}

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names = {"synth", "lift", "filter",   "align",
                                                 "voxelize", "map", "superpix", "pool",
                                                 "loss",  "eval", "run"};
  return names;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::string s = format_double(v);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

namespace {

// One key=value record.
class Record {
 public:
  explicit Record(const std::string& stage) { os_ << "stage=" << stage; }
  Record& kv(const std::string& key, const std::string& value) {
    os_ << ' ' << key << '=' << value;
    return *this;
  }
  Record& kv(const std::string& key, double value) { return kv(key, format_number(value)); }
  Record& count(const std::string& key, std::uint64_t value) {
    return kv(key, std::to_string(value));
  }
  Record& vec(const std::string& key, const Vec3& v) {
    return kv(key, format_number(v.x()) + "," + format_number(v.y()) + "," +
                       format_number(v.z()));
  }
  std::string str() const { return os_.str() + "\n"; }

 private:
  std::ostringstream os_;
};

fs::path frame_file(const fs::path& dir, std::size_t frame, const char* suffix) {
  char name[64];
  std::snprintf(name, sizeof(name), "frame_%03zu_%s.occt", frame, suffix);
  return dir / name;
}

double bounding_diagonal(const SemanticPointCloud& cloud) {
  if (cloud.empty()) return 0.0;
  Vec3 lo = cloud.points.front(), hi = lo;
  for (const auto& p : cloud.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

struct Frame {
  CameraIntrinsics intrinsics;
  CameraPose pose;
  DepthMap depth;
  std::optional<std::vector<ClassCode>> labels;
};

Frame load_frame(const FrameRecord& r) {
  DepthMap depth = tensor_to_depth(read_tensor(r.depth));
  if (depth.width() != r.intrinsics.width() || depth.height() != r.intrinsics.height()) {
    fail(ErrorCode::kDimensionMismatch, "depth size differs from intrinsics in " + r.depth.string());
  }
  std::optional<std::vector<ClassCode>> labels;
  if (r.labels) labels = tensor_to_classes(read_tensor(*r.labels), depth.width(), depth.height());
  return {r.intrinsics, r.pose, std::move(depth), std::move(labels)};
}

// Mean of -y over the camera frames: cameras are held roughly upright.
Vec3 camera_up_hint(const FrameManifest& m) {
  Vec3 up = Vec3::Zero();
  for (const auto& f : m.frames) up -= f.pose.rotation().col(1);
  if (!(up.norm() > 1e-9)) return Vec3::UnitZ();
  return up.normalized();
}

// ---------------------------------------------------------------------------
// In-memory stages

struct LiftResult {
  SemanticPointCloud cloud;
  std::string summary;
};

LiftResult do_lift(const FrameManifest& m) {
  if (m.frames.empty()) fail(ErrorCode::kInvalidArgument, "manifest has no frames");
  LiftResult out;
  std::size_t labeled = 0;
  for (const auto& rec : m.frames) {
    const Frame f = load_frame(rec);
    if (f.labels) {
      out.cloud.append(backproject_labeled(f.depth, f.intrinsics, f.pose, *f.labels));
      ++labeled;
    } else {
      out.cloud.append(backproject(f.depth, f.intrinsics, f.pose));
    }
  }
  out.summary = Record("lift")
                    .count("frames", m.frames.size())
                    .count("labeled_frames", labeled)
                    .count("points", out.cloud.size())
                    .str();
  return out;
}

struct FilterResult {
  SemanticPointCloud cloud;
  std::string summary;
};

FilterResult do_filter(const SemanticPointCloud& cloud, const PipelineConfig& cfg) {
  const double radius = cfg.filter_radius > 0.0 ? cfg.filter_radius : default_filter_radius(cloud);
  FilterResult out;
  SemanticPointCloud r = cloud;
  if (!cloud.empty()) {
    if (!(radius > 0.0)) fail(ErrorCode::kDegenerate, "cloud has zero extent");
    r = radius_filter(cloud, radius, cfg.min_neighbors);
  }
  out.cloud = statistical_filter(r, cfg.stat_k, cfg.std_ratio);
  out.summary = Record("filter")
                    .count("input", cloud.size())
                    .kv("radius", radius)
                    .count("min_neighbors", cfg.min_neighbors)
                    .count("after_radius", r.size())
                    .count("k", cfg.stat_k)
                    .kv("std_ratio", cfg.std_ratio)
                    .count("after_statistical", out.cloud.size())
                    .str();
  return out;
}

struct AlignResult {
  SemanticPointCloud cloud;
  SimilarityTransform transform;
  std::string summary;
};

AlignResult do_align(const SemanticPointCloud& cloud, const PipelineConfig& cfg,
                     const Vec3& up_hint) {
  FloorFitOptions opt;
  opt.iterations = cfg.ransac_iterations;
  opt.seed = cfg.seed;
  opt.up_hint = up_hint;
  opt.inlier_threshold =
      cfg.inlier_threshold > 0.0 ? cfg.inlier_threshold : 0.003 * bounding_diagonal(cloud);
  if (!(opt.inlier_threshold > 0.0)) fail(ErrorCode::kDegenerate, "cloud has zero extent");
  const Plane floor = estimate_floor_plane(cloud, opt);
  auto [upright, rigid] = align_z_up(cloud, floor);
  const double height = z_percentile(upright, kWallHeightPercentile);
  auto [scaled, s] = metric_scale(upright, cfg.wall_height);
  SimilarityTransform scale;
  scale.scale = s;
  AlignResult out{std::move(scaled), scale.after(rigid), {}};
  out.summary = Record("align")
                    .vec("up_hint", up_hint)
                    .kv("inlier_threshold", opt.inlier_threshold)
                    .vec("floor_normal", floor.normal)
                    .kv("floor_offset", floor.offset)
                    .kv("height", height)
                    .kv("scale", s)
                    .count("points", out.cloud.size())
                    .str();
  return out;
}

// Origin rounded down onto the f32 lattice so the stored grid still covers the
// minimum point.
Vec3 f32_floor(const Vec3& v) {
  Vec3 out;
  for (int a = 0; a < 3; ++a) {
    float f = static_cast<float>(v[a]);
    if (static_cast<double>(f) > v[a]) f = std::nextafter(f, -std::numeric_limits<float>::infinity());
    out[a] = f;
  }
  return out;
}

struct VoxelizeResult {
  VoxelGrid grid;
  std::string summary;
};

VoxelizeResult do_voxelize(const SemanticPointCloud& cloud, const PipelineConfig& cfg,
                           const std::optional<GridSpec>& gt_spec) {
  Anchor anchor = cfg.anchor;
  if (anchor == Anchor::kAuto) anchor = gt_spec ? Anchor::kGrid : Anchor::kMin;
  std::optional<VoxelGrid> grid;
  VoxelHistogram hist(GridSpec(Vec3::Zero(), 1.0, {1, 1, 1}));
  if (anchor == Anchor::kGrid) {
    if (!gt_spec) fail(ErrorCode::kInvalidArgument, "grid anchor needs a manifest with a grid");
    const GridSpec want = file_precision(GridSpec(gt_spec->origin(), cfg.voxel_size, cfg.dims));
    if (want.voxel_size() != gt_spec->voxel_size() || want.dims() != gt_spec->dims()) {
      fail(ErrorCode::kSpecMismatch,
           "ground-truth grid does not match --voxel-size/--dims");
    }
    hist = accumulate(cloud, *gt_spec);
    grid = vote(hist);
  } else {
    if (cloud.empty()) fail(ErrorCode::kInsufficientPoints, "cannot anchor an empty cloud");
    const double vs = static_cast<float>(cfg.voxel_size);
    Vec3 lo = cloud.points.front(), hi = lo;
    for (const auto& p : cloud.points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Vec3 origin = f32_floor(lo);
    std::array<std::int64_t, 3> cover{};
    for (int a = 0; a < 3; ++a) {
      auto n = static_cast<std::int64_t>(std::ceil((hi[a] - origin[a]) / vs));
      n = std::max<std::int64_t>(n, 1);
      while (origin[a] + n * vs < hi[a]) ++n;
      cover[a] = n;
    }
    const GridSpec source(origin, vs, cover);
    hist = accumulate(cloud, source);
    grid = window_to_grid(vote(hist), GridSpec(origin, vs, cfg.dims));
  }
  std::uint64_t occupied = 0, unknown = 0;
  for (auto l : grid->labels()) {
    occupied += is_semantic(l);
    unknown += l == cls::kUnknown;
  }
  std::string summary = Record("voxelize")
                            .kv("anchor", anchor_name(anchor))
                            .vec("origin", grid->spec().origin())
                            .kv("voxel_size", grid->spec().voxel_size())
                            .kv("dims", std::to_string(grid->spec().dims()[0]) + "," +
                                            std::to_string(grid->spec().dims()[1]) + "," +
                                            std::to_string(grid->spec().dims()[2]))
                            .count("points", cloud.size())
                            .count("binned", hist.total())
                            .count("dropped", hist.dropped())
                            .count("occupied", occupied)
                            .count("unknown", unknown)
                            .str();
  return {std::move(*grid), std::move(summary)};
}

// Frame pose and depth re-expressed in the aligned frame.
std::pair<CameraPose, DepthMap> aligned_frame(const Frame& f, const SimilarityTransform& t) {
  std::vector<float> d(f.depth.values().begin(), f.depth.values().end());
  if (t.scale != 1.0) {
    for (auto& v : d) v = static_cast<float>(static_cast<double>(v) * t.scale);
  }
  return {transform_pose(f.pose, t), DepthMap(f.depth.width(), f.depth.height(), std::move(d))};
}

std::vector<PixelVoxelMap> do_map(const FrameManifest& m, const SimilarityTransform& t,
                                  const GridSpec& spec, std::string& summary) {
  std::vector<PixelVoxelMap> maps;
  std::uint64_t mapped = 0, valid = 0;
  for (const auto& rec : m.frames) {
    const Frame f = load_frame(rec);
    const auto [pose, depth] = aligned_frame(f, t);
    maps.push_back(build_pixel_voxel_map(depth, f.intrinsics, pose, spec));
    mapped += maps.back().mapped_count();
    for (float d : depth.values()) valid += is_valid_depth(d);
  }
  summary = Record("map")
                .count("frames", maps.size())
                .count("valid_pixels", valid)
                .count("mapped_pixels", mapped)
                .str();
  return maps;
}

std::vector<SuperpixelPartition> do_superpix(const FrameManifest& m, bool split,
                                             std::string& summary) {
  std::vector<SuperpixelPartition> parts;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < m.frames.size(); ++i) {
    const auto& rec = m.frames[i];
    if (!rec.mask) fail(ErrorCode::kInvalidArgument, "frame " + std::to_string(i) + " has no mask");
    const LabelMap mask = tensor_to_label_map(read_tensor(*rec.mask));
    if (mask.width() != rec.intrinsics.width() || mask.height() != rec.intrinsics.height()) {
      fail(ErrorCode::kDimensionMismatch, "mask size differs from intrinsics in frame " +
                                              std::to_string(i));
    }
    parts.push_back(superpixels_from_mask(mask, split));
    total += parts.back().count();
  }
  summary = Record("superpix")
                .count("frames", parts.size())
                .kv("split_components", split ? "1" : "0")
                .count("superpixels", total)
                .str();
  return parts;
}

struct PooledPair {
  PooledFeatures f3d, f2d;
};

std::vector<PooledPair> do_pool(const FrameManifest& m, const VoxelFeatures& voxels,
                                const std::vector<PixelVoxelMap>& maps,
                                const std::vector<SuperpixelPartition>& parts,
                                std::string& summary) {
  if (maps.size() != m.frames.size() || parts.size() != m.frames.size()) {
    fail(ErrorCode::kDimensionMismatch, "per-frame inputs do not match the manifest");
  }
  std::vector<PooledPair> out;
  std::uint64_t superpixels = 0, supervoxels = 0, matched = 0;
  for (std::size_t i = 0; i < m.frames.size(); ++i) {
    const auto& rec = m.frames[i];
    if (!rec.features) {
      fail(ErrorCode::kInvalidArgument, "frame " + std::to_string(i) + " has no features");
    }
    const FeatureMap features = tensor_to_feature_map(read_tensor(*rec.features));
    if (features.dim() != voxels.dim()) {
      fail(ErrorCode::kDimensionMismatch, "pixel and voxel feature dims differ");
    }
    const SupervoxelAssignment assign = assign_supervoxels(parts[i], maps[i], voxels.spec());
    PooledPair p{pool_supervoxel_features(voxels, assign),
                 pool_superpixel_features(features, parts[i])};
    superpixels += parts[i].count();
    supervoxels += assign.assigned_voxels();
    for (Eigen::Index q = 0; q < p.f3d.count(); ++q) matched += p.f3d.valid[q] && p.f2d.valid[q];
    out.push_back(std::move(p));
  }
  summary = Record("pool")
                .count("frames", out.size())
                .count("superpixels", superpixels)
                .count("assigned_voxels", supervoxels)
                .count("matched", matched)
                .str();
  return out;
}

std::string do_loss(const std::vector<PooledPair>& pairs, const PipelineConfig& cfg) {
  ContrastiveOptions opt;
  opt.tau = cfg.tau;
  opt.normalize = cfg.normalize;
  double total = 0.0;
  std::uint64_t matched = 0, skipped = 0;
  for (const auto& p : pairs) {
    if (p.f3d.count() != p.f2d.count()) {
      fail(ErrorCode::kDimensionMismatch, "pooled feature row counts differ");
    }
    std::size_t valid = 0;
    for (Eigen::Index q = 0; q < p.f3d.count(); ++q) valid += p.f3d.valid[q] && p.f2d.valid[q];
    if (valid == 0) {
      ++skipped;
      continue;
    }
    const ContrastiveResult r = contrastive_loss(p.f3d, p.f2d, opt);
    total += r.loss;
    matched += r.valid_pairs;
  }
  if (matched == 0) fail(ErrorCode::kNoMatchedPairs, "no matched superpixel/supervoxel pairs");
  const double loss = cfg.mean_reduction ? total / static_cast<double>(matched) : total;
  return Record("loss")
      .count("pairs", pairs.size())
      .count("skipped", skipped)
      .count("matched", matched)
      .kv("tau", cfg.tau)
      .kv("normalize", cfg.normalize ? "1" : "0")
      .kv("reduction", cfg.mean_reduction ? "mean" : "sum")
      .kv("loss", loss)
      .str();
}

std::string do_eval(const VoxelGrid& pred, const VoxelGrid& gt, bool benchmark) {
  const double iou = binary_iou(pred, gt);
  const SemanticIou s = semantic_miou(pred, gt, benchmark);
  Record r("eval");
  r.kv("iou", iou).kv("miou", s.miou);
  for (int c = 1; c <= cls::kNumSemantic; ++c) {
    const auto& v = s.per_class[c - 1];
    r.kv(std::string("iou_") + class_name(static_cast<ClassCode>(c)),
         v ? format_number(*v) : std::string("absent"));
  }
  return r.str();
}

std::optional<GridSpec> manifest_grid_spec(const FrameManifest& m) {
  if (!m.grid) return std::nullopt;
  return read_grid(*m.grid).spec();
}

VoxelFeatures load_voxel_features(const fs::path& path, const GridSpec& spec) {
  const RowMatrix v = tensor_to_matrix(read_tensor(path));
  if (v.rows() != spec.num_voxels()) {
    fail(ErrorCode::kDimensionMismatch, "voxel feature rows do not match the grid");
  }
  return VoxelFeatures(spec, v);
}

// ---------------------------------------------------------------------------
// File stages

std::string stage_synth(const PipelineConfig& cfg, const StageArgs& args) {
  const fs::path dir = args.path("out");
  fs::create_directories(dir);
  SceneConfig sc;
  sc.frames = cfg.synth_frames;
  sc.furniture_count = cfg.synth_furniture;
  const GeneratedScene gen = generate_scene(cfg.seed, sc);
  const CameraIntrinsics intr = default_synth_intrinsics();
  const RowMatrix embedding = class_embedding(cfg.feature_dim, cfg.seed);

  SimilarityTransform perturb;
  const Vec3 axis = Vec3(1.0, 1.0, 0.0).normalized();
  perturb.rotation = Eigen::AngleAxisd(cfg.perturb_tilt_deg * M_PI / 180.0, axis).toRotationMatrix();
  perturb.translation = perturb.rotation * Vec3(0.0, 0.0, cfg.perturb_lift);
  perturb.scale = cfg.perturb_scale;

  OutputBatch batch;
  FrameManifest manifest;
  std::uint64_t valid = 0;
  for (std::size_t i = 0; i < gen.trajectory.size(); ++i) {
    const RenderedFrame rf = render_frame(gen.scene, gen.trajectory[i], intr);
    std::vector<float> depth(rf.depth.values().begin(), rf.depth.values().end());
    for (auto& d : depth) {
      if (is_valid_depth(d)) {
        ++valid;
        d = static_cast<float>(static_cast<double>(d) * perturb.scale);
      }
    }
    const auto codes = class_codes(rf.labels);
    const FeatureMap features(intr.width(), intr.height(),
                              synthetic_pixel_features(rf.labels, embedding, cfg.feature_noise,
                                                       cfg.seed + 1000 + i));
    FrameRecord rec{intr, transform_pose(gen.trajectory[i], perturb),
                    frame_file(dir, i, "depth"), frame_file(dir, i, "labels"),
                    frame_file(dir, i, "mask"), frame_file(dir, i, "features")};
    batch.add_tensor(rec.depth, depth_to_tensor(DepthMap(intr.width(), intr.height(), depth)));
    batch.add_tensor(*rec.labels, classes_to_tensor(codes, intr.width(), intr.height()));
    batch.add_tensor(*rec.mask, label_map_to_tensor(rf.instances));
    batch.add_tensor(*rec.features, feature_map_to_tensor(features));
    manifest.frames.push_back(std::move(rec));
  }
  const GridSpec spec = file_precision(scene_grid_spec(cfg.voxel_size, cfg.dims));
  const VoxelGrid gt = analytic_grid(gen.scene, spec);
  manifest.grid = dir / "gt.occg";
  manifest.voxel_features = dir / "voxel_features.occt";
  batch.add_grid(*manifest.grid, gt);
  batch.add_tensor(*manifest.voxel_features,
                   matrix_to_tensor_f32(synthetic_voxel_features(gt, embedding, cfg.feature_noise,
                                                                 cfg.seed + 7)));
  const fs::path manifest_path = dir / "manifest.txt";
  batch.add_text(manifest_path, format_manifest(manifest, dir));
  batch.commit();

  std::uint64_t occupied = 0;
  for (auto l : gt.labels()) occupied += is_semantic(l);
  return Record("synth")
      .count("seed", cfg.seed)
      .vec("room", gen.scene.room_size)
      .count("boxes", gen.scene.boxes.size())
      .count("frames", gen.trajectory.size())
      .count("valid_pixels", valid)
      .count("gt_occupied", occupied)
      .kv("tilt_deg", cfg.perturb_tilt_deg)
      .kv("scale", cfg.perturb_scale)
      .kv("manifest", manifest_path.filename().string())
      .str();
}

std::string stage_lift(const PipelineConfig&, const StageArgs& args) {
  const FrameManifest m = load_manifest(args.path("manifest"));
  LiftResult r = do_lift(m);
  OutputBatch batch;
  batch.add_tensor(args.path("out"), cloud_to_tensor(r.cloud));
  batch.commit();
  return r.summary;
}

std::string stage_filter(const PipelineConfig& cfg, const StageArgs& args) {
  const SemanticPointCloud cloud = tensor_to_cloud(read_tensor(args.path("in")));
  FilterResult r = do_filter(cloud, cfg);
  OutputBatch batch;
  batch.add_tensor(args.path("out"), cloud_to_tensor(r.cloud));
  batch.commit();
  return r.summary;
}

std::string stage_align(const PipelineConfig& cfg, const StageArgs& args) {
  const SemanticPointCloud cloud = tensor_to_cloud(read_tensor(args.path("in")));
  Vec3 up = Vec3::UnitZ();
  if (args.has("manifest")) up = camera_up_hint(load_manifest(args.path("manifest")));
  AlignResult r = do_align(cloud, cfg, up);
  OutputBatch batch;
  batch.add_tensor(args.path("out"), cloud_to_tensor(r.cloud));
  batch.add_tensor(args.path("transform"), transform_to_tensor(r.transform));
  batch.commit();
  return r.summary;
}

std::string stage_voxelize(const PipelineConfig& cfg, const StageArgs& args) {
  const SemanticPointCloud cloud = tensor_to_cloud(read_tensor(args.path("in")));
  std::optional<GridSpec> gt;
  if (args.has("manifest")) gt = manifest_grid_spec(load_manifest(args.path("manifest")));
  VoxelizeResult r = do_voxelize(cloud, cfg, gt);
  OutputBatch batch;
  batch.add_grid(args.path("out"), r.grid);
  batch.commit();
  return r.summary;
}

SimilarityTransform optional_transform(const StageArgs& args) {
  if (!args.has("transform")) return {};
  return tensor_to_transform(read_tensor(args.path("transform")));
}

std::string stage_map(const PipelineConfig&, const StageArgs& args) {
  const FrameManifest m = load_manifest(args.path("manifest"));
  const GridSpec spec = read_grid(args.path("grid")).spec();
  const fs::path dir = args.path("out");
  std::string summary;
  const auto maps = do_map(m, optional_transform(args), spec, summary);
  fs::create_directories(dir);
  OutputBatch batch;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    batch.add_tensor(frame_file(dir, i, "map"), pixel_map_to_tensor(maps[i]));
  }
  batch.commit();
  return summary;
}

std::string stage_superpix(const PipelineConfig& cfg, const StageArgs& args) {
  const FrameManifest m = load_manifest(args.path("manifest"));
  const fs::path dir = args.path("out");
  std::string summary;
  const auto parts = do_superpix(m, cfg.split_components, summary);
  fs::create_directories(dir);
  OutputBatch batch;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    batch.add_tensor(frame_file(dir, i, "superpixels"), partition_to_tensor(parts[i]));
  }
  batch.commit();
  return summary;
}

std::string stage_pool(const PipelineConfig&, const StageArgs& args) {
  const FrameManifest m = load_manifest(args.path("manifest"));
  const GridSpec spec = read_grid(args.path("grid")).spec();
  fs::path vf;
  if (args.has("voxel_features")) {
    vf = args.path("voxel_features");
  } else if (m.voxel_features) {
    vf = *m.voxel_features;
  } else {
    fail(ErrorCode::kInvalidArgument, "no voxel features in manifest or --voxel-features");
  }
  const VoxelFeatures voxels = load_voxel_features(vf, spec);
  std::vector<PixelVoxelMap> maps;
  std::vector<SuperpixelPartition> parts;
  for (std::size_t i = 0; i < m.frames.size(); ++i) {
    maps.push_back(tensor_to_pixel_map(read_tensor(frame_file(args.path("maps"), i, "map"))));
    parts.push_back(
        tensor_to_partition(read_tensor(frame_file(args.path("superpixels"), i, "superpixels"))));
  }
  std::string summary;
  const auto pooled = do_pool(m, voxels, maps, parts, summary);
  const fs::path dir = args.path("out");
  fs::create_directories(dir);
  OutputBatch batch;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    batch.add_tensor(frame_file(dir, i, "f3d"), pooled_to_tensor(pooled[i].f3d));
    batch.add_tensor(frame_file(dir, i, "f2d"), pooled_to_tensor(pooled[i].f2d));
  }
  batch.commit();
  return summary;
}

std::string stage_loss(const PipelineConfig& cfg, const StageArgs& args) {
  if (args.f3d.empty() || args.f3d.size() != args.f2d.size()) {
    fail(ErrorCode::kInvalidArgument, "loss needs matching --f3d and --f2d lists");
  }
  std::vector<PooledPair> pairs;
  for (std::size_t i = 0; i < args.f3d.size(); ++i) {
    pairs.push_back({tensor_to_pooled(read_tensor(args.f3d[i])),
                     tensor_to_pooled(read_tensor(args.f2d[i]))});
  }
  return do_loss(pairs, cfg);
}

std::string stage_eval(const PipelineConfig& cfg, const StageArgs& args) {
  const VoxelGrid gt = read_grid(args.path("gt"));
  if (args.has("pred") == args.has("scores")) {
    fail(ErrorCode::kInvalidArgument, "eval needs exactly one of --pred or --scores");
  }
  const VoxelGrid pred = args.has("pred")
                             ? read_grid(args.path("pred"))
                             : decode_occupancy(tensor_to_scores(read_tensor(args.path("scores")),
                                                                 gt.spec()));
  return do_eval(pred, gt, cfg.benchmark_mode);
}

std::string stage_run(const PipelineConfig& cfg, const StageArgs& args) {
  const FrameManifest m = load_manifest(args.path("manifest"));
  const fs::path dir = args.path("out");
  std::string summary;

  LiftResult lifted = do_lift(m);
  summary += lifted.summary;
  FilterResult filtered = do_filter(lifted.cloud, cfg);
  summary += filtered.summary;
  AlignResult aligned = do_align(filtered.cloud, cfg, camera_up_hint(m));
  summary += aligned.summary;
  std::optional<VoxelGrid> gt;
  if (m.grid) gt = read_grid(*m.grid);
  VoxelizeResult vox = do_voxelize(aligned.cloud, cfg,
                                   gt ? std::optional<GridSpec>(gt->spec()) : std::nullopt);
  summary += vox.summary;
  const GridSpec& spec = vox.grid.spec();

  fs::create_directories(dir);
  OutputBatch batch;
  batch.add_tensor(dir / "cloud.occt", cloud_to_tensor(aligned.cloud));
  batch.add_tensor(dir / "transform.occt", transform_to_tensor(aligned.transform));
  batch.add_grid(dir / "grid.occg", vox.grid);

  std::string s;
  const auto maps = do_map(m, aligned.transform, spec, s);
  summary += s;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    batch.add_tensor(frame_file(dir, i, "map"), pixel_map_to_tensor(maps[i]));
  }

  const bool distill = m.voxel_features &&
                       std::all_of(m.frames.begin(), m.frames.end(), [](const FrameRecord& f) {
                         return f.mask && f.features;
                       });
  if (distill) {
    const auto parts = do_superpix(m, cfg.split_components, s);
    summary += s;
    const VoxelFeatures voxels = load_voxel_features(*m.voxel_features, spec);
    const auto pooled = do_pool(m, voxels, maps, parts, s);
    summary += s;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      batch.add_tensor(frame_file(dir, i, "superpixels"), partition_to_tensor(parts[i]));
      batch.add_tensor(frame_file(dir, i, "f3d"), pooled_to_tensor(pooled[i].f3d));
      batch.add_tensor(frame_file(dir, i, "f2d"), pooled_to_tensor(pooled[i].f2d));
    }
    summary += do_loss(pooled, cfg);
  } else {
    summary += Record("loss").kv("skipped", "no_masks_or_features").str();
  }

  if (gt && gt->spec() == spec) {
    summary += do_eval(vox.grid, *gt, cfg.benchmark_mode);
  } else {
    summary += Record("eval").kv("skipped", gt ? "spec_mismatch" : "no_ground_truth").str();
  }
  batch.add_text(dir / "summary.txt", summary);
  batch.commit();
  return summary;
}

}  // namespace

std::string run_stage(const std::string& stage, const PipelineConfig& config,
                      const StageArgs& args) {
  config.validate();
  set_thread_count(config.threads);
  if (stage == "synth") return stage_synth(config, args);
  if (stage == "lift") return stage_lift(config, args);
  if (stage == "filter") return stage_filter(config, args);
  if (stage == "align") return stage_align(config, args);
  if (stage == "voxelize") return stage_voxelize(config, args);
  if (stage == "map") return stage_map(config, args);
  if (stage == "superpix") return stage_superpix(config, args);
  if (stage == "pool") return stage_pool(config, args);
  if (stage == "loss") return stage_loss(config, args);
  if (stage == "eval") return stage_eval(config, args);
  if (stage == "run") return stage_run(config, args);
  fail(ErrorCode::kInvalidArgument, "unknown stage '" + stage + "'");
}

}  // namespace occ
