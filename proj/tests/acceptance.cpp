// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "occ/cloud_ops.hpp"
#include "occ/distill.hpp"
#include "occ/io.hpp"
#include "occ/lift.hpp"
#include "occ/metrics.hpp"
#include "occ/pipeline.hpp"
#include "occ/synth.hpp"
#include "occ/voxelize.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace occ {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Keeps the first failure message.
void require(Outcome& o, bool ok, const std::string& what) {
  if (!ok && o.pass) {
    o.pass = false;
    o.detail = what;
  }
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome voxel_oracle() {
  Outcome o;
  std::mt19937_64 rng(101);
  std::size_t ties = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const GridSpec spec(Vec3(testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1),
                             testing::uniform(rng, -1, 1)),
                        testing::uniform(rng, 0.05, 0.25),
                        {1 + static_cast<std::int64_t>(rng() % 16),
                         1 + static_cast<std::int64_t>(rng() % 16),
                         1 + static_cast<std::int64_t>(rng() % 16)});
    const std::size_t n = 1 + rng() % 10000;
    SemanticPointCloud c;
    const Vec3 lo = spec.origin() - Vec3::Constant(0.1);
    const Vec3 hi = spec.origin() + spec.extent() + Vec3::Constant(0.1);
    while (c.size() < n) {
      Vec3 p(testing::uniform(rng, lo.x(), hi.x()), testing::uniform(rng, lo.y(), hi.y()),
             testing::uniform(rng, lo.z(), hi.z()));
      const auto kind = rng() % 8;
      if (kind == 0 && c.size() + 4 <= n) {
        // Two classes with equal counts in one voxel.
        const auto a = static_cast<ClassCode>(1 + rng() % 11);
        const auto b = static_cast<ClassCode>(1 + rng() % 11);
        for (int r = 0; r < 2; ++r) {
          c.push_back(p, a);
          c.push_back(p, b);
        }
        ++ties;
      } else if (kind == 1) {
        // Lattice points exercise the half-open boundaries.
        for (int a = 0; a < 3; ++a) {
          p[a] = spec.origin()[a] + spec.voxel_size() * static_cast<double>(rng() % (spec.dims()[a] + 1));
        }
        c.push_back(p, testing::random_code(rng));
      } else {
        c.push_back(p, testing::random_code(rng));
      }
    }
    const VoxelGrid got = vote(accumulate(c, spec));
    const auto want = oracle::voxelize(c, spec);
    require(o, std::equal(want.begin(), want.end(), got.labels().begin()),
            fmt("cloud %d differs from the oracle", trial));
  }
  if (o.pass) o.detail = fmt("100 clouds, %zu injected ties", ties);
  return o;
}

// ---------------------------------------------------------------------------

PooledFeatures random_pooled(std::mt19937_64& rng, Eigen::Index q, Eigen::Index d, double s) {
  std::normal_distribution<double> n(0.0, s);
  PooledFeatures p{RowMatrix(q, d), std::vector<bool>(q, true)};
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) p.rows(i, k) = n(rng);
  }
  return p;
}

Outcome loss_correctness() {
  Outcome o;
  auto pooled = [](RowMatrix m) {
    const auto n = m.rows();
    return PooledFeatures{std::move(m), std::vector<bool>(n, true)};
  };
  RowMatrix one(1, 2);
  one << 0.7, -0.2;
  const double l0 = contrastive_loss(pooled(one), pooled(one)).loss;
  require(o, std::abs(l0) <= 1e-9, fmt("Q=1 loss %.17g", l0));
  RowMatrix a(2, 3), b(2, 3);
  a << 1, 2, 3, 1, 2, 3;
  b << -1, 0.5, 2, -1, 0.5, 2;
  const double l1 = contrastive_loss(pooled(a), pooled(b)).loss;
  require(o, std::abs(l1 - 2 * std::log(2.0)) <= 1e-9, fmt("identical rows %.17g", l1));
  const RowMatrix eye = RowMatrix::Identity(2, 2);
  const double l2 = contrastive_loss(pooled(eye), pooled(eye), {.tau = 1.0}).loss;
  const double want2 = 2 * std::log1p(std::exp(-1.0));
  require(o, std::abs(l2 - want2) <= 1e-9, fmt("identity %.17g vs %.17g", l2, want2));

  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index q = 2 + rng() % 15, d = 1 + rng() % 32;
    const auto f3 = random_pooled(rng, q, d, 0.3), f2 = random_pooled(rng, q, d, 0.3);
    const double tau = testing::uniform(rng, 0.07, 1.0);
    const double base = contrastive_loss(f3, f2, {.tau = tau}).loss;

    auto shifted = f2;
    Eigen::RowVectorXd u(d);
    for (Eigen::Index k = 0; k < d; ++k) u[k] = testing::uniform(rng, -1, 1);
    shifted.rows.rowwise() += u;
    const double ls = contrastive_loss(f3, shifted, {.tau = tau}).loss;

    const double c = testing::uniform(rng, 0.25, 4.0);
    auto scaled = f2;
    scaled.rows *= c;
    const double lc = contrastive_loss(f3, scaled, {.tau = c * tau}).loss;

    std::vector<Eigen::Index> perm(q);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto p3 = f3, p2 = f2;
    for (Eigen::Index i = 0; i < q; ++i) {
      p3.rows.row(i) = f3.rows.row(perm[i]);
      p2.rows.row(i) = f2.rows.row(perm[i]);
    }
    const double lp = contrastive_loss(p3, p2, {.tau = tau}).loss;
    for (double v : {ls, lc, lp}) worst = std::max(worst, std::abs(v - base));
  }
  require(o, worst <= 1e-9, fmt("invariance deviation %.3g", worst));
  if (o.pass) o.detail = fmt("closed forms exact to 1e-9; max invariance deviation %.2g", worst);
  return o;
}

// ---------------------------------------------------------------------------

Outcome gradient_check() {
  Outcome o;
  std::mt19937_64 rng(303);
  const double h = 1e-5;
  // Entries whose gradient is below this are compared absolutely.
  const double floor = 1e-3;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index q = 1 + rng() % 16, d = 1 + rng() % 32;
    const auto f3 = random_pooled(rng, q, d, 0.5), f2 = random_pooled(rng, q, d, 0.5);
    const double tau = testing::uniform(rng, 0.07, 1.0);
    for (bool norm : {false, true}) {
      const ContrastiveOptions opt{.tau = tau, .normalize = norm};
      const auto r = contrastive_loss_grad(f3, f2, opt);
      for (Eigen::Index i = 0; i < q; ++i) {
        for (Eigen::Index k = 0; k < d; ++k) {
          auto plus = f3, minus = f3;
          plus.rows(i, k) += h;
          minus.rows(i, k) -= h;
          const double fd =
              (contrastive_loss(plus, f2, opt).loss - contrastive_loss(minus, f2, opt).loss) /
              (2 * h);
          const double g = r.grad(i, k);
          worst = std::max(worst,
                           std::abs(g - fd) / std::max({std::abs(g), std::abs(fd), floor}));
        }
      }
    }
  }
  require(o, worst < 1e-5, fmt("max relative error %.3g", worst));
  if (o.pass) o.detail = fmt("20 instances x 2 settings, max relative error %.2g", worst);
  return o;
}

// ---------------------------------------------------------------------------

double angle_deg(const Vec3& a, const Vec3& b) {
  return std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0)) * 180.0 /
         std::numbers::pi;
}

Outcome end_to_end(const fs::path& work) {
  Outcome o;
  std::string agreements, interior;
  double worst_scale = 0.0, worst_up = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    // Reconstruction against the analytic grid.
    const GeneratedScene g = generate_scene(seed);
    const CameraIntrinsics intr = default_synth_intrinsics();
    SemanticPointCloud cloud;
    for (const auto& pose : g.trajectory) {
      const RenderedFrame f = render_frame(g.scene, pose, intr);
      cloud.append(backproject_labeled(f.depth, intr, pose, class_codes(f.labels)));
    }
    const GridSpec spec = file_precision(scene_grid_spec());
    const VoxelGrid pred = vote(accumulate(cloud, spec));
    const VoxelGrid gt = analytic_grid(g.scene, spec);
    std::size_t n = 0, agree = 0, open_n = 0, open_agree = 0;
    for (std::int64_t i = 0; i < spec.num_voxels(); ++i) {
      const Vec3 c = spec.voxel_center(delinearize(i, spec));
      if (g.scene.nearest_surface_distance(c) <= spec.voxel_size()) continue;
      const bool same = pred.at(i) == gt.at(i);
      ++n;
      agree += same;
      const bool solid = std::any_of(g.scene.boxes.begin(), g.scene.boxes.end(),
                                     [&](const Box& b) { return b.contains(c); });
      if (!solid) {
        ++open_n;
        open_agree += same;
      }
    }
    const double frac = static_cast<double>(agree) / static_cast<double>(n);
    const double open_frac = static_cast<double>(open_agree) / static_cast<double>(open_n);
    agreements += fmt("%s%.4f", seed == 1 ? "" : ",", frac);
    interior += fmt("%s%.4f", seed == 1 ? "" : ",", open_frac);
    require(o, frac >= 0.99, "");

    // Recovery of a perturbed clip through the file stages.
    std::mt19937_64 rng(seed * 7919);
    PipelineConfig cfg;
    cfg.seed = seed;
    cfg.perturb_tilt_deg = testing::uniform(rng, 5.0, 25.0);
    cfg.perturb_scale = testing::uniform(rng, 0.5, 2.0);
    cfg.perturb_lift = testing::uniform(rng, -1.0, 1.0);
    const fs::path dir = work / ("e2e_" + std::to_string(seed));
    StageArgs sa;
    sa.paths["out"] = dir / "synth";
    run_stage("synth", cfg, sa);
    StageArgs lift;
    lift.paths = {{"manifest", dir / "synth" / "manifest.txt"}, {"out", dir / "lifted.occt"}};
    run_stage("lift", cfg, lift);
    StageArgs filter;
    filter.paths = {{"in", dir / "lifted.occt"}, {"out", dir / "filtered.occt"}};
    run_stage("filter", cfg, filter);
    StageArgs align;
    align.paths = {{"in", dir / "filtered.occt"},
                   {"out", dir / "aligned.occt"},
                   {"transform", dir / "transform.occt"},
                   {"manifest", dir / "synth" / "manifest.txt"}};
    run_stage("align", cfg, align);
    const SimilarityTransform t = tensor_to_transform(read_tensor(dir / "transform.occt"));
    const Mat3 perturb_r =
        Eigen::AngleAxisd(cfg.perturb_tilt_deg * std::numbers::pi / 180.0,
                          Vec3(1, 1, 0).normalized())
            .toRotationMatrix();
    const double scale_err = std::abs(t.scale * cfg.perturb_scale - 1.0);
    const double up_err = angle_deg(t.rotation * perturb_r * Vec3::UnitZ(), Vec3::UnitZ());
    worst_scale = std::max(worst_scale, scale_err);
    worst_up = std::max(worst_up, up_err);
    require(o, scale_err <= 0.02, fmt("seed %d scale error %.4f", int(seed), scale_err));
    require(o, up_err <= 1.0, fmt("seed %d up error %.4f deg", int(seed), up_err));
  }
  const std::string numbers =
      fmt("agreement %s (>= 0.99 required); outside solid interiors %s; scale error <= %.2g%%; up "
          "error <= %.3g deg",
          agreements.c_str(), interior.c_str(), worst_scale * 100, worst_up);
  o.detail = o.detail.empty() ? numbers : o.detail + "; " + numbers;
  return o;
}

// ---------------------------------------------------------------------------

Outcome metric_oracle() {
  Outcome o;
  {
    const GridSpec spec(Vec3::Zero(), 1.0, {2, 1, 1});
    const VoxelGrid gt(spec, std::vector<ClassCode>{1, 2});
    const VoxelGrid pred(spec, std::vector<ClassCode>{1, 1});
    const VoxelGrid pred_one(spec, std::vector<ClassCode>{1, 0});
    require(o, binary_iou(pred_one, gt) == 50.0, "2-voxel IoU");
    require(o, semantic_miou(pred, gt).miou == 25.0, "2-voxel mIoU");
  }
  std::mt19937_64 rng(505);
  const GridSpec spec(Vec3::Zero(), 0.08, {8, 8, 8});
  for (int trial = 0; trial < 100; ++trial) {
    VoxelGrid pred(spec), gt(spec);
    // Vary the class mix so some classes are absent.
    const int classes = 1 + static_cast<int>(rng() % 12);
    for (std::size_t i = 0; i < pred.labels().size(); ++i) {
      auto pick = [&] {
        const auto r = rng() % (classes + 2);
        return static_cast<ClassCode>(r == 0 ? 0 : r == 1 ? 255 : std::min<int>(r - 1, 11));
      };
      pred.labels()[i] = pick();
      gt.labels()[i] = pick();
    }
    // Oracle: confusion matrix counted directly.
    std::uint64_t m[256][256] = {};
    for (std::size_t i = 0; i < gt.labels().size(); ++i) ++m[gt.labels()[i]][pred.labels()[i]];
    std::uint64_t inter = 0, uni = 0;
    for (int g = 0; g < 256; ++g) {
      if (g == 255) continue;
      for (int p = 0; p < 256; ++p) {
        const bool go = g >= 1 && g <= 11, po = p >= 1 && p <= 11;
        if (go && po) inter += m[g][p];
        if (go || po) uni += m[g][p];
      }
    }
    const double iou = uni == 0 ? 100.0 : 100.0 * double(inter) / double(uni);
    double sum = 0.0;
    int present = 0;
    std::array<std::optional<double>, 11> per{};
    for (int c = 1; c <= 11; ++c) {
      std::uint64_t tp = m[c][c], fp = 0, fn = 0;
      for (int g = 0; g < 255; ++g) fp += g == c ? 0 : m[g][c];
      for (int p = 0; p < 256; ++p) fn += p == c ? 0 : m[c][p];
      if (tp + fp + fn == 0) continue;
      per[c - 1] = 100.0 * double(tp) / double(tp + fp + fn);
      sum += *per[c - 1];
      ++present;
    }
    require(o, binary_iou(pred, gt) == iou, fmt("pair %d IoU", trial));
    if (present == 0) continue;
    const auto got = semantic_miou(pred, gt);
    require(o, got.per_class == per && got.miou == sum / present, fmt("pair %d mIoU", trial));
  }
  if (o.pass) o.detail = "2-voxel example exact; 100 random 8^3 pairs exact";
  return o;
}

// ---------------------------------------------------------------------------

Outcome filter_oracle() {
  Outcome o;
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t n = trial == 0 ? 5000 : 500 + rng() % 4000;
    auto c = testing::random_cloud(rng, n - 15, -1.0, 1.0);
    for (int i = 0; i < 10; ++i) c.push_back(c.points[i], c.labels[i]);
    for (int i = 0; i < 5; ++i) {
      c.push_back(Vec3(testing::uniform(rng, 3, 5), testing::uniform(rng, 3, 5), 0), 1);
    }
    const double r = testing::uniform(rng, 0.05, 0.2);
    const std::size_t min_n = 1 + rng() % 6;
    require(o, oracle::same_cloud(radius_filter(c, r, min_n), oracle::radius_filter(c, r, min_n)),
            fmt("radius filter cloud %d", trial));
    const std::size_t k = 1 + rng() % 24;
    const double ratio = testing::uniform(rng, 0.5, 3.0);
    require(o,
            oracle::same_cloud(statistical_filter(c, k, ratio),
                               oracle::statistical_filter(c, k, ratio)),
            fmt("statistical filter cloud %d", trial));
  }
  if (o.pass) o.detail = "6 clouds up to 5000 points, both filters exact";
  return o;
}

// ---------------------------------------------------------------------------

Outcome io_robustness() {
  Outcome o;
  std::mt19937_64 rng(707);
  std::vector<std::vector<std::byte>> seeds;
  for (DType d : {DType::kU8, DType::kU16, DType::kU32, DType::kF32, DType::kF64}) {
    Tensor t(d, {3, 2, 2});
    for (auto& b : t.bytes()) b = static_cast<std::byte>(rng());
    seeds.push_back(encode_tensor(t));
  }
  VoxelGrid grid(file_precision(GridSpec(Vec3(0.5, -1, 2), 0.08, {3, 4, 2})));
  for (auto& l : grid.labels()) l = testing::random_code(rng);
  const auto grid_bytes = encode_grid(grid);

  std::size_t accepted = 0, rejected = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const bool is_grid = trial % 2 == 1;
    auto buf = is_grid ? grid_bytes : seeds[rng() % seeds.size()];
    const std::size_t header = is_grid ? 36 : 16 + 24;
    const int edits = 1 + static_cast<int>(rng() % 6);
    for (int e = 0; e < edits; ++e) {
      switch (rng() % 4) {
        case 0: buf[rng() % header] = static_cast<std::byte>(rng()); break;
        case 1: buf[rng() % header] ^= static_cast<std::byte>(1u << (rng() % 8)); break;
        case 2: buf.resize(rng() % (buf.size() + 1)); break;
        default:
          for (int b = 0; b < 4 && !buf.empty(); ++b) buf[(12 + rng() % 12) % buf.size()] = std::byte{0xFF};
      }
      if (buf.empty()) break;
    }
    try {
      if (is_grid) {
        (void)decode_grid(buf);
      } else {
        (void)decode_tensor(buf);
      }
      ++accepted;
    } catch (const Error&) {
      ++rejected;
    } catch (const std::exception& e) {
      require(o, false, fmt("fuzz case %d threw %s", trial, e.what()));
    }
  }

  // Round trips through files for every artifact type.
  const fs::path dir = testing::temp_dir("accept_io");
  for (const auto& bytes : seeds) {
    write_tensor(dir / "t.occt", decode_tensor(bytes));
    require(o, read_file(dir / "t.occt") == bytes, "tensor file round trip");
    require(o, encode_tensor(read_tensor(dir / "t.occt")) == bytes, "tensor decode round trip");
  }
  write_grid(dir / "g.occg", grid);
  require(o, read_file(dir / "g.occg") == grid_bytes && read_grid(dir / "g.occg") == grid,
          "grid round trip");
  const auto cloud = testing::random_cloud(rng, 100, -5, 5);
  const auto ct = cloud_to_tensor(cloud);
  const auto cloud2 = tensor_to_cloud(decode_tensor(encode_tensor(ct)));
  require(o, oracle::same_cloud(cloud, cloud2), "cloud round trip");
  PooledFeatures pf = random_pooled(rng, 4, 3, 1.0);
  pf.valid[2] = false;
  const auto pf2 = tensor_to_pooled(decode_tensor(encode_tensor(pooled_to_tensor(pf))));
  require(o, pf2.valid == pf.valid && pf2.rows.row(0) == pf.rows.row(0), "pooled round trip");
  fs::remove_all(dir);
  if (o.pass) {
    o.detail = fmt("10000 fuzzed inputs (%zu rejected, %zu accepted), round trips bitwise", rejected,
                   accepted);
  }
  return o;
}

// ---------------------------------------------------------------------------

std::pair<int, std::string> shell(const std::string& cmd) {
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, {}};
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int raw = pclose(p);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::map<std::string, std::vector<std::byte>> snapshot(const fs::path& dir) {
  std::map<std::string, std::vector<std::byte>> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path());
  }
  return out;
}

Outcome determinism(const fs::path& work) {
  Outcome o;
  const std::string cli = OCC_CLI_PATH;
  const fs::path synth = work / "det_synth";
  const auto [sst, sout] = shell(cli + " synth --seed 11 --out " + synth.string());
  require(o, sst == 0, "synth failed");
  if (!o.pass) return o;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::pair<std::string, std::string>> runs = {
      {"a", "--threads 1"}, {"b", "--threads 1"}, {"max", "--threads " + std::to_string(hw)},
      {"four", "--threads 4"}};
  std::vector<std::pair<std::string, std::map<std::string, std::vector<std::byte>>>> results;
  for (const auto& [name, flags] : runs) {
    const fs::path out = work / ("det_" + name);
    const auto [st, text] = shell(cli + " run --seed 11 " + flags + " --manifest " +
                                  (synth / "manifest.txt").string() + " --out " + out.string());
    require(o, st == 0, "run " + name + " failed");
    if (!o.pass) return o;
    auto files = snapshot(out);
    files["<stdout>"] = std::vector<std::byte>(reinterpret_cast<const std::byte*>(text.data()),
                                               reinterpret_cast<const std::byte*>(text.data()) +
                                                   text.size());
    results.emplace_back(name, std::move(files));
  }
  for (std::size_t i = 1; i < results.size(); ++i) {
    require(o, results[i].second == results[0].second,
            "outputs of run " + results[i].first + " differ from run a");
  }
  if (o.pass) {
    o.detail = fmt("%zu files + stdout identical across 2 repeats and threads 1/%u/4",
                   results[0].second.size() - 1, hw);
  }
  return o;
}

// ---------------------------------------------------------------------------

Outcome throughput() {
  Outcome o;
  std::mt19937_64 rng(909);
  const GridSpec spec(Vec3::Zero(), kBenchmarkVoxelSize, kBenchmarkDims);
  SemanticPointCloud c;
  c.reserve(1000000);
  const Vec3 e = spec.extent();
  for (int i = 0; i < 1000000; ++i) {
    c.push_back(Vec3(testing::uniform(rng, 0, e.x()), testing::uniform(rng, 0, e.y()),
                     testing::uniform(rng, 0, e.z())),
                testing::random_code(rng));
  }
  set_thread_count(1);
  std::vector<double> times;
  std::int64_t occupied = 0;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    const VoxelGrid g = vote(accumulate(c, spec));
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
    occupied = std::count_if(g.labels().begin(), g.labels().end(),
                             [](ClassCode l) { return l != cls::kFree; });
  }
  set_thread_count(0);
  std::sort(times.begin(), times.end());
  require(o, times[1] < 1.0, fmt("median %.3f s", times[1]));
  o.detail = fmt("1e6 points into 60x60x36, median of 3: %.3f s (%lld voxels occupied)", times[1],
                 static_cast<long long>(occupied));
  return o;
}

}  // namespace
}  // namespace occ

int main() {
  using namespace occ;
  const fs::path work = testing::temp_dir("acceptance");
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"voxelization oracle equivalence", voxel_oracle},
      {"contrastive loss closed forms and invariances", loss_correctness},
      {"gradient matches finite differences", gradient_check},
      {"end-to-end synthetic reconstruction", [&] { return end_to_end(work); }},
      {"metric oracle", metric_oracle},
      {"filter oracle", filter_oracle},
      {"io robustness", io_robustness},
      {"run determinism", [&] { return determinism(work); }},
      {"voxelization throughput", throughput},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(work);
  return failures == 0 ? 0 : 1;
}
