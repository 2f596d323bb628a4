// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/voxelize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"

namespace occ {

void VoxelHistogram::add(std::int64_t voxel, ClassCode label, std::uint32_t count) {
  if (voxel < 0 || voxel >= spec_.num_voxels()) {
    fail(ErrorCode::kOutOfRange, "index out of grid: " + std::to_string(voxel));
  }
  if (!is_valid_class(label)) {
    fail(ErrorCode::kInvalidClass, "invalid class code " + std::to_string(label));
  }
  if (count == 0) return;
  voxels_[voxel][class_slot(label)] += count;
  total_ += count;
}

namespace {

std::int64_t bin_axis(double p, double origin, double size, std::int64_t dim) {
  double rel = (p - origin) / size;
  if (!(rel >= 0.0)) return -1;
  rel = std::min(rel, 1e15);
  auto i = static_cast<std::int64_t>(std::floor(rel));
  if (i >= dim) {
    if (i == dim && p <= origin + static_cast<double>(dim) * size) return dim - 1;
    return -1;
  }
  return i;
}

}  // namespace

std::int64_t bin_point(const Vec3& p, const GridSpec& spec) {
  const auto& d = spec.dims();
  const Vec3& o = spec.origin();
  const double s = spec.voxel_size();
  const std::int64_t x = bin_axis(p.x(), o.x(), s, d[0]);
  if (x < 0) return -1;
  const std::int64_t y = bin_axis(p.y(), o.y(), s, d[1]);
  if (y < 0) return -1;
  const std::int64_t z = bin_axis(p.z(), o.z(), s, d[2]);
  if (z < 0) return -1;
  return x + d[0] * (y + d[1] * z);
}

namespace {

void accumulate_range(const SemanticPointCloud& cloud, std::size_t begin,
                      std::size_t end, VoxelHistogram& hist) {
  std::uint64_t dropped = 0;
  for (std::size_t i = begin; i < end; ++i) {
    const std::int64_t v = bin_point(cloud.points[i], hist.spec());
    if (v < 0) {
      ++dropped;
      continue;
    }
    hist.add(v, cloud.labels[i]);
  }
  hist.add_dropped(dropped);
}

}  // namespace

VoxelHistogram accumulate(const SemanticPointCloud& cloud, const GridSpec& spec) {
  cloud.validate();
  constexpr std::size_t kShard = 1 << 16;
  const std::size_t shards = (cloud.size() + kShard - 1) / kShard;
  if (shards <= 1 || thread_count() <= 1) {
    VoxelHistogram hist(spec);
    accumulate_range(cloud, 0, cloud.size(), hist);
    return hist;
  }
  std::vector<VoxelHistogram> parts(shards, VoxelHistogram(spec));
  detail::parallel_for(
      shards,
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
          accumulate_range(cloud, s * kShard, std::min(cloud.size(), (s + 1) * kShard),
                           parts[s]);
        }
      },
      1);
  VoxelHistogram out = std::move(parts.front());
  for (std::size_t s = 1; s < shards; ++s) out = merge(out, parts[s]);
  return out;
}

VoxelHistogram merge(const VoxelHistogram& a, const VoxelHistogram& b) {
  if (!(a.spec() == b.spec())) {
    fail(ErrorCode::kSpecMismatch, "cannot merge histograms over different grids");
  }
  VoxelHistogram out = a;
  for (const auto& [voxel, counts] : b.voxels()) {
    for (int slot = 0; slot < cls::kNumScoreColumns; ++slot) {
      if (counts[slot] == 0) continue;
      const ClassCode label = slot == 12 ? cls::kUnknown : static_cast<ClassCode>(slot);
      out.add(voxel, label, counts[slot]);
    }
  }
  out.add_dropped(b.dropped());
  return out;
}

ClassCode vote_counts(const ClassCounts& counts) {
  ClassCode best = cls::kUnknown;
  std::uint32_t best_count = 0;
  for (int c = 1; c <= cls::kNumSemantic; ++c) {
    if (counts[c] > best_count) {
      best_count = counts[c];
      best = static_cast<ClassCode>(c);
    }
  }
  return best;
}

VoxelGrid vote(const VoxelHistogram& hist) {
  VoxelGrid grid(hist.spec(), cls::kFree);
  auto labels = grid.labels();
  for (const auto& [voxel, counts] : hist.voxels()) labels[voxel] = vote_counts(counts);
  return grid;
}

GridSpec auto_spec(const SemanticPointCloud& cloud, double voxel_size) {
  if (cloud.empty()) fail(ErrorCode::kInsufficientPoints, "cannot size a grid for an empty cloud");
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
    fail(ErrorCode::kInvalidArgument, "voxel size must be positive");
  }
  cloud.validate();
  Vec3 mn = cloud.points.front();
  Vec3 mx = mn;
  for (const auto& p : cloud.points) {
    mn = mn.cwiseMin(p);
    mx = mx.cwiseMax(p);
  }
  std::array<std::int64_t, 3> dims{};
  for (int a = 0; a < 3; ++a) {
    const double cells = std::ceil((mx[a] - mn[a]) / voxel_size);
    if (cells > 1e9) fail(ErrorCode::kInvalidArgument, "cloud extent too large for the voxel size");
    auto d = std::max<std::int64_t>(1, static_cast<std::int64_t>(cells));
    while (mn[a] + static_cast<double>(d) * voxel_size < mx[a]) ++d;
    dims[a] = d;
  }
  return GridSpec(mn, voxel_size, dims);
}

VoxelGrid window_to_grid(const VoxelGrid& grid, const GridSpec& target) {
  const GridSpec& src = grid.spec();
  const double size = src.voxel_size();
  if (std::abs(size - target.voxel_size()) > 1e-12 * size) {
    fail(ErrorCode::kSpecMismatch, "voxel size mismatch between grid and window");
  }
  std::array<std::int64_t, 3> offset{};
  for (int a = 0; a < 3; ++a) {
    const double cells = (target.origin()[a] - src.origin()[a]) / size;
    const double whole = std::round(cells);
    if (std::abs(cells - whole) > 1e-6) {
      fail(ErrorCode::kSpecMismatch, "window origin is not on the source voxel lattice");
    }
    offset[a] = static_cast<std::int64_t>(whole);
  }
  VoxelGrid out(target, cls::kUnknown);
  auto labels = out.labels();
  const auto& td = target.dims();
  for (std::int64_t z = 0; z < td[2]; ++z) {
    for (std::int64_t y = 0; y < td[1]; ++y) {
      for (std::int64_t x = 0; x < td[0]; ++x) {
        const VoxelCoord s{x + offset[0], y + offset[1], z + offset[2]};
        if (!src.contains(s)) continue;
        labels[x + td[0] * (y + td[1] * z)] = grid.at(s);
      }
    }
  }
  return out;
}

}  // namespace occ
