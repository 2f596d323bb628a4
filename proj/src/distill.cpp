// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/distill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <utility>

#include "parallel.hpp"

namespace occ {

LabelMap::LabelMap(int width, int height, std::vector<std::uint32_t> ids)
    : width_(width), height_(height), ids_(std::move(ids)) {
  if (width < 1 || height < 1) fail(ErrorCode::kInvalidArgument, "mask must be at least 1x1");
  if (ids_.size() != static_cast<std::size_t>(width) * height) {
    fail(ErrorCode::kDimensionMismatch, "mask ids do not match width*height");
  }
}

SuperpixelPartition::SuperpixelPartition(int width, int height,
                                         std::vector<std::uint32_t> index)
    : width_(width), height_(height), index_(std::move(index)) {
  if (width < 1 || height < 1) {
    fail(ErrorCode::kInvalidArgument, "partition must be at least 1x1");
  }
  if (index_.size() != static_cast<std::size_t>(width) * height) {
    fail(ErrorCode::kDimensionMismatch, "partition entries do not match width*height");
  }
  std::uint32_t max = 0;
  bool any = false;
  for (auto i : index_) {
    if (i == kNone) continue;
    any = true;
    max = std::max(max, i);
  }
  count_ = any ? max + 1 : 0;
  std::vector<char> used(count_, 0);
  for (auto i : index_) {
    if (i != kNone) used[i] = 1;
  }
  if (std::find(used.begin(), used.end(), 0) != used.end()) {
    fail(ErrorCode::kInvalidArgument, "superpixel indices must be dense");
  }
}

SupervoxelAssignment::SupervoxelAssignment(GridSpec spec, std::uint32_t count,
                                           std::vector<std::uint32_t> index)
    : spec_(std::move(spec)), count_(count), index_(std::move(index)) {
  if (index_.size() != static_cast<std::size_t>(spec_.num_voxels())) {
    fail(ErrorCode::kDimensionMismatch, "assignment does not match grid voxel count");
  }
  for (auto i : index_) {
    if (i != kNone && i >= count_) {
      fail(ErrorCode::kOutOfRange, "supervoxel index exceeds superpixel count");
    }
  }
}

std::size_t SupervoxelAssignment::assigned_voxels() const {
  return static_cast<std::size_t>(
      std::count_if(index_.begin(), index_.end(), [](auto i) { return i != kNone; }));
}

FeatureMap::FeatureMap(int width, int height, RowMatrix values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width < 1 || height < 1) {
    fail(ErrorCode::kInvalidArgument, "feature map must be at least 1x1");
  }
  if (values_.rows() != static_cast<Eigen::Index>(width) * height) {
    fail(ErrorCode::kDimensionMismatch, "feature rows do not match width*height");
  }
  if (!values_.allFinite()) fail(ErrorCode::kNonFinite, "features must be finite");
}

std::size_t PooledFeatures::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true));
}

SuperpixelPartition superpixels_from_mask(const LabelMap& mask, bool split_components) {
  const int w = mask.width();
  const int h = mask.height();
  const auto ids = mask.ids();
  std::vector<std::uint32_t> out(ids.size(), SuperpixelPartition::kNone);
  std::uint32_t next = 0;
  if (!split_components) {
    std::unordered_map<std::uint32_t, std::uint32_t> remap;
    for (std::size_t p = 0; p < ids.size(); ++p) {
      if (ids[p] == LabelMap::kIgnore) continue;
      auto [it, inserted] = remap.try_emplace(ids[p], next);
      if (inserted) ++next;
      out[p] = it->second;
    }
    return SuperpixelPartition(w, h, std::move(out));
  }
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < ids.size(); ++start) {
    if (ids[start] == LabelMap::kIgnore || out[start] != SuperpixelPartition::kNone) continue;
    const std::uint32_t id = ids[start];
    const std::uint32_t label = next++;
    out[start] = label;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      const int u = static_cast<int>(p % w);
      const int v = static_cast<int>(p / w);
      const std::pair<int, int> nbrs[4] = {{u - 1, v}, {u + 1, v}, {u, v - 1}, {u, v + 1}};
      for (auto [nu, nv] : nbrs) {
        if (nu < 0 || nv < 0 || nu >= w || nv >= h) continue;
        const std::size_t q = static_cast<std::size_t>(nv) * w + nu;
        if (ids[q] != id || out[q] != SuperpixelPartition::kNone) continue;
        out[q] = label;
        stack.push_back(q);
      }
    }
  }
  return SuperpixelPartition(w, h, std::move(out));
}

SupervoxelAssignment assign_supervoxels(const SuperpixelPartition& part,
                                        const PixelVoxelMap& map,
                                        const GridSpec& spec) {
  if (part.width() != map.width() || part.height() != map.height()) {
    fail(ErrorCode::kDimensionMismatch, "partition and pixel map sizes differ");
  }
  const auto sp = part.indices();
  const auto vox = map.entries();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> votes;
  votes.reserve(vox.size());
  for (std::size_t p = 0; p < vox.size(); ++p) {
    if (vox[p] == PixelVoxelMap::kUnmapped || sp[p] == SuperpixelPartition::kNone) continue;
    if (vox[p] >= spec.num_voxels()) {
      fail(ErrorCode::kOutOfRange, "pixel map entry exceeds grid voxel count");
    }
    votes.emplace_back(vox[p], sp[p]);
  }
  std::sort(votes.begin(), votes.end());
  std::vector<std::uint32_t> index(static_cast<std::size_t>(spec.num_voxels()),
                                   SupervoxelAssignment::kNone);
  std::size_t i = 0;
  while (i < votes.size()) {
    const std::uint32_t voxel = votes[i].first;
    std::uint32_t best = votes[i].second;
    std::size_t best_count = 0;
    while (i < votes.size() && votes[i].first == voxel) {
      const std::uint32_t cand = votes[i].second;
      std::size_t run = 0;
      while (i < votes.size() && votes[i].first == voxel && votes[i].second == cand) {
        ++run;
        ++i;
      }
      // Runs arrive in ascending superpixel order, so '>' keeps the lowest on ties.
      if (run > best_count) {
        best_count = run;
        best = cand;
      }
    }
    index[voxel] = best;
  }
  return SupervoxelAssignment(spec, part.count(), std::move(index));
}

PooledFeatures pool_superpixel_features(const FeatureMap& features,
                                        const SuperpixelPartition& part) {
  if (features.width() != part.width() || features.height() != part.height()) {
    fail(ErrorCode::kDimensionMismatch, "feature map and partition sizes differ");
  }
  const auto q = static_cast<Eigen::Index>(part.count());
  PooledFeatures out{RowMatrix::Zero(q, features.dim()), std::vector<bool>(q, false)};
  std::vector<std::size_t> counts(q, 0);
  const auto idx = part.indices();
  for (std::size_t p = 0; p < idx.size(); ++p) {
    if (idx[p] == SuperpixelPartition::kNone) continue;
    out.rows.row(idx[p]) += features.values().row(static_cast<Eigen::Index>(p));
    ++counts[idx[p]];
  }
  for (Eigen::Index r = 0; r < q; ++r) {
    if (counts[r] == 0) continue;
    out.rows.row(r) /= static_cast<double>(counts[r]);
    out.valid[r] = true;
  }
  return out;
}

PooledFeatures pool_supervoxel_features(const VoxelFeatures& voxels,
                                        const SupervoxelAssignment& assign) {
  if (!(voxels.spec() == assign.spec())) {
    fail(ErrorCode::kSpecMismatch, "voxel features and assignment use different grids");
  }
  const auto q = static_cast<Eigen::Index>(assign.count());
  PooledFeatures out{RowMatrix::Zero(q, voxels.dim()), std::vector<bool>(q, false)};
  std::vector<std::size_t> counts(q, 0);
  const auto idx = assign.indices();
  for (std::size_t v = 0; v < idx.size(); ++v) {
    if (idx[v] == SupervoxelAssignment::kNone) continue;
    out.rows.row(idx[v]) += voxels.values().row(static_cast<Eigen::Index>(v));
    ++counts[idx[v]];
  }
  for (Eigen::Index r = 0; r < q; ++r) {
    if (counts[r] == 0) continue;
    out.rows.row(r) /= static_cast<double>(counts[r]);
    out.valid[r] = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Contrastive loss

namespace {

ContrastiveResult contrastive_impl(const PooledFeatures& f3d, const PooledFeatures& f2d,
                                   const ContrastiveOptions& options, bool want_grad) {
  if (!(options.tau > 0.0) || !std::isfinite(options.tau)) {
    fail(ErrorCode::kInvalidArgument, "temperature must be positive");
  }
  if (f3d.count() != f2d.count() || f3d.dim() != f2d.dim()) {
    fail(ErrorCode::kDimensionMismatch, "pooled feature shapes differ");
  }
  if (static_cast<Eigen::Index>(f3d.valid.size()) != f3d.count() ||
      static_cast<Eigen::Index>(f2d.valid.size()) != f2d.count()) {
    fail(ErrorCode::kDimensionMismatch, "validity flags do not match row count");
  }
  std::vector<Eigen::Index> pairs;
  for (Eigen::Index i = 0; i < f3d.count(); ++i) {
    if (f3d.valid[i] && f2d.valid[i]) pairs.push_back(i);
  }
  if (pairs.empty()) fail(ErrorCode::kNoMatchedPairs, "no matched pairs");
  const auto m = static_cast<Eigen::Index>(pairs.size());
  const Eigen::Index d = f3d.dim();

  RowMatrix a(m, d), b(m, d);
  for (Eigen::Index k = 0; k < m; ++k) {
    a.row(k) = f3d.rows.row(pairs[k]);
    b.row(k) = f2d.rows.row(pairs[k]);
  }
  if (!a.allFinite() || !b.allFinite()) {
    fail(ErrorCode::kNonFinite, "non-finite pooled features");
  }
  Eigen::VectorXd a_norm = Eigen::VectorXd::Ones(m);
  if (options.normalize) {
    a_norm = a.rowwise().norm();
    const Eigen::VectorXd b_norm = b.rowwise().norm();
    if ((a_norm.array() == 0.0).any() || (b_norm.array() == 0.0).any()) {
      fail(ErrorCode::kDegenerate, "cannot normalize a zero feature row");
    }
    a.array().colwise() /= a_norm.array();
    b.array().colwise() /= b_norm.array();
  }

  std::vector<double> terms(static_cast<std::size_t>(m));
  RowMatrix grad_a;
  if (want_grad) grad_a = RowMatrix::Zero(m, d);
  detail::parallel_for(
      static_cast<std::size_t>(m),
      [&](std::size_t begin, std::size_t end) {
        Eigen::VectorXd logits(m);
        for (std::size_t k = begin; k < end; ++k) {
          const auto i = static_cast<Eigen::Index>(k);
          logits.noalias() = b * a.row(i).transpose();
          logits /= options.tau;
          const double peak = logits.maxCoeff();
          const double sum = (logits.array() - peak).exp().sum();
          const double lse = peak + std::log(sum);
          terms[k] = lse - logits[i];
          if (want_grad) {
            Eigen::VectorXd p = (logits.array() - lse).exp();
            p[i] -= 1.0;
            grad_a.row(i) = (p.transpose() * b) / options.tau;
          }
        }
      },
      16);

  ContrastiveResult out;
  out.valid_pairs = pairs.size();
  out.loss = detail::pairwise_sum(terms.data(), terms.size());
  double reduce = 1.0;
  if (options.mean) {
    reduce = 1.0 / static_cast<double>(m);
    out.loss *= reduce;
  }
  if (want_grad) {
    out.grad = RowMatrix::Zero(f3d.count(), d);
    for (Eigen::Index k = 0; k < m; ++k) {
      Eigen::RowVectorXd g = grad_a.row(k) * reduce;
      if (options.normalize) {
        // d(f/|f|)/df = (I - u u^T) / |f|
        const Eigen::RowVectorXd u = a.row(k);
        g = (g - g.dot(u) * u) / a_norm[k];
      }
      out.grad.row(pairs[k]) = g;
    }
  }
  return out;
}

}  // namespace

ContrastiveResult contrastive_loss(const PooledFeatures& f3d, const PooledFeatures& f2d,
                                   const ContrastiveOptions& options) {
  return contrastive_impl(f3d, f2d, options, false);
}

ContrastiveResult contrastive_loss_grad(const PooledFeatures& f3d,
                                        const PooledFeatures& f2d,
                                        const ContrastiveOptions& options) {
  return contrastive_impl(f3d, f2d, options, true);
}

}  // namespace occ
