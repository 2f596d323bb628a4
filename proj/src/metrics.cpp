// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/metrics.hpp"

namespace occ {

ClassScores::ClassScores(GridSpec spec, RowMatrix values)
    : spec_(std::move(spec)), values_(std::move(values)) {
  if (values_.rows() != spec_.num_voxels() || values_.cols() != cls::kNumScoreColumns) {
    fail(ErrorCode::kDimensionMismatch, "class scores must be N x 13");
  }
  if (!values_.allFinite()) fail(ErrorCode::kNonFinite, "class scores must be finite");
}

VoxelGrid decode_occupancy(const ClassScores& scores) {
  VoxelGrid grid(scores.spec(), cls::kFree);
  auto labels = grid.labels();
  const RowMatrix& s = scores.values();
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    int best = 0;
    for (int c = 1; c <= cls::kNumSemantic; ++c) {
      if (s(i, c) > s(i, best)) best = c;
    }
    labels[i] = static_cast<ClassCode>(best);
  }
  return grid;
}

namespace {

void check_specs(const VoxelGrid& pred, const VoxelGrid& gt) {
  if (!(pred.spec() == gt.spec())) {
    fail(ErrorCode::kSpecMismatch, "prediction and ground truth grids differ");
  }
}

}  // namespace

double binary_iou(const VoxelGrid& pred, const VoxelGrid& gt) {
  check_specs(pred, gt);
  std::uint64_t inter = 0, uni = 0;
  const auto p = pred.labels();
  const auto g = gt.labels();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] == cls::kUnknown) continue;
    const bool po = is_semantic(p[i]);
    const bool go = is_semantic(g[i]);
    inter += po && go;
    uni += po || go;
  }
  if (uni == 0) return 100.0;
  return 100.0 * static_cast<double>(inter) / static_cast<double>(uni);
}

ConfusionMatrix confusion(const VoxelGrid& pred, const VoxelGrid& gt) {
  check_specs(pred, gt);
  ConfusionMatrix m{};
  const auto p = pred.labels();
  const auto g = gt.labels();
  for (std::size_t i = 0; i < g.size(); ++i) ++m[class_slot(g[i])][class_slot(p[i])];
  return m;
}

SemanticIou semantic_miou(const VoxelGrid& pred, const VoxelGrid& gt, bool benchmark_mode) {
  check_specs(pred, gt);
  std::array<std::uint64_t, cls::kNumScoreColumns> tp{}, fp{}, fn{};
  const auto p = pred.labels();
  const auto g = gt.labels();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] == cls::kUnknown) continue;
    if (p[i] == g[i]) {
      ++tp[class_slot(g[i])];
    } else {
      ++fn[class_slot(g[i])];
      ++fp[class_slot(p[i])];
    }
  }
  SemanticIou out;
  double sum = 0.0;
  int present = 0;
  for (int c = 1; c <= cls::kNumSemantic; ++c) {
    const std::uint64_t denom = tp[c] + fp[c] + fn[c];
    if (denom == 0) {
      if (benchmark_mode) ++present;
      continue;
    }
    const double iou = 100.0 * static_cast<double>(tp[c]) / static_cast<double>(denom);
    out.per_class[c - 1] = iou;
    sum += iou;
    ++present;
  }
  if (present == 0) {
    fail(ErrorCode::kInvalidArgument, "no semantic class present in prediction or ground truth");
  }
  out.miou = sum / present;
  return out;
}

}  // namespace occ
