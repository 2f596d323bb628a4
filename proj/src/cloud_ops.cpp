// SPDX-FileCopyrightText: 2026 The occkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/cloud_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "kdtree.hpp"
#include "parallel.hpp"

namespace occ {

Plane::Plane(const Vec3& n, double d) : normal(n), offset(d) {
  if (!n.allFinite() || !std::isfinite(d)) {
    fail(ErrorCode::kNonFinite, "plane must be finite");
  }
  if (std::abs(n.norm() - 1.0) > 1e-9) {
    fail(ErrorCode::kInvalidArgument, "plane normal must be unit length");
  }
}

namespace {

SemanticPointCloud select(const SemanticPointCloud& cloud,
                          const std::vector<char>& keep) {
  SemanticPointCloud out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (keep[i]) out.push_back(cloud.points[i], cloud.labels[i]);
  }
  return out;
}

}  // namespace

SemanticPointCloud radius_filter(const SemanticPointCloud& cloud, double radius,
                                 std::size_t min_neighbors) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    fail(ErrorCode::kInvalidArgument, "radius must be positive");
  }
  if (min_neighbors < 1) {
    fail(ErrorCode::kInvalidArgument, "min_neighbors must be >= 1");
  }
  cloud.validate();
  if (cloud.empty()) return {};
  const detail::KdTree tree(cloud.points);
  const double r2 = radius * radius;
  std::vector<char> keep(cloud.size(), 0);
  detail::parallel_for(cloud.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      keep[i] = tree.count_within(i, r2, min_neighbors) >= min_neighbors;
    }
  });
  return select(cloud, keep);
}

std::vector<double> mean_knn_distances(const SemanticPointCloud& cloud,
                                       std::size_t k) {
  if (k < 1) fail(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (cloud.size() <= k) {
    fail(ErrorCode::kInsufficientPoints,
         "insufficient points: need more than k = " + std::to_string(k));
  }
  const detail::KdTree tree(cloud.points);
  std::vector<double> mean(cloud.size());
  detail::parallel_for(cloud.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto d2 = tree.knn(i, k);
      double sum = 0.0;
      for (double v : d2) sum += std::sqrt(v);
      mean[i] = sum / static_cast<double>(k);
    }
  });
  return mean;
}

SemanticPointCloud statistical_filter(const SemanticPointCloud& cloud,
                                      std::size_t k, double std_ratio) {
  if (!(std_ratio > 0.0) || !std::isfinite(std_ratio)) {
    fail(ErrorCode::kInvalidArgument, "std_ratio must be positive");
  }
  cloud.validate();
  const auto m = mean_knn_distances(cloud, k);
  const double n = static_cast<double>(m.size());
  double sum = 0.0;
  for (double v : m) sum += v;
  const double mu = sum / n;
  double sq = 0.0;
  for (double v : m) sq += (v - mu) * (v - mu);
  const double sigma = m.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
  const double threshold = mu + std_ratio * sigma;
  std::vector<char> keep(cloud.size());
  for (std::size_t i = 0; i < m.size(); ++i) keep[i] = m[i] <= threshold;
  return select(cloud, keep);
}

double default_filter_radius(const SemanticPointCloud& cloud) {
  if (cloud.empty()) return 0.0;
  Vec3 mn = cloud.points.front();
  Vec3 mx = mn;
  for (const auto& p : cloud.points) {
    mn = mn.cwiseMin(p);
    mx = mx.cwiseMax(p);
  }
  return 0.05 * (mx - mn).norm();
}

// ---------------------------------------------------------------------------
// Floor fitting

namespace {

struct PlaneFit {
  Plane plane;
  std::vector<std::uint32_t> inliers;
};

bool plane_through(const Vec3& a, const Vec3& b, const Vec3& c, Plane& out) {
  const Vec3 n = (b - a).cross(c - a);
  const double len = n.norm();
  const double scale = std::max((b - a).squaredNorm(), (c - a).squaredNorm());
  if (!(len > 1e-12 * scale) || len == 0.0) return false;
  const Vec3 unit = n / len;
  out = Plane(unit, -unit.dot(a));
  return true;
}

Plane refine(const SemanticPointCloud& cloud,
             const std::vector<std::uint32_t>& inliers, const Plane& fallback) {
  if (inliers.size() < 3) return fallback;
  Vec3 centroid = Vec3::Zero();
  for (auto i : inliers) centroid += cloud.points[i];
  centroid /= static_cast<double>(inliers.size());
  Mat3 cov = Mat3::Zero();
  for (auto i : inliers) {
    const Vec3 d = cloud.points[i] - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  if (eig.info() != Eigen::Success) return fallback;
  Vec3 n = eig.eigenvectors().col(0).normalized();
  if (!n.allFinite()) return fallback;
  if (n.dot(fallback.normal) < 0.0) n = -n;
  return Plane(n, -n.dot(centroid));
}

std::vector<std::uint32_t> collect_inliers(const SemanticPointCloud& cloud,
                                           const std::vector<std::uint32_t>& pool,
                                           const Plane& plane, double threshold) {
  std::vector<std::uint32_t> out;
  for (auto i : pool) {
    if (std::abs(plane.signed_distance(cloud.points[i])) <= threshold) out.push_back(i);
  }
  return out;
}

void check_not_collinear(const SemanticPointCloud& cloud) {
  const Vec3& p0 = cloud.points.front();
  std::size_t i1 = 0;
  double far = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double d = (cloud.points[i] - p0).squaredNorm();
    if (d > far) {
      far = d;
      i1 = i;
    }
  }
  if (far == 0.0) fail(ErrorCode::kDegenerate, "degenerate cloud: all points coincide");
  const Vec3 axis = cloud.points[i1] - p0;
  double area = 0.0;
  for (const auto& p : cloud.points) area = std::max(area, axis.cross(p - p0).norm());
  if (!(area > 1e-12 * far)) {
    fail(ErrorCode::kDegenerate, "degenerate cloud: all points are collinear");
  }
}

}  // namespace

Plane estimate_floor_plane(const SemanticPointCloud& cloud,
                           const FloorFitOptions& options) {
  if (options.iterations < 1) fail(ErrorCode::kInvalidArgument, "iterations must be >= 1");
  if (!(options.inlier_threshold > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "inlier threshold must be positive");
  }
  if (!options.up_hint.allFinite() || options.up_hint.norm() == 0.0) {
    fail(ErrorCode::kInvalidArgument, "up hint must be a non-zero vector");
  }
  cloud.validate();
  if (cloud.size() < 3) {
    fail(ErrorCode::kInsufficientPoints, "insufficient points: need at least 3");
  }
  check_not_collinear(cloud);

  const std::size_t n = cloud.size();
  const std::size_t min_count = std::max<std::size_t>(
      3, static_cast<std::size_t>(std::ceil(options.min_support * static_cast<double>(n))));
  std::vector<std::uint32_t> remaining(n);
  for (std::size_t i = 0; i < n; ++i) remaining[i] = static_cast<std::uint32_t>(i);

  std::vector<PlaneFit> planes;
  for (int level = 0; level < options.max_planes && remaining.size() >= 3; ++level) {
    std::vector<std::uint32_t> sample;
    const std::size_t stride =
        std::max<std::size_t>(1, remaining.size() / std::max<std::size_t>(options.score_sample, 1));
    for (std::size_t i = 0; i < remaining.size(); i += stride) sample.push_back(remaining[i]);

    std::vector<std::int64_t> score(options.iterations, -1);
    std::vector<Plane> hypo(options.iterations);
    detail::parallel_for(
        options.iterations,
        [&](std::size_t begin, std::size_t end) {
          for (std::size_t t = begin; t < end; ++t) {
            std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                              static_cast<std::uint32_t>(options.seed >> 32),
                              static_cast<std::uint32_t>(level),
                              static_cast<std::uint32_t>(t)};
            std::mt19937_64 rng(seq);
            std::uniform_int_distribution<std::size_t> pick(0, remaining.size() - 1);
            const std::size_t a = pick(rng);
            std::size_t b = pick(rng);
            std::size_t c = pick(rng);
            if (a == b || a == c || b == c) continue;
            Plane pl;
            if (!plane_through(cloud.points[remaining[a]], cloud.points[remaining[b]],
                               cloud.points[remaining[c]], pl)) {
              continue;
            }
            std::int64_t count = 0;
            for (auto i : sample) {
              if (std::abs(pl.signed_distance(cloud.points[i])) <= options.inlier_threshold) {
                ++count;
              }
            }
            score[t] = count;
            hypo[t] = pl;
          }
        },
        8);
    std::size_t best = 0;
    for (std::size_t t = 1; t < score.size(); ++t) {
      if (score[t] > score[best]) best = t;
    }
    if (score[best] <= 0) {
      // Tiny inputs can miss every distinct triple; fall back to enumerating.
      if (remaining.size() > 64) break;
      bool found = false;
      for (std::size_t a = 0; a < remaining.size() && !found; ++a) {
        for (std::size_t b = a + 1; b < remaining.size() && !found; ++b) {
          for (std::size_t c = b + 1; c < remaining.size() && !found; ++c) {
            found = plane_through(cloud.points[remaining[a]], cloud.points[remaining[b]],
                                  cloud.points[remaining[c]], hypo[best]);
          }
        }
      }
      if (!found) break;
    }
    const Plane& guess = hypo[best];
    auto inliers = collect_inliers(cloud, remaining, guess, options.inlier_threshold);
    Plane refined = refine(cloud, inliers, guess);
    auto refined_inliers = collect_inliers(cloud, remaining, refined, options.inlier_threshold);
    PlaneFit fit = refined_inliers.size() >= inliers.size()
                       ? PlaneFit{refined, std::move(refined_inliers)}
                       : PlaneFit{guess, std::move(inliers)};
    if (fit.inliers.size() < min_count) break;
    std::vector<char> taken(n, 0);
    for (auto i : fit.inliers) taken[i] = 1;
    std::erase_if(remaining, [&](std::uint32_t i) { return taken[i] != 0; });
    planes.push_back(std::move(fit));
  }
  if (planes.empty()) {
    fail(ErrorCode::kDegenerate, "no dominant plane found");
  }

  const Vec3 up = options.up_hint.normalized();
  const double min_cos = std::cos(options.max_tilt_deg * std::numbers::pi / 180.0);
  std::size_t chosen = 0;
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < planes.size(); ++p) {
    if (std::abs(planes[p].plane.normal.dot(up)) < min_cos) continue;
    double h = 0.0;
    for (auto i : planes[p].inliers) h += cloud.points[i].dot(up);
    h /= static_cast<double>(planes[p].inliers.size());
    if (h < lowest) {
      lowest = h;
      chosen = p;
    }
  }

  Plane floor = planes[chosen].plane;
  std::size_t above = 0, below = 0;
  for (const auto& p : cloud.points) {
    const double s = floor.signed_distance(p);
    if (s > options.inlier_threshold) ++above;
    if (s < -options.inlier_threshold) ++below;
  }
  const bool flip = below > above || (below == above && floor.normal.dot(up) < 0.0);
  if (flip) floor = Plane(-floor.normal, -floor.offset);
  return floor;
}

std::pair<SemanticPointCloud, SimilarityTransform> align_z_up(
    const SemanticPointCloud& cloud, const Plane& floor) {
  SimilarityTransform t;
  t.rotation =
      Eigen::Quaterniond::FromTwoVectors(floor.normal, Vec3::UnitZ()).toRotationMatrix();
  // After rotating, the floor sits at z = -offset.
  t.translation = Vec3(0.0, 0.0, floor.offset);
  return {transform_cloud(cloud, t), t};
}

double z_percentile(const SemanticPointCloud& cloud, double q) {
  if (cloud.empty()) fail(ErrorCode::kInsufficientPoints, "insufficient points: empty cloud");
  if (!(q >= 0.0 && q <= 100.0)) fail(ErrorCode::kInvalidArgument, "percentile must be in [0,100]");
  std::vector<double> z(cloud.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = cloud.points[i].z();
  const double pos = (static_cast<double>(z.size()) - 1.0) * q / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  std::nth_element(z.begin(), z.begin() + lo, z.end());
  const double a = z[lo];
  if (frac == 0.0 || lo + 1 >= z.size()) return a;
  const double b = *std::min_element(z.begin() + lo + 1, z.end());
  return a + frac * (b - a);
}

std::pair<SemanticPointCloud, double> metric_scale(const SemanticPointCloud& cloud,
                                                   double target_wall_height) {
  if (!(target_wall_height > 0.0) || !std::isfinite(target_wall_height)) {
    fail(ErrorCode::kInvalidArgument, "target wall height must be positive");
  }
  cloud.validate();
  if (cloud.empty()) fail(ErrorCode::kInsufficientPoints, "insufficient points: empty cloud");
  const double h = z_percentile(cloud, kWallHeightPercentile);
  if (!(h > 0.0)) {
    fail(ErrorCode::kDegenerate, "degenerate height: estimated wall height " +
                                     std::to_string(h) + " is not positive");
  }
  const double s = target_wall_height / h;
  SimilarityTransform t;
  t.scale = s;
  return {transform_cloud(cloud, t), s};
}

}  // namespace occ
