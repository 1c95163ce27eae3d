#include "siftbench/matching.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>
#include <unordered_map>

#include "siftbench/error.hpp"

namespace siftbench {

namespace {

constexpr float kInf = std::numeric_limits<float>::infinity();

float squared_distance(const float* a, const float* b, size_t dim) {
  float acc = 0.0f;
  for (size_t k = 0; k < dim; ++k) {
    const float d = a[k] - b[k];
    acc += d * d;
  }
  return acc;
}

float dot_product(const float* a, const float* b, size_t dim) {
  float acc = 0.0f;
  for (size_t k = 0; k < dim; ++k) acc += a[k] * b[k];
  return acc;
}

// Similarity transform moving points to centroid 0 with RMS radius sqrt(2)
// (Hartley normalization). Returns false when the points are coincident.
bool normalizing_transform(const std::vector<Eigen::Vector2d>& pts, Eigen::Matrix3d& T) {
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += (p - centroid).norm();
  mean_dist /= static_cast<double>(pts.size());
  if (mean_dist < 1e-12) return false;
  const double s = std::numbers::sqrt2 / mean_dist;
  T << s, 0.0, -s * centroid.x(), 0.0, s, -s * centroid.y(), 0.0, 0.0, 1.0;
  return true;
}

// Direct linear transform over n >= 4 correspondences; exact for n == 4.
bool estimate_homography_dlt(const std::vector<Eigen::Vector2d>& src,
                             const std::vector<Eigen::Vector2d>& dst,
                             Homography& out) {
  Eigen::Matrix3d Ts, Td;
  if (!normalizing_transform(src, Ts) || !normalizing_transform(dst, Td)) {
    return false;
  }
  const size_t n = src.size();
  Eigen::MatrixXd A(2 * n, 9);
  for (size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d p = Ts * src[i].homogeneous();
    const Eigen::Vector3d q = Td * dst[i].homogeneous();
    const double x = p.x(), y = p.y();
    const double X = q.x(), Y = q.y();
    A.row(2 * i) << -x, -y, -1.0, 0.0, 0.0, 0.0, X * x, X * y, X;
    A.row(2 * i + 1) << 0.0, 0.0, 0.0, -x, -y, -1.0, Y * x, Y * y, Y;
  }
  const Eigen::Matrix<double, 9, 9> AtA = A.transpose() * A;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 9, 9>> eig(AtA);
  if (eig.info() != Eigen::Success) return false;
  const Eigen::Matrix<double, 9, 1> h = eig.eigenvectors().col(0);

  Eigen::Matrix3d Hn;
  Hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const Eigen::Matrix3d H = Td.inverse() * Hn * Ts;
  if (std::abs(H.determinant()) <= 1e-12) return false;
  out = Homography::from_array({H(0, 0), H(0, 1), H(0, 2), H(1, 0), H(1, 1),
                                H(1, 2), H(2, 0), H(2, 1), H(2, 2)});
  return true;
}

bool any_three_collinear(const std::vector<Eigen::Vector2d>& pts) {
  const size_t n = pts.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      for (size_t k = j + 1; k < n; ++k) {
        const Eigen::Vector2d u = pts[j] - pts[i];
        const Eigen::Vector2d v = pts[k] - pts[i];
        if (std::abs(u.x() * v.y() - u.y() * v.x()) < 1e-6) return true;
      }
    }
  }
  return false;
}

// Squared reprojection error of match m under H; infinity when the point
// maps to the line at infinity.
double reprojection_error_sq(const Homography& H, const Keypoint& s, const Keypoint& t) {
  const double w = H.h[6] * s.x + H.h[7] * s.y + H.h[8];
  if (std::abs(w) < 1e-12) return std::numeric_limits<double>::infinity();
  const double x = (H.h[0] * s.x + H.h[1] * s.y + H.h[2]) / w;
  const double y = (H.h[3] * s.x + H.h[4] * s.y + H.h[5]) / w;
  const double dx = x - t.x;
  const double dy = y - t.y;
  return dx * dx + dy * dy;
}

}  // namespace

std::vector<NearestNeighbor> nearest_neighbors(const std::vector<Feature>& source,
                                               const std::vector<Feature>& target) {
  std::vector<NearestNeighbor> table;
  if (source.empty() || target.empty()) return table;

  const size_t dim = source[0].descriptor.size();
  for (const Feature& f : source) {
    if (f.descriptor.size() != dim) {
      throw DimensionError("source descriptors have mixed lengths");
    }
  }
  std::vector<float> flat(target.size() * dim);
  std::vector<float> target_norm_sq(target.size());
  for (size_t t = 0; t < target.size(); ++t) {
    if (target[t].descriptor.size() != dim) {
      throw DimensionError("target descriptor length differs from source");
    }
    std::copy(target[t].descriptor.begin(), target[t].descriptor.end(),
              flat.begin() + t * dim);
    target_norm_sq[t] = dot_product(flat.data() + t * dim, flat.data() + t * dim, dim);
  }

  table.reserve(source.size());
  for (size_t s = 0; s < source.size(); ++s) {
    const float* a = source[s].descriptor.data();
    const float a_norm_sq = dot_product(a, a, dim);
    // Rank candidates by |a|^2 + |b|^2 - 2ab (equal to the squared distance
    // up to rounding), then recompute the winners' distances exactly so that
    // identical descriptors report exactly zero.
    float best = kInf, second = kInf;
    int best_index = -1, second_index = -1;
    for (size_t t = 0; t < target.size(); ++t) {
      const float d2 =
          a_norm_sq + target_norm_sq[t] - 2.0f * dot_product(a, flat.data() + t * dim, dim);
      if (d2 < best) {
        second = best;
        second_index = best_index;
        best = d2;
        best_index = static_cast<int>(t);
      } else if (d2 < second) {
        second = d2;
        second_index = static_cast<int>(t);
      }
    }
    NearestNeighbor nn;
    nn.source_index = static_cast<int>(s);
    nn.target_index = best_index;
    nn.distance =
        std::sqrt(squared_distance(a, flat.data() + best_index * dim, dim));
    nn.second_distance =
        second_index < 0
            ? kInf
            : std::sqrt(squared_distance(a, flat.data() + second_index * dim, dim));
    table.push_back(nn);
  }
  return table;
}

std::vector<Match> filter_matches(const std::vector<NearestNeighbor>& table,
                                  const MatchOptions& options) {
  if (options.threshold <= 0.0) {
    throw ParameterError("match threshold must be positive");
  }
  std::vector<Match> matches;
  for (const NearestNeighbor& nn : table) {
    if (nn.target_index < 0) continue;
    if (nn.distance >= options.threshold) continue;
    if (options.ratio_test && std::isfinite(nn.second_distance) &&
        nn.distance >= options.ratio * nn.second_distance) {
      continue;
    }
    matches.push_back(Match{nn.source_index, nn.target_index, nn.distance});
  }
  return matches;
}

std::vector<Match> match_features(const std::vector<Feature>& source,
                                  const std::vector<Feature>& target,
                                  const MatchOptions& options) {
  return filter_matches(nearest_neighbors(source, target), options);
}

std::vector<Match> match_features(const std::vector<Feature>& source,
                                  const std::vector<Feature>& target,
                                  double threshold) {
  MatchOptions options;
  options.threshold = threshold;
  return match_features(source, target, options);
}

std::vector<Keypoint> keypoints_of(const std::vector<Feature>& features) {
  std::vector<Keypoint> kps;
  kps.reserve(features.size());
  for (const Feature& f : features) kps.push_back(f.keypoint);
  return kps;
}

VerifiedMatches ransac_homography(const std::vector<Match>& matches,
                                  const std::vector<Keypoint>& source_keypoints,
                                  const std::vector<Keypoint>& target_keypoints,
                                  const RansacOptions& options) {
  const size_t n = matches.size();
  if (n < 4) {
    throw InsufficientDataError("ransac_homography requires at least 4 matches");
  }
  if (options.iterations < 1) {
    throw ParameterError("ransac iterations must be >= 1");
  }
  for (const Match& m : matches) {
    if (m.source_index < 0 ||
        m.source_index >= static_cast<int>(source_keypoints.size()) ||
        m.target_index < 0 ||
        m.target_index >= static_cast<int>(target_keypoints.size())) {
      throw ParameterError("match indices outside the keypoint lists");
    }
  }

  std::mt19937_64 rng(options.seed);
  const double thr_sq = options.inlier_threshold * options.inlier_threshold;

  int best_count = 0;
  std::vector<int> best_inliers;
  Homography best_h;
  bool found = false;

  std::vector<Eigen::Vector2d> src(4), dst(4);
  std::array<size_t, 4> pick{};
  for (int iter = 0; iter < options.iterations; ++iter) {
    // Draw 4 distinct match indices.
    for (int i = 0; i < 4; ++i) {
      size_t idx;
      bool fresh;
      do {
        idx = static_cast<size_t>(rng() % n);
        fresh = true;
        for (int j = 0; j < i; ++j) fresh = fresh && pick[j] != idx;
      } while (!fresh);
      pick[i] = idx;
    }
    for (int i = 0; i < 4; ++i) {
      const Match& m = matches[pick[i]];
      const Keypoint& s = source_keypoints[m.source_index];
      const Keypoint& t = target_keypoints[m.target_index];
      src[i] = {s.x, s.y};
      dst[i] = {t.x, t.y};
    }
    if (any_three_collinear(src) || any_three_collinear(dst)) continue;

    Homography H;
    try {
      if (!estimate_homography_dlt(src, dst, H)) continue;
    } catch (const GeometryError&) {
      continue;
    }

    int count = 0;
    for (const Match& m : matches) {
      if (reprojection_error_sq(H, source_keypoints[m.source_index],
                                target_keypoints[m.target_index]) <= thr_sq) {
        ++count;
      }
    }
    if (count > best_count) {
      best_count = count;
      best_h = H;
      best_inliers.clear();
      for (size_t i = 0; i < n; ++i) {
        if (reprojection_error_sq(best_h, source_keypoints[matches[i].source_index],
                                  target_keypoints[matches[i].target_index]) <= thr_sq) {
          best_inliers.push_back(static_cast<int>(i));
        }
      }
      found = true;
    }
  }
  if (!found) {
    throw DegenerateGeometryError(
        "ransac_homography: every sampled minimal set was degenerate");
  }

  // Least-squares re-estimate on the consensus set, then refresh the inlier
  // list so the published set is consistent with the published homography.
  if (best_inliers.size() >= 4) {
    std::vector<Eigen::Vector2d> s_all, d_all;
    s_all.reserve(best_inliers.size());
    d_all.reserve(best_inliers.size());
    for (int idx : best_inliers) {
      const Match& m = matches[idx];
      s_all.push_back({source_keypoints[m.source_index].x,
                       source_keypoints[m.source_index].y});
      d_all.push_back({target_keypoints[m.target_index].x,
                       target_keypoints[m.target_index].y});
    }
    Homography refined;
    bool ok = false;
    try {
      ok = estimate_homography_dlt(s_all, d_all, refined);
    } catch (const GeometryError&) {
      ok = false;
    }
    if (ok) best_h = refined;
  }

  VerifiedMatches out;
  out.homography = best_h;
  out.inlier_threshold = options.inlier_threshold;
  out.seed = options.seed;
  for (const Match& m : matches) {
    if (reprojection_error_sq(best_h, source_keypoints[m.source_index],
                              target_keypoints[m.target_index]) <= thr_sq) {
      out.inliers.push_back(m);
    }
  }
  return out;
}

nlohmann::json matches_to_json(const std::vector<Match>& matches) {
  nlohmann::json rows = nlohmann::json::array();
  for (const Match& m : matches) {
    rows.push_back(
        nlohmann::json{{"src", m.source_index}, {"dst", m.target_index}, {"dist", m.distance}});
  }
  return rows;
}

std::vector<Match> matches_from_json(const nlohmann::json& j) {
  std::vector<Match> matches;
  for (const auto& row : j) {
    matches.push_back(Match{row.at("src").get<int>(), row.at("dst").get<int>(),
                            row.at("dist").get<float>()});
  }
  return matches;
}

nlohmann::json verified_to_json(const std::vector<Match>& matches,
                                const VerifiedMatches& verified) {
  std::unordered_map<int, int> row_of_source;
  for (size_t i = 0; i < matches.size(); ++i) {
    row_of_source.emplace(matches[i].source_index, static_cast<int>(i));
  }
  nlohmann::json inlier_rows = nlohmann::json::array();
  for (const Match& m : verified.inliers) {
    const auto it = row_of_source.find(m.source_index);
    if (it != row_of_source.end()) inlier_rows.push_back(it->second);
  }
  return nlohmann::json{{"matches", matches_to_json(matches)},
                        {"H", verified.homography.h},
                        {"inliers", std::move(inlier_rows)},
                        {"inlierThreshold", verified.inlier_threshold},
                        {"seed", verified.seed}};
}

}  // namespace siftbench
