#pragma once

#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <vector>

#include "siftbench/image.hpp"
#include "siftbench/sift.hpp"

namespace siftbench {

/// Nearest-neighbor pair under Euclidean descriptor distance (in [0, 2] for
/// unit descriptors). target_index is always the source feature's nearest
/// neighbor; ties break toward the lowest target index.
struct Match {
  int source_index = 0;
  int target_index = 0;
  float distance = 0.0f;

  bool operator==(const Match&) const = default;
};

/// Nearest and second-nearest target of one source feature.
struct NearestNeighbor {
  int source_index = 0;
  int target_index = -1;
  float distance = 0.0f;
  float second_distance = 0.0f;
};

/// Full nearest-neighbor table; one entry per source feature (empty when the
/// target list is empty). Threshold filtering is a view over this table, so
/// benchmark cells that differ only in threshold share one scan.
std::vector<NearestNeighbor> nearest_neighbors(const std::vector<Feature>& source,
                                               const std::vector<Feature>& target);

struct MatchOptions {
  double threshold = 0.8;   // absolute Euclidean distance cutoff (exclusive)
  bool ratio_test = false;  // optional nearest/second-nearest filter, off in
                            // the benchmark protocol
  double ratio = 0.8;
};

/// For each source feature, its nearest target by Euclidean distance; a
/// Match is emitted iff distance < threshold. Many-to-one target assignments
/// are permitted. An empty target list yields an empty result.
std::vector<Match> match_features(const std::vector<Feature>& source,
                                  const std::vector<Feature>& target,
                                  const MatchOptions& options);
std::vector<Match> match_features(const std::vector<Feature>& source,
                                  const std::vector<Feature>& target,
                                  double threshold);

/// Threshold filter over a precomputed nearest-neighbor table.
std::vector<Match> filter_matches(const std::vector<NearestNeighbor>& table,
                                  const MatchOptions& options);

struct RansacOptions {
  int iterations = 1000;
  double inlier_threshold = 3.0;  // pixels
  uint64_t seed = 0;
};

/// RANSAC-verified match set; every inlier's keypoint pair reprojects within
/// inlier_threshold under homography.
struct VerifiedMatches {
  Homography homography;
  std::vector<Match> inliers;
  double inlier_threshold = 0.0;
  uint64_t seed = 0;
};

/// Robust homography fit over matched keypoints: seeded 4-point samples,
/// normalized DLT, consensus maximization, least-squares re-estimate on the
/// best consensus. Deterministic for a fixed seed. Throws
/// InsufficientDataError for fewer than 4 matches and
/// DegenerateGeometryError when every sample was collinear.
VerifiedMatches ransac_homography(const std::vector<Match>& matches,
                                  const std::vector<Keypoint>& source_keypoints,
                                  const std::vector<Keypoint>& target_keypoints,
                                  const RansacOptions& options = {});

/// Keypoint column of a feature list, index-aligned.
std::vector<Keypoint> keypoints_of(const std::vector<Feature>& features);

/// Rows {"src","dst","dist"}.
nlohmann::json matches_to_json(const std::vector<Match>& matches);
std::vector<Match> matches_from_json(const nlohmann::json& j);

/// Adds {"H":[9],"inliers":[indices into matches],"seed"}.
nlohmann::json verified_to_json(const std::vector<Match>& matches,
                                const VerifiedMatches& verified);

}  // namespace siftbench
