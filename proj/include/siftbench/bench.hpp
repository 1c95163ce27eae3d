#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "siftbench/deform.hpp"
#include "siftbench/image.hpp"
#include "siftbench/matching.hpp"
#include "siftbench/sift.hpp"
#include "siftbench/synth.hpp"

namespace siftbench {

/// One evaluation cell: class x deformation x level x threshold.
/// retained_pct = 100 * positive_matches / template_features.
struct BenchmarkRecord {
  std::string class_name;
  DeformationKind kind = DeformationKind::Blur;
  int level = 1;
  double threshold = 0.0;
  int template_features = 0;
  int query_features = 0;
  int positive_matches = 0;
  double retained_pct = 0.0;
  std::optional<int> ransac_inliers;
  uint64_t seed = 0;

  bool operator==(const BenchmarkRecord&) const = default;
};

/// A benchmark class: either an image file or an inline motif description.
struct ClassSource {
  std::string name;
  std::optional<std::filesystem::path> path;
  std::optional<MotifSpec> motif;
};

struct SuiteOutputs {
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> report;
  std::optional<std::filesystem::path> images_dir;  // deformed PNGs
  std::optional<std::filesystem::path> viz_dir;     // match composites
};

struct SuiteConfig {
  std::vector<ClassSource> classes;
  std::vector<DeformationKind> kinds = all_deformation_kinds();
  std::vector<int> levels = {1, 2, 3, 4, 5};
  std::vector<double> thresholds = {0.2, 0.4, 0.6, 0.8};
  SiftParams sift;
  bool ransac_enabled = false;
  uint64_t seed = 0;
  int jobs = 0;  // 0: hardware concurrency
  SuiteOutputs outputs;

  /// Thresholds must be sorted ascending; every list non-empty; levels in 1..5.
  void validate() const;
};

/// The full 7-class x 5-kind x 5-level x 4-threshold synthetic experiment
/// (175 deformed images, 700 records).
SuiteConfig default_synth_config();

/// Evaluates one cell: deform the template, extract features from both
/// sides, count nearest-neighbor matches under the threshold. Runs RANSAC
/// verification when ransac_seed is given and at least 4 matches exist.
/// Throws DataError when the template yields zero features.
BenchmarkRecord run_cell(const Image& template_image, const std::string& class_name,
                         const DeformationSpec& spec, double threshold,
                         const SiftParams& params,
                         std::optional<uint64_t> ransac_seed = std::nullopt);

/// Runs every class x kind x level x threshold cell; one record per cell in
/// deterministic (class, kind, level, threshold) order. Degenerate classes
/// are reported through the log sink and skipped; the suite continues.
std::vector<BenchmarkRecord> run_suite(
    const SuiteConfig& config,
    const std::function<void(const std::string&)>& log = {});

/// Mean retained percentage over the classes selected by (kind, threshold,
/// level). Throws DataError when nothing matches.
double aggregate(const std::vector<BenchmarkRecord>& records, DeformationKind kind,
                 double threshold, int level);

/// Side-by-side composite with circles (radius ~ keypoint sigma) at matched
/// keypoints and line segments joining the pairs.
Image render_matches(const Image& left, const Image& right,
                     const std::vector<Match>& matches,
                     const std::vector<Keypoint>& left_keypoints,
                     const std::vector<Keypoint>& right_keypoints);

/// CSV with the exact column set
/// class,kind,level,threshold,template_features,query_features,
/// positive_matches,retained_pct,ransac_inliers,seed.
/// Floating-point fields use shortest round-trip formatting.
void write_report_csv(const std::vector<BenchmarkRecord>& records,
                      const std::filesystem::path& path);
std::vector<BenchmarkRecord> read_report_csv(const std::filesystem::path& path);

/// Markdown grouped by class with rows labeled `<Kind>-<level>_sift <threshold>`.
void write_report_markdown(const std::vector<BenchmarkRecord>& records,
                           const std::filesystem::path& path);

/// Row label, e.g. "Blur-2_sift 0.2".
std::string record_label(const BenchmarkRecord& record);

nlohmann::json suite_config_to_json(const SuiteConfig& config);
SuiteConfig suite_config_from_json(const nlohmann::json& j);

}  // namespace siftbench
