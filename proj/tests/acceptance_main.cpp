// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code is the number of
// failed criteria.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "siftbench/bench.hpp"
#include "siftbench/deform.hpp"
#include "siftbench/image_io.hpp"
#include "siftbench/matching.hpp"
#include "siftbench/sift.hpp"
#include "siftbench/synth.hpp"

using namespace siftbench;
namespace fs = std::filesystem;

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw std::runtime_error(message);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

struct SuiteFixture {
  std::vector<BenchmarkRecord> records;
  double seconds = 0.0;
  fs::path images_dir;
  fs::path markdown_path;
  std::string failure;
};

SuiteFixture run_default_suite(const fs::path& dir) {
  SuiteFixture fixture;
  fixture.images_dir = dir / "images";
  fixture.markdown_path = dir / "report.md";
  SuiteConfig config = default_synth_config();
  config.outputs.csv = dir / "report.csv";
  config.outputs.report = fixture.markdown_path;
  config.outputs.images_dir = fixture.images_dir;
  try {
    const auto start = std::chrono::steady_clock::now();
    fixture.records = run_suite(config);
    fixture.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_report_csv(fixture.records, *config.outputs.csv);
    write_report_markdown(fixture.records, *config.outputs.report);
  } catch (const std::exception& e) {
    fixture.failure = e.what();
  }
  return fixture;
}

Image gained(const Image& img, float gain) {
  Image out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.set(x, y, img.at(x, y) * gain);
  }
  return out;
}

}  // namespace

int main() {
  const fs::path tmp =
      fs::temp_directory_path() / ("siftbench_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(tmp);

  std::printf("running default benchmark suite (7 classes x 5 kinds x 5 levels)...\n");
  std::fflush(stdout);
  const SuiteFixture suite = run_default_suite(tmp);
  if (suite.failure.empty()) {
    std::printf("suite finished in %.1f s with %zu records\n\n", suite.seconds,
                suite.records.size());
  } else {
    std::printf("suite failed: %s\n\n", suite.failure.c_str());
  }
  std::fflush(stdout);

  const auto suite_ok = [&] {
    require(suite.failure.empty(), "default suite failed: " + suite.failure);
  };

  std::vector<std::pair<std::string, std::function<void()>>> criteria;

  criteria.emplace_back("ranking reproduction (Compression max > 30%, Blur min < 10%, <= 5 min)", [&] {
    suite_ok();
    std::map<DeformationKind, double> means;
    for (DeformationKind kind : all_deformation_kinds()) {
      means[kind] = aggregate(suite.records, kind, 0.8, 5);
    }
    const double compression = means[DeformationKind::Compression];
    const double blur = means[DeformationKind::Blur];
    for (const auto& [kind, mean] : means) {
      if (kind != DeformationKind::Compression) {
        require(compression > mean, "Compression mean " + fmt(compression) +
                                        "% not above " + kind_label(kind) + " mean " +
                                        fmt(mean) + "%");
      }
      if (kind != DeformationKind::Blur) {
        require(blur < mean, "Blur mean " + fmt(blur) + "% not below " +
                                 kind_label(kind) + " mean " + fmt(mean) + "%");
      }
    }
    require(compression > 30.0,
            "Compression mean " + fmt(compression) + "% not above 30%");
    require(blur < 10.0, "Blur mean " + fmt(blur) + "% not below 10%");
    require(suite.seconds <= 300.0,
            "suite took " + fmt(suite.seconds) + " s (budget 300 s)");
  });

  criteria.emplace_back("threshold monotonicity (0.2 <= 0.4 <= 0.6 <= 0.8 in all cells)", [&] {
    suite_ok();
    std::map<std::string, std::vector<const BenchmarkRecord*>> cells;
    for (const BenchmarkRecord& rec : suite.records) {
      cells[rec.class_name + "|" + kind_label(rec.kind) + "|" + std::to_string(rec.level)]
          .push_back(&rec);
    }
    require(!cells.empty(), "no cells found");
    for (const auto& [key, rows] : cells) {
      for (size_t i = 1; i < rows.size(); ++i) {
        require(rows[i - 1]->threshold < rows[i]->threshold, "rows out of order");
        require(rows[i - 1]->retained_pct <= rows[i]->retained_pct,
                "cell " + key + ": retained " + fmt(rows[i - 1]->retained_pct) +
                    "% at t=" + fmt(rows[i - 1]->threshold) + " exceeds " +
                    fmt(rows[i]->retained_pct) + "% at t=" + fmt(rows[i]->threshold));
      }
    }
  });

  criteria.emplace_back("severity degradation (Blur/Light level 5 <= level 2 class-means)", [&] {
    suite_ok();
    for (DeformationKind kind : {DeformationKind::Blur, DeformationKind::Light}) {
      for (double threshold : {0.2, 0.4, 0.6, 0.8}) {
        const double level2 = aggregate(suite.records, kind, threshold, 2);
        const double level5 = aggregate(suite.records, kind, threshold, 5);
        require(level5 <= level2, kind_label(kind) + " t=" + fmt(threshold) +
                                      ": level-5 mean " + fmt(level5) +
                                      "% exceeds level-2 mean " + fmt(level2) + "%");
      }
    }
  });

  criteria.emplace_back("identity cells (level 1 exact 100%, Compression >= 95%)", [&] {
    suite_ok();
    int checked = 0;
    for (const BenchmarkRecord& rec : suite.records) {
      if (rec.level != 1) continue;
      ++checked;
      if (rec.kind == DeformationKind::Compression) {
        require(rec.retained_pct >= 95.0,
                "Compression level-1 cell " + rec.class_name + " retained " +
                    fmt(rec.retained_pct) + "% < 95%");
      } else {
        require(rec.retained_pct == 100.0,
                kind_label(rec.kind) + " level-1 cell " + rec.class_name +
                    " retained " + fmt(rec.retained_pct) + "% != 100%");
      }
    }
    require(checked == 7 * 5 * 4, "expected 140 level-1 records, saw " +
                                      std::to_string(checked));
  });

  criteria.emplace_back("descriptor invariants (unit norm, [0,1], clip 0.2) on 1000+ features", [&] {
    const SiftParams p;
    size_t checked = 0;
    for (uint64_t seed : {1, 4}) {
      MotifSpec spec;
      spec.family = seed == 1 ? MotifFamily::Chevron : MotifFamily::RepetitiveTile;
      spec.seed = seed;
      const Image img = generate_motif(spec);
      const ScaleSpace ss = build_scale_space(img, p);
      for (const Keypoint& kp : detect_keypoints(ss, p)) {
        for (const Keypoint& oriented : assign_orientations(kp, ss, p)) {
          const auto stages = compute_descriptor_stages(oriented, ss, p);
          if (!stages) continue;
          require(stages->final.size() == 128, "descriptor length != 128");
          double norm_sq = 0.0;
          for (float v : stages->final) {
            require(v >= 0.0f && v <= 1.0f, "component outside [0,1]");
            norm_sq += static_cast<double>(v) * v;
          }
          require(std::abs(std::sqrt(norm_sq) - 1.0) <= 1e-6,
                  "descriptor norm " + fmt(std::sqrt(norm_sq)) + " off unit");
          for (float v : stages->clipped) {
            require(v <= 0.2f + 1e-9f, "pre-renormalization component above clip");
          }
          ++checked;
        }
      }
    }
    require(checked >= 1000,
            "only " + std::to_string(checked) + " features checked (need 1000)");
  });

  criteria.emplace_back("photometric invariance (gain 0.6: 95% of descriptors move < 0.05)", [&] {
    const SiftParams p;
    MotifSpec spec;
    spec.family = MotifFamily::RepetitiveTile;
    spec.width = 512;
    spec.height = 256;
    spec.seed = 4;
    const Image img = generate_motif(spec);
    const Image dim = gained(img, 0.6f);
    const ScaleSpace ss = build_scale_space(img, p);
    const ScaleSpace ss_dim = build_scale_space(dim, p);
    const auto features = extract_features(img, p);
    require(features.size() >= 100, "not enough features for the invariance check");
    int total = 0, close = 0;
    for (const Feature& f : features) {
      const auto a = compute_descriptor(f.keypoint, ss, p);
      const auto b = compute_descriptor(f.keypoint, ss_dim, p);
      if (!a || !b) continue;
      double dist_sq = 0.0;
      for (size_t i = 0; i < a->descriptor.size(); ++i) {
        const double d = a->descriptor[i] - b->descriptor[i];
        dist_sq += d * d;
      }
      ++total;
      if (std::sqrt(dist_sq) < 0.05) ++close;
    }
    require(total >= 100, "too few comparable descriptors");
    const double rate = 100.0 * close / total;
    require(rate >= 95.0, "only " + fmt(rate) + "% of descriptors moved < 0.05");
  });

  criteria.emplace_back("gaussian semigroup (max interior diff < 5e-3 for sigma in {1,2,4})", [&] {
    MotifSpec spec;
    spec.family = MotifFamily::NonGeometric;
    spec.width = 128;
    spec.height = 128;
    spec.period = 16;
    spec.contrast = 0.6;
    spec.border_rows = 0;
    spec.seed = 9;
    const Image img = generate_motif(spec);
    for (double s1 : {1.0, 2.0, 4.0}) {
      for (double s2 : {1.0, 2.0, 4.0}) {
        const Image composed = gaussian_blur(gaussian_blur(img, s1), s2);
        const Image direct = gaussian_blur(img, std::sqrt(s1 * s1 + s2 * s2));
        const int margin = static_cast<int>(std::ceil(3.0 * (s1 + s2)));
        const double diff = oracles::max_abs_diff(composed, direct, margin);
        require(diff < 5e-3, "sigma (" + fmt(s1) + "," + fmt(s2) + ") diff " + fmt(diff));
      }
    }
  });

  criteria.emplace_back("detector oracle (blob within 2 px, scale within 1.5x of dense scan)", [&] {
    const double sigma_b = 4.0;
    const Image img = oracles::gaussian_blob(128, 128, 64.0, 64.0, sigma_b);
    const SiftParams p;
    const auto kps = detect_keypoints(build_scale_space(img, p), p);
    const Keypoint* best = nullptr;
    for (const Keypoint& kp : kps) {
      if (std::hypot(kp.x - 64.0, kp.y - 64.0) > 2.0) continue;
      if (!best || std::abs(kp.response) > std::abs(best->response)) best = &kp;
    }
    require(best != nullptr, "no keypoint within 2 px of the blob center");
    const auto optimum =
        oracles::dense_dog_scan(img, 1.5, 12.0, 25, std::pow(2.0, 1.0 / 3.0));
    const double ratio = best->sigma / optimum.sigma;
    require(ratio < 1.5 && ratio > 1.0 / 1.5,
            "detected sigma " + fmt(best->sigma) + " vs scan optimum " +
                fmt(optimum.sigma));
  });

  criteria.emplace_back("ransac (corners < 1.5 px, >= 95% true inliers, deterministic, < 1 s)", [&] {
    const int width = 800, height = 355;
    const Homography truth = zoom_rotation_homography(30.0, 0.8, width, height);
    std::mt19937_64 rng(2024);
    const auto uniform = [&rng](double lo, double hi) {
      return lo + (hi - lo) * (static_cast<double>(rng() >> 11) /
                               static_cast<double>(1ull << 53));
    };
    std::vector<Keypoint> source, target;
    std::vector<Match> matches;
    for (int i = 0; i < 70; ++i) {
      Keypoint s;
      s.x = uniform(60.0, width - 60.0);
      s.y = uniform(40.0, height - 40.0);
      const auto [tx, ty] = truth.map(s.x, s.y);
      Keypoint t;
      t.x = tx;
      t.y = ty;
      source.push_back(s);
      target.push_back(t);
      matches.push_back(Match{i, i, 0.1f});
    }
    for (int i = 70; i < 100; ++i) {
      Keypoint s, t;
      s.x = uniform(0.0, width - 1.0);
      s.y = uniform(0.0, height - 1.0);
      t.x = uniform(0.0, width - 1.0);
      t.y = uniform(0.0, height - 1.0);
      source.push_back(s);
      target.push_back(t);
      matches.push_back(Match{i, i, 0.5f});
    }
    RansacOptions options;
    options.seed = 7;

    const auto start = std::chrono::steady_clock::now();
    const VerifiedMatches verified = ransac_homography(matches, source, target, options);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const double corner = oracles::max_corner_error(verified.homography, truth, width, height);
    require(corner < 1.5, "corner reprojection error " + fmt(corner) + " px");
    int recovered = 0;
    for (const Match& m : verified.inliers) {
      if (m.source_index < 70) ++recovered;
    }
    require(recovered >= 67, "recovered only " + std::to_string(recovered) +
                                 " of 70 true inliers");
    const VerifiedMatches again = ransac_homography(matches, source, target, options);
    require(again.homography.h == verified.homography.h &&
                again.inliers.size() == verified.inliers.size(),
            "ransac not deterministic for a fixed seed");
    require(seconds < 1.0, "ransac took " + fmt(seconds) + " s");
  });

  criteria.emplace_back("rotation repeatability (>= 50% keypoints preserved under 90 deg)", [&] {
    MotifSpec spec;
    spec.family = MotifFamily::RepetitiveTile;
    spec.width = 256;
    spec.height = 256;
    spec.seed = 4;
    const Image img = generate_motif(spec);
    const SiftParams p;
    const auto original = extract_features(img, p);
    require(original.size() >= 50, "too few features for the repeatability check");
    const Homography r90 = Homography::from_array({0, -1, 255, 1, 0, 0, 0, 0, 1});
    const auto rotated = extract_features(warp_homography(img, r90), p);
    int preserved = 0;
    for (const Feature& f : original) {
      const double rx = 255.0 - f.keypoint.y;
      const double ry = f.keypoint.x;
      for (const Feature& g : rotated) {
        if (std::hypot(g.keypoint.x - rx, g.keypoint.y - ry) <= 2.0 &&
            std::abs(std::log2(g.keypoint.sigma / f.keypoint.sigma)) <= 1.0) {
          ++preserved;
          break;
        }
      }
    }
    const double rate = 100.0 * preserved / original.size();
    require(rate >= 50.0, "only " + fmt(rate) + "% of keypoints preserved");
  });

  criteria.emplace_back("protocol cardinality (175 images, 700 records, Table-1 labels)", [&] {
    suite_ok();
    require(suite.records.size() == 700, "expected 700 records, got " +
                                             std::to_string(suite.records.size()));
    size_t png_count = 0;
    for (const auto& entry : fs::directory_iterator(suite.images_dir)) {
      if (entry.path().extension() == ".png") ++png_count;
    }
    require(png_count == 175,
            "expected 175 deformed images, got " + std::to_string(png_count));

    std::ifstream md(suite.markdown_path);
    require(md.good(), "markdown report missing");
    const std::regex row_re(
        R"(^\| (Blur|Compression|Light|Zoom_Rotation|Viewpoint)-[1-5]_sift 0\.[2468] \| [0-9]+\.[0-9]{2}% \|$)");
    size_t rows = 0;
    for (std::string line; std::getline(md, line);) {
      if (line.rfind("| ", 0) == 0 && line.find("Test") == std::string::npos &&
          line.find("---") == std::string::npos) {
        require(std::regex_match(line, row_re), "bad report row: " + line);
        ++rows;
      }
    }
    require(rows == 700, "expected 700 report rows, got " + std::to_string(rows));
  });

  int failures = 0;
  for (const auto& [name, body] : criteria) {
    try {
      body();
      std::printf("[PASS] %s\n", name.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("[FAIL] %s\n       %s\n", name.c_str(), e.what());
    }
    std::fflush(stdout);
  }
  std::printf("\n%zu/%zu acceptance criteria passed\n", criteria.size() - failures,
              criteria.size());

  fs::remove_all(tmp);
  return failures == 0 ? 0 : 1;
}
