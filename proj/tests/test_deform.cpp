#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>

#include "oracles.hpp"
#include "siftbench/deform.hpp"
#include "siftbench/error.hpp"
#include "siftbench/synth.hpp"

using namespace siftbench;

namespace {

Image test_motif(int width = 256, int height = 128) {
  MotifSpec spec;
  spec.family = MotifFamily::RepetitiveTile;
  spec.width = width;
  spec.height = height;
  spec.seed = 17;
  return generate_motif(spec);
}

}  // namespace

TEST_CASE("schedule endpoints and interpolation") {
  CHECK(std::get<BlurParams>(schedule(DeformationKind::Blur, 1).params).sigma == 0.0);
  CHECK(std::get<BlurParams>(schedule(DeformationKind::Blur, 5).params).sigma == 8.0);
  CHECK(std::get<CompressionParams>(schedule(DeformationKind::Compression, 1).params).quality ==
        100);
  CHECK(std::get<CompressionParams>(schedule(DeformationKind::Compression, 5).params).quality ==
        75);
  CHECK(std::get<LightParams>(schedule(DeformationKind::Light, 3).params).gain ==
        doctest::Approx(0.650));
  const auto zr5 = std::get<ZoomRotationParams>(schedule(DeformationKind::ZoomRotation, 5).params);
  CHECK(zr5.angle_deg == 45.0);
  CHECK(zr5.scale == 0.5);
  CHECK(std::get<ViewpointParams>(schedule(DeformationKind::Viewpoint, 5).params).tilt_deg ==
        60.0);

  CHECK_THROWS_AS(schedule(DeformationKind::Blur, 0), ParameterError);
  CHECK_THROWS_AS(schedule(DeformationKind::Blur, 6), ParameterError);
}

TEST_CASE("schedules are monotone in severity") {
  double prev_sigma = -1.0, prev_gain = 2.0, prev_angle = -1.0, prev_tilt = -1.0;
  double prev_scale = 2.0;
  int prev_quality = 101;
  for (int level = 1; level <= 5; ++level) {
    const double sigma = std::get<BlurParams>(schedule(DeformationKind::Blur, level).params).sigma;
    const int quality =
        std::get<CompressionParams>(schedule(DeformationKind::Compression, level).params).quality;
    const double gain = std::get<LightParams>(schedule(DeformationKind::Light, level).params).gain;
    const auto zr = std::get<ZoomRotationParams>(schedule(DeformationKind::ZoomRotation, level).params);
    const double tilt =
        std::get<ViewpointParams>(schedule(DeformationKind::Viewpoint, level).params).tilt_deg;
    CHECK(sigma > prev_sigma);
    CHECK(quality < prev_quality);
    CHECK(gain < prev_gain);
    CHECK(zr.angle_deg > prev_angle);
    CHECK(zr.scale < prev_scale);
    CHECK(tilt > prev_tilt);
    prev_sigma = sigma;
    prev_quality = quality;
    prev_gain = gain;
    prev_angle = zr.angle_deg;
    prev_scale = zr.scale;
    prev_tilt = tilt;
  }
}

TEST_CASE("level 1 is the identity for the non-codec kinds") {
  const Image img = test_motif();
  for (DeformationKind kind :
       {DeformationKind::Blur, DeformationKind::Light, DeformationKind::ZoomRotation,
        DeformationKind::Viewpoint}) {
    const DeformedImage out = apply_deformation(img, schedule(kind, 1));
    CHECK(out.image == img);
    CHECK(out.ground_truth == Homography::identity());
  }
}

TEST_CASE("compression level 1 is near-lossless") {
  const Image img = test_motif();
  const DeformedImage out = apply_deformation(img, schedule(DeformationKind::Compression, 1));
  CHECK(out.ground_truth == Homography::identity());
  CHECK(oracles::max_abs_diff(img, out.image) <= 2.0 / 255.0);
}

TEST_CASE("photometric kinds keep the identity ground truth") {
  const Image img = test_motif();
  for (DeformationKind kind :
       {DeformationKind::Blur, DeformationKind::Compression, DeformationKind::Light}) {
    for (int level : {2, 5}) {
      CHECK(apply_deformation(img, schedule(kind, level)).ground_truth ==
            Homography::identity());
    }
  }
}

TEST_CASE("zoom-rotation fixes the image center") {
  Image img(64, 64, 0.0f);
  img.set(32, 32, 1.0f);
  const DeformedImage out = apply_deformation(img, schedule(DeformationKind::ZoomRotation, 5));
  // Rotation and scale about the center keep the center pixel in place.
  double best = 1e9;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      if (out.image.at(x, y) > 0.2f) best = std::min(best, std::hypot(x - 32.0, y - 32.0));
    }
  }
  CHECK(best <= 1.0);
}

TEST_CASE("light deformation multiplies and clamps") {
  const Image img = test_motif();
  const DeformedImage out = apply_deformation(img, schedule(DeformationKind::Light, 5));
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      CHECK(out.image.at(x, y) == doctest::Approx(img.at(x, y) * 0.3f).epsilon(1e-6));
    }
  }
}

TEST_CASE("viewpoint ground-truth homography") {
  SUBCASE("tilt zero is exactly the identity") {
    CHECK(ground_truth_viewpoint(0.0, 800, 355) == Homography::identity());
  }

  SUBCASE("direct evaluation of the projection formula at tilt 60") {
    const int width = 800, height = 356;
    const Homography H = ground_truth_viewpoint(60.0, width, height);
    const double cx = width / 2.0, cy = height / 2.0;
    const double f = 2.0 * width, d = 2.0 * width;
    const double s = std::sin(60.0 * std::numbers::pi / 180.0);
    const double c = std::cos(60.0 * std::numbers::pi / 180.0);
    // Centered point (400, 0): strong foreshortening of the near edge.
    const double expected_x = f * 400.0 * c / (d + 400.0 * s);
    const auto [mx, my] = H.map(cx + 400.0, cy);
    CHECK(mx - cx == doctest::Approx(expected_x).epsilon(1e-9));
    CHECK(my - cy == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(expected_x == doctest::Approx(164.4056).epsilon(1e-4));
  }

  SUBCASE("the four corners follow the formula within 1e-6 px") {
    const int width = 320, height = 200;
    for (double tilt : {15.0, 30.0, 45.0, 60.0}) {
      const Homography H = ground_truth_viewpoint(tilt, width, height);
      const double cx = width / 2.0, cy = height / 2.0;
      const double f = 2.0 * width, d = 2.0 * width;
      const double s = std::sin(tilt * std::numbers::pi / 180.0);
      const double c = std::cos(tilt * std::numbers::pi / 180.0);
      for (double corner_x : {0.0, static_cast<double>(width - 1)}) {
        for (double corner_y : {0.0, static_cast<double>(height - 1)}) {
          const double x = corner_x - cx;
          const double y = corner_y - cy;
          const double denom = d + x * s;
          const double ex = f * x * c / denom + cx;
          const double ey = f * y / denom + cy;
          const auto [mx, my] = H.map(corner_x, corner_y);
          CHECK(std::hypot(mx - ex, my - ey) < 1e-6);
        }
      }
    }
  }

  SUBCASE("tilt outside [0, 90) is rejected") {
    CHECK_THROWS_AS(ground_truth_viewpoint(90.0, 100, 100), ParameterError);
    CHECK_THROWS_AS(ground_truth_viewpoint(-5.0, 100, 100), ParameterError);
  }
}

TEST_CASE("ground truth locates marker dots in the deformed image") {
  Image img(256, 160, 0.0f);
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) img.set(60 + dx, 100 + dy, 1.0f);
  }
  for (DeformationKind kind : {DeformationKind::ZoomRotation, DeformationKind::Viewpoint}) {
    const DeformedImage out = apply_deformation(img, schedule(kind, 3));
    const auto [ex, ey] = out.ground_truth.map(60.0, 100.0);
    // Intensity-weighted centroid of the warped dot.
    double sum = 0.0, sum_x = 0.0, sum_y = 0.0;
    for (int y = 0; y < out.image.height(); ++y) {
      for (int x = 0; x < out.image.width(); ++x) {
        const double v = out.image.at(x, y);
        if (v > 0.2) {
          sum += v;
          sum_x += v * x;
          sum_y += v * y;
        }
      }
    }
    REQUIRE(sum > 0.0);
    CHECK(std::hypot(sum_x / sum - ex, sum_y / sum - ey) <= 1.0);
  }
}

TEST_CASE("apply_deformation is deterministic") {
  const Image img = test_motif();
  for (int level : {2, 4}) {
    for (DeformationKind kind : all_deformation_kinds()) {
      const DeformedImage a = apply_deformation(img, schedule(kind, level));
      const DeformedImage b = apply_deformation(img, schedule(kind, level));
      CHECK(a.image == b.image);
      CHECK(a.ground_truth == b.ground_truth);
    }
  }
}

TEST_CASE("deformation sidecar JSON round trip") {
  const DeformationSpec spec = schedule(DeformationKind::ZoomRotation, 4);
  const Homography H = zoom_rotation_homography(33.75, 0.625, 256, 128);
  const nlohmann::json j = deformation_to_json(spec, H);
  CHECK(j.at("kind") == "Zoom_Rotation");
  CHECK(j.at("level") == 4);
  CHECK(j.at("params").at("angle") == doctest::Approx(33.75));
  CHECK(j.at("H").size() == 9);
  const DeformationSpec parsed = deformation_spec_from_json(j);
  CHECK(parsed == spec);
}

TEST_CASE("kind labels parse back to themselves") {
  for (DeformationKind kind : all_deformation_kinds()) {
    CHECK(parse_kind(kind_label(kind)) == kind);
  }
  CHECK(parse_kind("zoom_rotation") == DeformationKind::ZoomRotation);
  CHECK(parse_kind("BLUR") == DeformationKind::Blur);
  CHECK_THROWS_AS(parse_kind("warp"), ParameterError);
}
