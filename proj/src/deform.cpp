#include "siftbench/deform.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>
#include <vector>

#include "siftbench/error.hpp"
#include "siftbench/image_io.hpp"

namespace siftbench {

namespace {

constexpr std::array<double, 5> kBlurSigma{0.0, 2.0, 4.0, 6.0, 8.0};
constexpr std::array<int, 5> kCompressionQuality{100, 94, 88, 81, 75};
constexpr std::array<double, 5> kLightGain{1.000, 0.825, 0.650, 0.475, 0.300};
constexpr std::array<double, 5> kRotationAngle{0.0, 11.25, 22.5, 33.75, 45.0};
constexpr std::array<double, 5> kRotationScale{1.0, 0.875, 0.75, 0.625, 0.5};
constexpr std::array<double, 5> kViewpointTilt{0.0, 15.0, 30.0, 45.0, 60.0};

std::string normalize_token(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '_' || c == '-' || c == ' ' || c == '+') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::string kind_label(DeformationKind kind) {
  switch (kind) {
    case DeformationKind::Blur: return "Blur";
    case DeformationKind::Compression: return "Compression";
    case DeformationKind::Light: return "Light";
    case DeformationKind::ZoomRotation: return "Zoom_Rotation";
    case DeformationKind::Viewpoint: return "Viewpoint";
  }
  throw ParameterError("unknown deformation kind");
}

DeformationKind parse_kind(const std::string& text) {
  const std::string t = normalize_token(text);
  if (t == "blur") return DeformationKind::Blur;
  if (t == "compression" || t == "jpeg") return DeformationKind::Compression;
  if (t == "light" || t == "illumination") return DeformationKind::Light;
  if (t == "zoomrotation" || t == "zoomandrotation") return DeformationKind::ZoomRotation;
  if (t == "viewpoint") return DeformationKind::Viewpoint;
  throw ParameterError("unknown deformation kind '" + text + "'");
}

const std::vector<DeformationKind>& all_deformation_kinds() {
  static const std::vector<DeformationKind> kinds{
      DeformationKind::Blur, DeformationKind::Compression, DeformationKind::Light,
      DeformationKind::ZoomRotation, DeformationKind::Viewpoint};
  return kinds;
}

DeformationSpec schedule(DeformationKind kind, int level) {
  if (level < 1 || level > 5) {
    throw ParameterError("deformation level must be in 1..5");
  }
  const int i = level - 1;
  DeformationSpec spec;
  spec.kind = kind;
  spec.level = level;
  switch (kind) {
    case DeformationKind::Blur:
      spec.params = BlurParams{kBlurSigma[i]};
      break;
    case DeformationKind::Compression:
      spec.params = CompressionParams{kCompressionQuality[i]};
      break;
    case DeformationKind::Light:
      spec.params = LightParams{kLightGain[i]};
      break;
    case DeformationKind::ZoomRotation:
      spec.params = ZoomRotationParams{kRotationAngle[i], kRotationScale[i]};
      break;
    case DeformationKind::Viewpoint:
      spec.params = ViewpointParams{kViewpointTilt[i]};
      break;
  }
  return spec;
}

Homography ground_truth_viewpoint(double tilt_deg, int width, int height) {
  if (tilt_deg < 0.0 || tilt_deg >= 90.0) {
    throw ParameterError("viewpoint tilt must be in [0, 90) degrees");
  }
  const double rad = tilt_deg * std::numbers::pi / 180.0;
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  const double f = 2.0 * width;
  const double d = 2.0 * width;
  const double cx = width / 2.0;
  const double cy = height / 2.0;

  // In centered coordinates the mapping is exactly projective:
  //   (x, y, 1) -> (f*c*x, f*y, s*x + d).
  const Homography centered = Homography::from_array({f * c, 0.0, 0.0,
                                                      0.0, f, 0.0,
                                                      s, 0.0, d});
  const Homography to_centered =
      Homography::from_array({1.0, 0.0, -cx, 0.0, 1.0, -cy, 0.0, 0.0, 1.0});
  const Homography from_centered =
      Homography::from_array({1.0, 0.0, cx, 0.0, 1.0, cy, 0.0, 0.0, 1.0});
  return from_centered * centered * to_centered;
}

DeformedImage apply_deformation(const Image& img, const DeformationSpec& spec) {
  if (spec.level < 1 || spec.level > 5) {
    throw ParameterError("deformation level must be in 1..5");
  }
  if (std::min(img.width(), img.height()) < 16) {
    throw SizeError("apply_deformation: image must be at least 16 px in each dimension");
  }

  DeformedImage out;
  out.spec = spec;
  out.ground_truth = Homography::identity();

  if (const auto* blur = std::get_if<BlurParams>(&spec.params)) {
    out.image = gaussian_blur(img, blur->sigma);
  } else if (const auto* comp = std::get_if<CompressionParams>(&spec.params)) {
    out.image = jpeg_roundtrip(img, comp->quality);
  } else if (const auto* light = std::get_if<LightParams>(&spec.params)) {
    Image result(img.width(), img.height());
    const float gain = static_cast<float>(light->gain);
    for (int y = 0; y < img.height(); ++y) {
      const float* src = img.row(y);
      float* dst = result.row(y);
      for (int x = 0; x < img.width(); ++x) {
        dst[x] = std::clamp(src[x] * gain, 0.0f, 1.0f);
      }
    }
    out.image = std::move(result);
  } else if (const auto* zr = std::get_if<ZoomRotationParams>(&spec.params)) {
    out.ground_truth =
        zoom_rotation_homography(zr->angle_deg, zr->scale, img.width(), img.height());
    out.image = warp_homography(img, out.ground_truth);
  } else if (const auto* vp = std::get_if<ViewpointParams>(&spec.params)) {
    out.ground_truth = ground_truth_viewpoint(vp->tilt_deg, img.width(), img.height());
    out.image = warp_homography(img, out.ground_truth);
  } else {
    throw ParameterError("deformation spec has no parameters");
  }
  return out;
}

nlohmann::json deformation_to_json(const DeformationSpec& spec, const Homography& H) {
  nlohmann::json params;
  if (const auto* blur = std::get_if<BlurParams>(&spec.params)) {
    params = {{"sigma", blur->sigma}};
  } else if (const auto* comp = std::get_if<CompressionParams>(&spec.params)) {
    params = {{"quality", comp->quality}};
  } else if (const auto* light = std::get_if<LightParams>(&spec.params)) {
    params = {{"gain", light->gain}};
  } else if (const auto* zr = std::get_if<ZoomRotationParams>(&spec.params)) {
    params = {{"angle", zr->angle_deg}, {"scale", zr->scale}};
  } else if (const auto* vp = std::get_if<ViewpointParams>(&spec.params)) {
    params = {{"tilt", vp->tilt_deg}};
  }
  return nlohmann::json{{"kind", kind_label(spec.kind)},
                        {"level", spec.level},
                        {"params", std::move(params)},
                        {"H", H.h}};
}

DeformationSpec deformation_spec_from_json(const nlohmann::json& j) {
  const DeformationKind kind = parse_kind(j.at("kind").get<std::string>());
  const int level = j.at("level").get<int>();
  DeformationSpec spec = schedule(kind, level);
  if (j.contains("params")) {
    const auto& params = j.at("params");
    switch (kind) {
      case DeformationKind::Blur:
        spec.params = BlurParams{params.value("sigma", std::get<BlurParams>(spec.params).sigma)};
        break;
      case DeformationKind::Compression:
        spec.params = CompressionParams{
            params.value("quality", std::get<CompressionParams>(spec.params).quality)};
        break;
      case DeformationKind::Light:
        spec.params = LightParams{params.value("gain", std::get<LightParams>(spec.params).gain)};
        break;
      case DeformationKind::ZoomRotation: {
        const auto& cur = std::get<ZoomRotationParams>(spec.params);
        spec.params = ZoomRotationParams{params.value("angle", cur.angle_deg),
                                         params.value("scale", cur.scale)};
        break;
      }
      case DeformationKind::Viewpoint:
        spec.params = ViewpointParams{
            params.value("tilt", std::get<ViewpointParams>(spec.params).tilt_deg)};
        break;
    }
  }
  return spec;
}

}  // namespace siftbench
