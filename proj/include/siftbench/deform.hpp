#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <variant>

#include "siftbench/image.hpp"

namespace siftbench {

enum class DeformationKind { Blur, Compression, Light, ZoomRotation, Viewpoint };

/// Canonical report label: Blur, Compression, Light, Zoom_Rotation, Viewpoint.
std::string kind_label(DeformationKind kind);
/// Accepts the canonical labels plus lowercase / underscore-free variants.
DeformationKind parse_kind(const std::string& text);
/// All five kinds in schedule order.
const std::vector<DeformationKind>& all_deformation_kinds();

struct BlurParams {
  double sigma = 0.0;
  bool operator==(const BlurParams&) const = default;
};
struct CompressionParams {
  int quality = 100;
  bool operator==(const CompressionParams&) const = default;
};
struct LightParams {
  double gain = 1.0;
  bool operator==(const LightParams&) const = default;
};
struct ZoomRotationParams {
  double angle_deg = 0.0;
  double scale = 1.0;
  bool operator==(const ZoomRotationParams&) const = default;
};
struct ViewpointParams {
  double tilt_deg = 0.0;
  bool operator==(const ViewpointParams&) const = default;
};

using DeformationParams = std::variant<BlurParams, CompressionParams, LightParams,
                                       ZoomRotationParams, ViewpointParams>;

/// A deformation kind with its level (1..5, level 1 == zero deformation)
/// resolved to concrete parameters.
struct DeformationSpec {
  DeformationKind kind = DeformationKind::Blur;
  int level = 1;
  DeformationParams params;

  bool operator==(const DeformationSpec&) const = default;
};

/// Fixed five-level schedule per kind; intermediate levels interpolate the
/// endpoint values linearly. Throws ParameterError for level outside 1..5.
///
///   Blur sigma:            0.0, 2.0, 4.0, 6.0, 8.0
///   Compression quality:   100, 94, 88, 81, 75
///   Light gain:            1.000, 0.825, 0.650, 0.475, 0.300
///   ZoomRotation:          (0deg, 1.0) ... (45deg, 0.5)
///   Viewpoint tilt:        0, 15, 30, 45, 60 degrees
DeformationSpec schedule(DeformationKind kind, int level);

/// Deformed image plus the exact ground-truth homography (identity for the
/// photometric kinds).
struct DeformedImage {
  Image image;
  Homography ground_truth;
  DeformationSpec spec;
};

DeformedImage apply_deformation(const Image& img, const DeformationSpec& spec);

/// Pinhole view of the image plane rotated by tilt about its central
/// vertical axis, with camera distance d and focal length f both 2*width:
/// a centered point (x, y) maps to
/// (f*x*cos(tilt)/(d + x*sin(tilt)), f*y/(d + x*sin(tilt))).
/// Throws ParameterError for tilt outside [0, 90).
Homography ground_truth_viewpoint(double tilt_deg, int width, int height);

/// Sidecar {"kind","level","params","H":[9]}.
nlohmann::json deformation_to_json(const DeformationSpec& spec, const Homography& H);
DeformationSpec deformation_spec_from_json(const nlohmann::json& j);

}  // namespace siftbench
