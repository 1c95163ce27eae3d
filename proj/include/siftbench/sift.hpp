#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <vector>

#include "siftbench/image.hpp"

namespace siftbench {

/// Parameters of the Lowe-style SIFT pipeline. Defaults follow the standard
/// parameterization: sigma0 = 1.6 over 3 intervals per octave with 2x
/// upsampling, contrast threshold 0.03 on [0,1] pixels, edge ratio 10, and
/// the 4x4x8 descriptor clipped at 0.2.
struct SiftParams {
  int intervals_per_octave = 3;
  double base_sigma = 1.6;
  double assumed_camera_sigma = 0.5;
  bool upsample_first_octave = true;
  double contrast_threshold = 0.03;
  double edge_ratio_threshold = 10.0;
  int orientation_bins = 36;
  double orientation_peak_ratio = 0.8;
  int descriptor_grid_width = 4;
  int descriptor_orientation_bins = 8;
  double descriptor_clip = 0.2;
  int max_refine_iterations = 5;

  int descriptor_length() const {
    return descriptor_grid_width * descriptor_grid_width * descriptor_orientation_bins;
  }

  /// Throws ParameterError when a field is outside its documented domain.
  void validate() const;

  bool operator==(const SiftParams&) const = default;
};

/// Signed-value plane; holds DoG layers and gradient fields, which are not
/// confined to [0, 1] like Image samples.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<float> v;

  Plane() = default;
  Plane(int w, int h) : width(w), height(h), v(static_cast<size_t>(w) * h, 0.0f) {}
  float at(int x, int y) const { return v[static_cast<size_t>(y) * width + x]; }
  float& at(int x, int y) { return v[static_cast<size_t>(y) * width + x]; }
};

/// Gaussian scale space plus per-octave DoG layers and gradient fields.
///
/// Octave index o runs from first_octave (-1 when the base is upsampled 2x);
/// layer i of octave o has absolute scale base_sigma * 2^(o + i/S) in
/// original-image pixels, with S = intervals_per_octave. Octave pixels are
/// 2^o original pixels wide.
struct ScaleSpace {
  struct Octave {
    std::vector<Image> gaussians;       // S + 3 layers
    std::vector<Plane> dog;             // S + 2 adjacent differences
    std::vector<Plane> gradient_mag;    // per gaussian layer
    std::vector<Plane> gradient_ori;    // per gaussian layer, radians in [0, 2pi)
    std::vector<double> sigmas;         // absolute, original-image pixels
    double pixel_scale = 1.0;           // original pixels per octave pixel (2^o)
  };

  int first_octave = 0;
  int width = 0;   // original image width
  int height = 0;  // original image height
  std::vector<Octave> octaves;

  /// Original-image coordinate of octave-pixel coordinate u. Exact under the
  /// pixel-center convention, including the quarter-pixel offset of the
  /// upsampled base.
  double to_original(double u, int octave_pos) const;
  /// Inverse of to_original.
  double to_octave(double x, int octave_pos) const;
};

/// Detected interest point. Coordinates, sigma in original-image pixels;
/// octave may be -1 for the upsampled base. orientation is radians in
/// [0, 2pi), 0 until assigned.
struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double sigma = 0.0;
  double orientation = 0.0;
  float response = 0.0f;  // signed DoG value at the refined extremum
  int octave = 0;
  int layer = 0;

  bool operator==(const Keypoint&) const = default;
};

/// Keypoint plus its unit-norm gradient-histogram descriptor
/// (128 components at default parameters).
struct Feature {
  Keypoint keypoint;
  std::vector<float> descriptor;

  bool operator==(const Feature&) const = default;
};

/// Intermediate descriptor vectors, exposed so tests can check the
/// normalize-clip-renormalize contract.
struct DescriptorStages {
  std::vector<float> raw;      // accumulated histogram
  std::vector<float> clipped;  // after L2 normalization and clipping
  std::vector<float> final;    // after renormalization
};

/// Builds the Gaussian/DoG pyramid; octaves are generated until the next
/// base would fall below 16 px minimum dimension. Throws SizeError when
/// min(width, height) < 16.
ScaleSpace build_scale_space(const Image& img, const SiftParams& p);

/// 26-neighbor DoG extrema with iterative subpixel refinement, contrast and
/// edge-ratio rejection. Returned keypoints carry no orientation yet.
std::vector<Keypoint> detect_keypoints(const ScaleSpace& ss, const SiftParams& p);

/// Gradient-orientation histogram peaks around kp; the global peak and every
/// local peak >= orientation_peak_ratio of it each yield an oriented copy.
std::vector<Keypoint> assign_orientations(const Keypoint& kp, const ScaleSpace& ss,
                                          const SiftParams& p);

/// 4x4 x 8-bin gradient histogram descriptor over a window rotated by
/// kp.orientation and scaled by kp.sigma; trilinear binning, Gaussian
/// weighting, L2-normalize / clip / renormalize. Returns nullopt when the
/// sample window contributes nothing (window entirely outside the image).
std::optional<Feature> compute_descriptor(const Keypoint& kp, const ScaleSpace& ss,
                                          const SiftParams& p);

/// Same computation with the intermediate vectors kept.
std::optional<DescriptorStages> compute_descriptor_stages(const Keypoint& kp,
                                                          const ScaleSpace& ss,
                                                          const SiftParams& p);

/// Full pipeline: scale space, detection, orientation, description. Output
/// is sorted by (octave, layer, y, x, orientation) and deterministic.
std::vector<Feature> extract_features(const Image& img, const SiftParams& p = {});

/// { "params": {...}, "features": [ {x, y, sigma, orientation, response,
/// descriptor[]} ] }
nlohmann::json features_to_json(const std::vector<Feature>& features,
                                const SiftParams& p);
std::vector<Feature> features_from_json(const nlohmann::json& j,
                                        SiftParams* params_out = nullptr);

nlohmann::json sift_params_to_json(const SiftParams& p);
SiftParams sift_params_from_json(const nlohmann::json& j);

}  // namespace siftbench
