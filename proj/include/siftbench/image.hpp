#pragma once

#include <array>
#include <cassert>
#include <span>
#include <utility>
#include <vector>

namespace siftbench {

/// Owned grid of grayscale luminance samples in [0, 1], row-major.
///
/// All pixel-producing operations clamp on write, so a constructed Image
/// always satisfies the range invariant. Coordinates follow the pixel-center
/// convention: sample (x, y) sits at continuous position (x, y), with
/// x in [0, width) and y in [0, height).
class Image {
 public:
  Image() = default;

  Image(int width, int height, float fill = 0.0f);

  /// Takes ownership of a sample buffer; throws DimensionError if the
  /// buffer length does not equal width * height. Samples are clamped.
  static Image from_samples(int width, int height, std::vector<float> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return samples_.empty(); }

  float at(int x, int y) const {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_);
    return samples_[static_cast<size_t>(y) * width_ + x];
  }

  /// Edge-clamped read; any integer coordinate is valid.
  float at_clamped(int x, int y) const;

  /// Bilinear sample at a continuous position; coordinates are clamped to
  /// the border (edge-extend).
  float sample_bilinear(double x, double y) const;

  /// Clamps v into [0, 1] before storing.
  void set(int x, int y, float v);

  std::span<const float> samples() const { return samples_; }
  const float* row(int y) const { return samples_.data() + static_cast<size_t>(y) * width_; }
  float* row(int y) { return samples_.data() + static_cast<size_t>(y) * width_; }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> samples_;
};

/// Invertible 3x3 projective transform, row-major, normalized so that
/// h[8] == 1 whenever that is finite.
struct Homography {
  std::array<double, 9> h{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Homography identity() { return Homography{}; }

  /// Validates invertibility (|det| > 1e-12) and normalizes; throws
  /// GeometryError on a singular matrix.
  static Homography from_array(const std::array<double, 9>& coeffs);

  double determinant() const;

  Homography inverse() const;

  /// Composition: (*this) * other, i.e. other is applied first.
  Homography operator*(const Homography& other) const;

  /// Maps an image-plane point. The caller is responsible for handling
  /// points near the line at infinity (w ~ 0 yields non-finite output).
  std::pair<double, double> map(double x, double y) const {
    const double w = h[6] * x + h[7] * y + h[8];
    return {(h[0] * x + h[1] * y + h[2]) / w, (h[3] * x + h[4] * y + h[5]) / w};
  }

  bool operator==(const Homography&) const = default;
};

/// Rec.601 luminance from per-channel grids; all three must share dimensions.
Image to_grayscale(const Image& r, const Image& g, const Image& b);

/// Bilinear resize under the pixel-center convention
/// (source coordinate = (i + 0.5) * scale - 0.5, clamped to borders).
Image resize_bilinear(const Image& img, int new_width, int new_height);

/// Separable Gaussian blur; 1-D kernel truncated at ceil(3*sigma) taps each
/// side and renormalized to sum 1, borders edge-clamped. sigma == 0 returns
/// the input unchanged.
Image gaussian_blur(const Image& img, double sigma);

/// Inverse-maps every output pixel through H and samples the source
/// bilinearly; samples falling outside the source map to 0 (black).
/// Output dimensions equal input dimensions.
Image warp_homography(const Image& img, const Homography& H);

/// Rotation by angle_deg (counter-clockwise in image coordinates) and
/// uniform scale about the image center (width/2, height/2).
Homography zoom_rotation_homography(double angle_deg, double scale,
                                    int width, int height);

}  // namespace siftbench
