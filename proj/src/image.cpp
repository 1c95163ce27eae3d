#include "siftbench/image.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "siftbench/error.hpp"

namespace siftbench {

namespace {

inline float clamp01(float v) { return std::clamp(v, 0.0f, 1.0f); }

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    const double v = std::exp(-(static_cast<double>(t) * t) / (2.0 * sigma * sigma));
    kernel[t + radius] = v;
    sum += v;
  }
  for (double& v : kernel) v /= sum;
  return kernel;
}

}  // namespace

Image::Image(int width, int height, float fill) {
  if (width < 1 || height < 1) {
    throw DimensionError("image dimensions must be at least 1x1");
  }
  width_ = width;
  height_ = height;
  samples_.assign(static_cast<size_t>(width) * height, clamp01(fill));
}

Image Image::from_samples(int width, int height, std::vector<float> samples) {
  if (width < 1 || height < 1) {
    throw DimensionError("image dimensions must be at least 1x1");
  }
  if (samples.size() != static_cast<size_t>(width) * height) {
    throw DimensionError("sample buffer length does not match width * height");
  }
  Image img;
  img.width_ = width;
  img.height_ = height;
  img.samples_ = std::move(samples);
  for (float& v : img.samples_) v = clamp01(v);
  return img;
}

float Image::at_clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return at(x, y);
}

float Image::sample_bilinear(double x, double y) const {
  x = std::clamp(x, 0.0, static_cast<double>(width_ - 1));
  y = std::clamp(y, 0.0, static_cast<double>(height_ - 1));
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, width_ - 1);
  const int y1 = std::min(y0 + 1, height_ - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
  const double bottom = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
  return static_cast<float>(top * (1.0 - fy) + bottom * fy);
}

void Image::set(int x, int y, float v) {
  assert(x >= 0 && x < width_ && y >= 0 && y < height_);
  samples_[static_cast<size_t>(y) * width_ + x] = clamp01(v);
}

Homography Homography::from_array(const std::array<double, 9>& coeffs) {
  Homography H;
  H.h = coeffs;
  if (std::abs(H.determinant()) <= 1e-12) {
    throw GeometryError("homography matrix is singular");
  }
  if (std::abs(H.h[8]) > 1e-12) {
    const double s = H.h[8];
    for (double& v : H.h) v /= s;
  }
  return H;
}

double Homography::determinant() const {
  return h[0] * (h[4] * h[8] - h[5] * h[7]) -
         h[1] * (h[3] * h[8] - h[5] * h[6]) +
         h[2] * (h[3] * h[7] - h[4] * h[6]);
}

Homography Homography::inverse() const {
  Eigen::Matrix3d m;
  m << h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], h[8];
  if (std::abs(m.determinant()) <= 1e-12) {
    throw GeometryError("cannot invert a singular homography");
  }
  const Eigen::Matrix3d inv = m.inverse();
  return from_array({inv(0, 0), inv(0, 1), inv(0, 2), inv(1, 0), inv(1, 1),
                     inv(1, 2), inv(2, 0), inv(2, 1), inv(2, 2)});
}

Homography Homography::operator*(const Homography& other) const {
  Eigen::Matrix3d a, b;
  a << h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], h[8];
  b << other.h[0], other.h[1], other.h[2], other.h[3], other.h[4], other.h[5],
      other.h[6], other.h[7], other.h[8];
  const Eigen::Matrix3d c = a * b;
  return from_array({c(0, 0), c(0, 1), c(0, 2), c(1, 0), c(1, 1), c(1, 2),
                     c(2, 0), c(2, 1), c(2, 2)});
}

Image to_grayscale(const Image& r, const Image& g, const Image& b) {
  if (r.width() != g.width() || r.width() != b.width() ||
      r.height() != g.height() || r.height() != b.height()) {
    throw DimensionError("channel grids must share dimensions");
  }
  Image out(r.width(), r.height());
  for (int y = 0; y < r.height(); ++y) {
    const float* pr = r.row(y);
    const float* pg = g.row(y);
    const float* pb = b.row(y);
    float* po = out.row(y);
    for (int x = 0; x < r.width(); ++x) {
      po[x] = clamp01(0.299f * pr[x] + 0.587f * pg[x] + 0.114f * pb[x]);
    }
  }
  return out;
}

Image resize_bilinear(const Image& img, int new_width, int new_height) {
  if (new_width < 1 || new_height < 1) {
    throw DimensionError("resize target dimensions must be at least 1x1");
  }
  if (new_width == img.width() && new_height == img.height()) {
    return img;
  }
  Image out(new_width, new_height);
  const double sx = static_cast<double>(img.width()) / new_width;
  const double sy = static_cast<double>(img.height()) / new_height;
  for (int y = 0; y < new_height; ++y) {
    const double src_y = (y + 0.5) * sy - 0.5;
    float* po = out.row(y);
    for (int x = 0; x < new_width; ++x) {
      const double src_x = (x + 0.5) * sx - 0.5;
      po[x] = clamp01(img.sample_bilinear(src_x, src_y));
    }
  }
  return out;
}

Image gaussian_blur(const Image& img, double sigma) {
  if (sigma < 0.0) {
    throw ParameterError("gaussian_blur: sigma must be non-negative");
  }
  if (sigma == 0.0) {
    return img;
  }
  const std::vector<double> kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int w = img.width();
  const int h = img.height();

  // Horizontal pass into a double plane, vertical pass back to float; the
  // single final rounding keeps constant images exact.
  std::vector<double> tmp(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    const float* src = img.row(y);
    double* dst = tmp.data() + static_cast<size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      if (x >= radius && x + radius < w) {
        for (int t = -radius; t <= radius; ++t) acc += kernel[t + radius] * src[x + t];
      } else {
        for (int t = -radius; t <= radius; ++t) {
          acc += kernel[t + radius] * src[std::clamp(x + t, 0, w - 1)];
        }
      }
      dst[x] = acc;
    }
  }

  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    float* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      if (y >= radius && y + radius < h) {
        for (int t = -radius; t <= radius; ++t) {
          acc += kernel[t + radius] * tmp[static_cast<size_t>(y + t) * w + x];
        }
      } else {
        for (int t = -radius; t <= radius; ++t) {
          const int yy = std::clamp(y + t, 0, h - 1);
          acc += kernel[t + radius] * tmp[static_cast<size_t>(yy) * w + x];
        }
      }
      dst[x] = clamp01(static_cast<float>(acc));
    }
  }
  return out;
}

Image warp_homography(const Image& img, const Homography& H) {
  const Homography inv = H.inverse();
  const int w = img.width();
  const int h = img.height();
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    float* po = out.row(y);
    for (int x = 0; x < w; ++x) {
      const double denom = inv.h[6] * x + inv.h[7] * y + inv.h[8];
      if (std::abs(denom) < 1e-12) {
        continue;
      }
      const double sx = (inv.h[0] * x + inv.h[1] * y + inv.h[2]) / denom;
      const double sy = (inv.h[3] * x + inv.h[4] * y + inv.h[5]) / denom;
      // A tiny collar keeps samples that sit exactly on the border from
      // flipping to black under floating-point noise in the inverse map.
      constexpr double kBorder = 1e-6;
      if (sx < -kBorder || sx > w - 1 + kBorder || sy < -kBorder || sy > h - 1 + kBorder) {
        continue;  // outside the source: black
      }
      po[x] = clamp01(img.sample_bilinear(sx, sy));
    }
  }
  return out;
}

Homography zoom_rotation_homography(double angle_deg, double scale,
                                    int width, int height) {
  if (scale <= 0.0) {
    throw ParameterError("zoom_rotation_homography: scale must be positive");
  }
  const double rad = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(rad) * scale;
  const double s = std::sin(rad) * scale;
  const double cx = width / 2.0;
  const double cy = height / 2.0;
  // T(center) * R(angle) * S(scale) * T(-center), written out.
  return Homography::from_array({c, -s, cx - c * cx + s * cy,
                                 s, c, cy - s * cx - c * cy,
                                 0.0, 0.0, 1.0});
}

}  // namespace siftbench
