#include "siftbench/sift.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>
#include <tuple>

#include "siftbench/error.hpp"

namespace siftbench {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

// Next octave base: every second pixel of the layer whose relative blur is
// 2 * base_sigma.
Image decimate(const Image& img) {
  const int w = img.width() / 2;
  const int h = img.height() / 2;
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    const float* src = img.row(2 * y);
    float* dst = out.row(y);
    for (int x = 0; x < w; ++x) dst[x] = src[2 * x];
  }
  return out;
}

void compute_gradients(const Image& img, Plane& mag, Plane& ori) {
  const int w = img.width();
  const int h = img.height();
  mag = Plane(w, h);
  ori = Plane(w, h);
  for (int y = 1; y < h - 1; ++y) {
    const float* above = img.row(y - 1);
    const float* cur = img.row(y);
    const float* below = img.row(y + 1);
    float* pm = &mag.at(0, y);
    float* po = &ori.at(0, y);
    for (int x = 1; x < w - 1; ++x) {
      const float gx = 0.5f * (cur[x + 1] - cur[x - 1]);
      const float gy = 0.5f * (below[x] - above[x]);
      pm[x] = std::sqrt(gx * gx + gy * gy);
      po[x] = static_cast<float>(wrap_angle(std::atan2(gy, gx)));
    }
  }
}

struct RefineResult {
  int x, y, layer;
  double dx, dy, ds;
  double value;  // interpolated DoG value
};

// Quadratic fit around the sampled extremum; re-anchors and retries when the
// offset leaves the center cell. Returns nullopt for divergent or
// out-of-bounds candidates.
std::optional<RefineResult> refine_extremum(const ScaleSpace::Octave& oct, int layer,
                                            int x, int y, int max_iterations,
                                            int max_layer) {
  const int w = oct.dog[0].width;
  const int h = oct.dog[0].height;
  for (int iter = 0; iter < max_iterations; ++iter) {
    const Plane& lo = oct.dog[layer - 1];
    const Plane& cur = oct.dog[layer];
    const Plane& hi = oct.dog[layer + 1];
    const double v = cur.at(x, y);

    Eigen::Vector3d g;
    g << 0.5 * (cur.at(x + 1, y) - cur.at(x - 1, y)),
        0.5 * (cur.at(x, y + 1) - cur.at(x, y - 1)),
        0.5 * (hi.at(x, y) - lo.at(x, y));

    const double dxx = cur.at(x + 1, y) + cur.at(x - 1, y) - 2.0 * v;
    const double dyy = cur.at(x, y + 1) + cur.at(x, y - 1) - 2.0 * v;
    const double dss = hi.at(x, y) + lo.at(x, y) - 2.0 * v;
    const double dxy = 0.25 * (cur.at(x + 1, y + 1) - cur.at(x - 1, y + 1) -
                               cur.at(x + 1, y - 1) + cur.at(x - 1, y - 1));
    const double dxs = 0.25 * (hi.at(x + 1, y) - hi.at(x - 1, y) -
                               lo.at(x + 1, y) + lo.at(x - 1, y));
    const double dys = 0.25 * (hi.at(x, y + 1) - hi.at(x, y - 1) -
                               lo.at(x, y + 1) + lo.at(x, y - 1));

    Eigen::Matrix3d hess;
    hess << dxx, dxy, dxs, dxy, dyy, dys, dxs, dys, dss;
    if (std::abs(hess.determinant()) < 1e-20) {
      return std::nullopt;
    }
    const Eigen::Vector3d delta = hess.inverse() * (-g);

    if (std::abs(delta[0]) <= 0.5 && std::abs(delta[1]) <= 0.5 &&
        std::abs(delta[2]) <= 0.5) {
      return RefineResult{x, y, layer, delta[0], delta[1], delta[2],
                          v + 0.5 * g.dot(delta)};
    }
    x += delta[0] > 0.5 ? 1 : (delta[0] < -0.5 ? -1 : 0);
    y += delta[1] > 0.5 ? 1 : (delta[1] < -0.5 ? -1 : 0);
    layer += delta[2] > 0.5 ? 1 : (delta[2] < -0.5 ? -1 : 0);
    if (x < 1 || x > w - 2 || y < 1 || y > h - 2 || layer < 1 || layer > max_layer) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

bool passes_edge_test(const Plane& dog, int x, int y, double edge_ratio) {
  const double v = dog.at(x, y);
  const double dxx = dog.at(x + 1, y) + dog.at(x - 1, y) - 2.0 * v;
  const double dyy = dog.at(x, y + 1) + dog.at(x, y - 1) - 2.0 * v;
  const double dxy = 0.25 * (dog.at(x + 1, y + 1) - dog.at(x - 1, y + 1) -
                             dog.at(x + 1, y - 1) + dog.at(x - 1, y - 1));
  const double tr = dxx + dyy;
  const double det = dxx * dyy - dxy * dxy;
  if (det <= 0.0) return false;
  const double r = edge_ratio;
  return tr * tr * r < det * (r + 1.0) * (r + 1.0);
}

// Gaussian layer whose blur is nearest the keypoint's refined scale.
int nearest_layer(const SiftParams& p, double sigma_rel) {
  const double layer_f =
      p.intervals_per_octave * std::log2(std::max(sigma_rel, 1e-9) / p.base_sigma);
  const int max_layer = p.intervals_per_octave + 2;
  return std::clamp(static_cast<int>(std::lround(layer_f)), 0, max_layer);
}

struct OctaveFrame {
  const ScaleSpace::Octave* octave;
  int octave_pos;
  int layer;
  double u, v;       // keypoint center in octave pixels
  double sigma_rel;  // keypoint scale in octave pixels
};

OctaveFrame locate(const Keypoint& kp, const ScaleSpace& ss, const SiftParams& p) {
  const int octave_pos = kp.octave - ss.first_octave;
  if (octave_pos < 0 || octave_pos >= static_cast<int>(ss.octaves.size())) {
    throw ParameterError("keypoint octave index outside the scale space");
  }
  const ScaleSpace::Octave& oct = ss.octaves[octave_pos];
  OctaveFrame f{&oct, octave_pos, 0, 0.0, 0.0, kp.sigma / oct.pixel_scale};
  f.layer = nearest_layer(p, f.sigma_rel);
  f.u = ss.to_octave(kp.x, octave_pos);
  f.v = ss.to_octave(kp.y, octave_pos);
  return f;
}

bool descriptor_impl(const Keypoint& kp, const ScaleSpace& ss, const SiftParams& p,
                     std::vector<float>* final_out, DescriptorStages* stages_out) {
  const OctaveFrame f = locate(kp, ss, p);
  const Plane& mag = f.octave->gradient_mag[f.layer];
  const Plane& ori = f.octave->gradient_ori[f.layer];
  const int w = mag.width;
  const int h = mag.height;

  const int d = p.descriptor_grid_width;
  const int nb = p.descriptor_orientation_bins;
  const int len = p.descriptor_length();
  const double window_unit = 3.0 * f.sigma_rel;  // one descriptor cell in pixels
  const double radius = window_unit * (d + 1) * 0.5 * std::numbers::sqrt2;
  const double half_grid = 0.5 * d - 0.5;
  const double weight_denom = 0.5 * d * d;  // 2 * (d/2)^2
  const double cos_t = std::cos(kp.orientation);
  const double sin_t = std::sin(kp.orientation);
  const double ori_scale = nb / kTwoPi;

  const int x_lo = std::max(1, static_cast<int>(std::ceil(f.u - radius)));
  const int x_hi = std::min(w - 2, static_cast<int>(std::floor(f.u + radius)));
  const int y_lo = std::max(1, static_cast<int>(std::ceil(f.v - radius)));
  const int y_hi = std::min(h - 2, static_cast<int>(std::floor(f.v + radius)));
  if (x_lo > x_hi || y_lo > y_hi) {
    return false;  // window entirely outside the image
  }

  std::vector<double> hist(static_cast<size_t>(len), 0.0);
  bool touched = false;
  for (int iy = y_lo; iy <= y_hi; ++iy) {
    const double dy = iy - f.v;
    for (int ix = x_lo; ix <= x_hi; ++ix) {
      const double dx = ix - f.u;
      const double rx = (cos_t * dx + sin_t * dy) / window_unit;
      const double ry = (-sin_t * dx + cos_t * dy) / window_unit;
      const double cbin = rx + half_grid;
      const double rbin = ry + half_grid;
      if (rbin <= -1.0 || rbin >= d || cbin <= -1.0 || cbin >= d) continue;
      const float m = mag.at(ix, iy);
      if (m <= 0.0f) continue;
      const double phi = wrap_angle(ori.at(ix, iy) - kp.orientation);
      double obin = phi * ori_scale;
      if (obin >= nb) obin -= nb;
      const double weight = std::exp(-(rx * rx + ry * ry) / weight_denom);

      const int r0 = static_cast<int>(std::floor(rbin));
      const int c0 = static_cast<int>(std::floor(cbin));
      const int o0 = static_cast<int>(obin);
      const double fr = rbin - r0;
      const double fc = cbin - c0;
      const double fo = obin - o0;
      const double contrib = m * weight;
      for (int dr = 0; dr < 2; ++dr) {
        const int r = r0 + dr;
        if (r < 0 || r >= d) continue;
        const double wr = contrib * (dr ? fr : 1.0 - fr);
        for (int dc = 0; dc < 2; ++dc) {
          const int c = c0 + dc;
          if (c < 0 || c >= d) continue;
          const double wc = wr * (dc ? fc : 1.0 - fc);
          for (int dob = 0; dob < 2; ++dob) {
            const int o = (o0 + dob) % nb;
            hist[static_cast<size_t>((r * d + c) * nb + o)] += wc * (dob ? fo : 1.0 - fo);
          }
        }
      }
      touched = true;
    }
  }
  if (!touched) return false;

  double norm_sq = 0.0;
  for (double v : hist) norm_sq += v * v;
  const double norm = std::sqrt(norm_sq);
  if (norm < 1e-12) return false;

  std::vector<double> clipped(hist.size());
  double norm2_sq = 0.0;
  for (size_t i = 0; i < hist.size(); ++i) {
    clipped[i] = std::min(hist[i] / norm, p.descriptor_clip);
    norm2_sq += clipped[i] * clipped[i];
  }
  const double norm2 = std::sqrt(norm2_sq);
  if (norm2 < 1e-12) return false;

  if (stages_out) {
    stages_out->raw.assign(hist.begin(), hist.end());
    stages_out->clipped.assign(clipped.begin(), clipped.end());
    stages_out->final.resize(hist.size());
    for (size_t i = 0; i < hist.size(); ++i) {
      stages_out->final[i] = static_cast<float>(clipped[i] / norm2);
    }
  }
  if (final_out) {
    final_out->resize(hist.size());
    for (size_t i = 0; i < hist.size(); ++i) {
      (*final_out)[i] = static_cast<float>(clipped[i] / norm2);
    }
  }
  return true;
}

}  // namespace

void SiftParams::validate() const {
  if (intervals_per_octave < 1) throw ParameterError("intervals_per_octave must be >= 1");
  if (base_sigma <= 0.0) throw ParameterError("base_sigma must be positive");
  if (assumed_camera_sigma < 0.0) throw ParameterError("assumed_camera_sigma must be >= 0");
  if (contrast_threshold <= 0.0) throw ParameterError("contrast_threshold must be positive");
  if (edge_ratio_threshold < 1.0) throw ParameterError("edge_ratio_threshold must be >= 1");
  if (orientation_bins < 1) throw ParameterError("orientation_bins must be >= 1");
  if (orientation_peak_ratio <= 0.0 || orientation_peak_ratio > 1.0) {
    throw ParameterError("orientation_peak_ratio must be in (0, 1]");
  }
  if (descriptor_grid_width < 1) throw ParameterError("descriptor_grid_width must be >= 1");
  if (descriptor_orientation_bins < 1) {
    throw ParameterError("descriptor_orientation_bins must be >= 1");
  }
  if (descriptor_clip <= 0.0) throw ParameterError("descriptor_clip must be positive");
  if (max_refine_iterations < 1) throw ParameterError("max_refine_iterations must be >= 1");
}

double ScaleSpace::to_original(double u, int octave_pos) const {
  const double px = octaves[octave_pos].pixel_scale;
  // The 2x bilinear upsample under the pixel-center convention puts
  // upsampled pixel u at original coordinate u/2 - 1/4.
  return first_octave == -1 ? u * px - 0.25 : u * px;
}

double ScaleSpace::to_octave(double x, int octave_pos) const {
  const double px = octaves[octave_pos].pixel_scale;
  return first_octave == -1 ? (x + 0.25) / px : x / px;
}

ScaleSpace build_scale_space(const Image& img, const SiftParams& p) {
  p.validate();
  if (std::min(img.width(), img.height()) < 16) {
    throw SizeError("build_scale_space: image must be at least 16 px in each dimension");
  }

  const int S = p.intervals_per_octave;
  ScaleSpace ss;
  ss.width = img.width();
  ss.height = img.height();
  ss.first_octave = p.upsample_first_octave ? -1 : 0;

  Image base;
  double current_sigma;  // in base pixels
  if (p.upsample_first_octave) {
    base = resize_bilinear(img, img.width() * 2, img.height() * 2);
    current_sigma = 2.0 * p.assumed_camera_sigma;
  } else {
    base = img;
    current_sigma = p.assumed_camera_sigma;
  }
  const double initial_inc =
      std::sqrt(std::max(0.0, p.base_sigma * p.base_sigma - current_sigma * current_sigma));
  Image octave_base = gaussian_blur(base, initial_inc);

  const double k = std::pow(2.0, 1.0 / S);
  const double step = std::sqrt(k * k - 1.0);

  int octave_pos = 0;
  while (std::min(octave_base.width(), octave_base.height()) >= 16) {
    const int o_index = ss.first_octave + octave_pos;
    ScaleSpace::Octave oct;
    oct.pixel_scale = std::pow(2.0, o_index);
    oct.gaussians.reserve(S + 3);
    oct.gaussians.push_back(std::move(octave_base));
    for (int i = 1; i < S + 3; ++i) {
      const double inc = p.base_sigma * std::pow(k, i - 1) * step;
      oct.gaussians.push_back(gaussian_blur(oct.gaussians.back(), inc));
    }
    oct.sigmas.resize(S + 3);
    for (int i = 0; i < S + 3; ++i) {
      oct.sigmas[i] = p.base_sigma * std::pow(2.0, o_index + static_cast<double>(i) / S);
    }
    const int w = oct.gaussians[0].width();
    const int h = oct.gaussians[0].height();
    oct.dog.reserve(S + 2);
    for (int i = 0; i < S + 2; ++i) {
      Plane d(w, h);
      const Image& a = oct.gaussians[i];
      const Image& b = oct.gaussians[i + 1];
      for (int y = 0; y < h; ++y) {
        const float* pa = a.row(y);
        const float* pb = b.row(y);
        float* pd = &d.at(0, y);
        for (int x = 0; x < w; ++x) pd[x] = pb[x] - pa[x];
      }
      oct.dog.push_back(std::move(d));
    }
    oct.gradient_mag.resize(S + 3);
    oct.gradient_ori.resize(S + 3);
    for (int i = 0; i < S + 3; ++i) {
      compute_gradients(oct.gaussians[i], oct.gradient_mag[i], oct.gradient_ori[i]);
    }

    octave_base = decimate(oct.gaussians[S]);
    ss.octaves.push_back(std::move(oct));
    ++octave_pos;
  }
  if (ss.octaves.empty()) {
    throw SizeError("build_scale_space: no octave satisfies the 16 px minimum");
  }
  return ss;
}

std::vector<Keypoint> detect_keypoints(const ScaleSpace& ss, const SiftParams& p) {
  const int S = p.intervals_per_octave;
  const double pre_threshold = 0.5 * p.contrast_threshold;
  std::vector<Keypoint> keypoints;

  for (int octave_pos = 0; octave_pos < static_cast<int>(ss.octaves.size()); ++octave_pos) {
    const ScaleSpace::Octave& oct = ss.octaves[octave_pos];
    const int w = oct.dog[0].width;
    const int h = oct.dog[0].height;
    const int o_index = ss.first_octave + octave_pos;

    for (int layer = 1; layer <= S; ++layer) {
      const Plane& lo = oct.dog[layer - 1];
      const Plane& cur = oct.dog[layer];
      const Plane& hi = oct.dog[layer + 1];
      for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
          const float v = cur.at(x, y);
          if (std::abs(v) <= pre_threshold) continue;

          bool is_max = true;
          bool is_min = true;
          for (const Plane* plane : {&lo, &cur, &hi}) {
            for (int dy = -1; dy <= 1 && (is_max || is_min); ++dy) {
              for (int dx = -1; dx <= 1; ++dx) {
                if (plane == &cur && dx == 0 && dy == 0) continue;
                const float nv = plane->at(x + dx, y + dy);
                is_max = is_max && v > nv;
                is_min = is_min && v < nv;
                if (!is_max && !is_min) break;
              }
            }
            if (!is_max && !is_min) break;
          }
          if (!is_max && !is_min) continue;

          const auto refined =
              refine_extremum(oct, layer, x, y, p.max_refine_iterations, S);
          if (!refined) continue;
          if (std::abs(refined->value) < p.contrast_threshold) continue;
          if (!passes_edge_test(oct.dog[refined->layer], refined->x, refined->y,
                                p.edge_ratio_threshold)) {
            continue;
          }

          Keypoint kp;
          kp.x = ss.to_original(refined->x + refined->dx, octave_pos);
          kp.y = ss.to_original(refined->y + refined->dy, octave_pos);
          if (kp.x < 0.0 || kp.x >= ss.width || kp.y < 0.0 || kp.y >= ss.height) {
            continue;
          }
          kp.sigma = p.base_sigma *
                     std::pow(2.0, o_index + (refined->layer + refined->ds) / S);
          kp.response = static_cast<float>(refined->value);
          kp.octave = o_index;
          kp.layer = refined->layer;
          keypoints.push_back(kp);
        }
      }
    }
  }
  return keypoints;
}

std::vector<Keypoint> assign_orientations(const Keypoint& kp, const ScaleSpace& ss,
                                          const SiftParams& p) {
  const OctaveFrame f = locate(kp, ss, p);
  const Plane& mag = f.octave->gradient_mag[f.layer];
  const Plane& ori = f.octave->gradient_ori[f.layer];
  const int w = mag.width;
  const int h = mag.height;
  const int nbins = p.orientation_bins;

  const double sigma_w = 1.5 * f.sigma_rel;
  const int radius = std::max(1, static_cast<int>(std::lround(3.0 * sigma_w)));
  const double r2_max = static_cast<double>(radius) * radius;
  const double bin_scale = nbins / kTwoPi;

  std::vector<double> hist(static_cast<size_t>(nbins), 0.0);
  const int x_lo = std::max(1, static_cast<int>(std::ceil(f.u - radius)));
  const int x_hi = std::min(w - 2, static_cast<int>(std::floor(f.u + radius)));
  const int y_lo = std::max(1, static_cast<int>(std::ceil(f.v - radius)));
  const int y_hi = std::min(h - 2, static_cast<int>(std::floor(f.v + radius)));
  for (int iy = y_lo; iy <= y_hi; ++iy) {
    const double dy = iy - f.v;
    for (int ix = x_lo; ix <= x_hi; ++ix) {
      const double dx = ix - f.u;
      const double r2 = dx * dx + dy * dy;
      if (r2 > r2_max) continue;
      const float m = mag.at(ix, iy);
      if (m <= 0.0f) continue;
      int bin = static_cast<int>(ori.at(ix, iy) * bin_scale);
      if (bin >= nbins) bin -= nbins;
      hist[bin] += m * std::exp(-r2 / (2.0 * sigma_w * sigma_w));
    }
  }

  // Circular box smoothing stabilizes peak selection.
  for (int pass = 0; pass < 6; ++pass) {
    std::vector<double> smoothed(hist.size());
    for (int b = 0; b < nbins; ++b) {
      smoothed[b] = (hist[(b + nbins - 1) % nbins] + hist[b] + hist[(b + 1) % nbins]) / 3.0;
    }
    hist.swap(smoothed);
  }

  const auto max_it = std::max_element(hist.begin(), hist.end());
  const double hmax = *max_it;
  std::vector<Keypoint> oriented;
  if (hmax > 0.0) {
    const double threshold = p.orientation_peak_ratio * hmax;
    for (int b = 0; b < nbins; ++b) {
      const double prev = hist[(b + nbins - 1) % nbins];
      const double next = hist[(b + 1) % nbins];
      if (hist[b] > prev && hist[b] > next && hist[b] >= threshold) {
        const double denom = prev - 2.0 * hist[b] + next;
        const double delta = denom != 0.0 ? 0.5 * (prev - next) / denom : 0.0;
        Keypoint out = kp;
        out.orientation = wrap_angle(kTwoPi * (b + 0.5 + delta) / nbins);
        oriented.push_back(out);
      }
    }
  }
  if (oriented.empty()) {
    // Flat or plateau histogram: fall back to the global peak bin center.
    const int b = static_cast<int>(max_it - hist.begin());
    Keypoint out = kp;
    out.orientation = hmax > 0.0 ? wrap_angle(kTwoPi * (b + 0.5) / nbins) : 0.0;
    oriented.push_back(out);
  }
  return oriented;
}

std::optional<Feature> compute_descriptor(const Keypoint& kp, const ScaleSpace& ss,
                                          const SiftParams& p) {
  Feature feature;
  feature.keypoint = kp;
  if (!descriptor_impl(kp, ss, p, &feature.descriptor, nullptr)) {
    return std::nullopt;
  }
  return feature;
}

std::optional<DescriptorStages> compute_descriptor_stages(const Keypoint& kp,
                                                          const ScaleSpace& ss,
                                                          const SiftParams& p) {
  DescriptorStages stages;
  if (!descriptor_impl(kp, ss, p, nullptr, &stages)) {
    return std::nullopt;
  }
  return stages;
}

std::vector<Feature> extract_features(const Image& img, const SiftParams& p) {
  const ScaleSpace ss = build_scale_space(img, p);
  const std::vector<Keypoint> candidates = detect_keypoints(ss, p);

  std::vector<Feature> features;
  features.reserve(candidates.size());
  for (const Keypoint& kp : candidates) {
    for (const Keypoint& oriented : assign_orientations(kp, ss, p)) {
      if (auto feature = compute_descriptor(oriented, ss, p)) {
        features.push_back(std::move(*feature));
      }
    }
  }
  std::sort(features.begin(), features.end(), [](const Feature& a, const Feature& b) {
    const Keypoint& ka = a.keypoint;
    const Keypoint& kb = b.keypoint;
    return std::tie(ka.octave, ka.layer, ka.y, ka.x, ka.orientation) <
           std::tie(kb.octave, kb.layer, kb.y, kb.x, kb.orientation);
  });
  return features;
}

nlohmann::json sift_params_to_json(const SiftParams& p) {
  return nlohmann::json{{"intervalsPerOctave", p.intervals_per_octave},
                        {"baseSigma", p.base_sigma},
                        {"assumedCameraSigma", p.assumed_camera_sigma},
                        {"upsampleFirstOctave", p.upsample_first_octave},
                        {"contrastThreshold", p.contrast_threshold},
                        {"edgeRatioThreshold", p.edge_ratio_threshold},
                        {"orientationBins", p.orientation_bins},
                        {"orientationPeakRatio", p.orientation_peak_ratio},
                        {"descriptorGridWidth", p.descriptor_grid_width},
                        {"descriptorOrientationBins", p.descriptor_orientation_bins},
                        {"descriptorClip", p.descriptor_clip},
                        {"maxRefineIterations", p.max_refine_iterations}};
}

SiftParams sift_params_from_json(const nlohmann::json& j) {
  SiftParams p;
  p.intervals_per_octave = j.value("intervalsPerOctave", p.intervals_per_octave);
  p.base_sigma = j.value("baseSigma", p.base_sigma);
  p.assumed_camera_sigma = j.value("assumedCameraSigma", p.assumed_camera_sigma);
  p.upsample_first_octave = j.value("upsampleFirstOctave", p.upsample_first_octave);
  p.contrast_threshold = j.value("contrastThreshold", p.contrast_threshold);
  p.edge_ratio_threshold = j.value("edgeRatioThreshold", p.edge_ratio_threshold);
  p.orientation_bins = j.value("orientationBins", p.orientation_bins);
  p.orientation_peak_ratio = j.value("orientationPeakRatio", p.orientation_peak_ratio);
  p.descriptor_grid_width = j.value("descriptorGridWidth", p.descriptor_grid_width);
  p.descriptor_orientation_bins =
      j.value("descriptorOrientationBins", p.descriptor_orientation_bins);
  p.descriptor_clip = j.value("descriptorClip", p.descriptor_clip);
  p.max_refine_iterations = j.value("maxRefineIterations", p.max_refine_iterations);
  p.validate();
  return p;
}

nlohmann::json features_to_json(const std::vector<Feature>& features,
                                const SiftParams& p) {
  nlohmann::json out;
  out["params"] = sift_params_to_json(p);
  nlohmann::json list = nlohmann::json::array();
  for (const Feature& f : features) {
    list.push_back(nlohmann::json{{"x", f.keypoint.x},
                                  {"y", f.keypoint.y},
                                  {"sigma", f.keypoint.sigma},
                                  {"orientation", f.keypoint.orientation},
                                  {"response", f.keypoint.response},
                                  {"descriptor", f.descriptor}});
  }
  out["features"] = std::move(list);
  return out;
}

std::vector<Feature> features_from_json(const nlohmann::json& j, SiftParams* params_out) {
  if (params_out && j.contains("params")) {
    *params_out = sift_params_from_json(j.at("params"));
  }
  std::vector<Feature> features;
  for (const auto& fj : j.at("features")) {
    Feature f;
    f.keypoint.x = fj.at("x").get<double>();
    f.keypoint.y = fj.at("y").get<double>();
    f.keypoint.sigma = fj.at("sigma").get<double>();
    f.keypoint.orientation = fj.at("orientation").get<double>();
    f.keypoint.response = fj.at("response").get<float>();
    f.descriptor = fj.at("descriptor").get<std::vector<float>>();
    features.push_back(std::move(f));
  }
  return features;
}

}  // namespace siftbench
