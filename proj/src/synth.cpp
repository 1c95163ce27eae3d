#include "siftbench/synth.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <memory>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>

#include "siftbench/error.hpp"

namespace siftbench {

namespace {

std::string normalize_token(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '_' || c == '-' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

inline int positive_mod(long long a, int m) {
  const int r = static_cast<int>(a % m);
  return r < 0 ? r + m : r;
}

// Diagonal stripe test on a square cell grid: cells are light when the
// anti-diagonal index falls inside the duty window. The three geometric
// stripe families use distinct (modulus, duty) pairs so their local corner
// neighborhoods stay separable despite the descriptor's rotation invariance:
// 2/2 for the twill, 1/3 for the chevron, 2/1 for the diamond rings.
inline bool stripe_cell(long long a, long long b, int modulus, int duty) {
  return positive_mod(a + b, modulus) < duty;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Seeded value noise: smooth interpolation of lattice randoms plus one
// half-spacing octave.
class ValueNoise {
 public:
  ValueNoise(int width, int height, double spacing, uint64_t seed) : spacing_(spacing) {
    cols_ = static_cast<int>(std::ceil(width / spacing)) + 2;
    rows_ = static_cast<int>(std::ceil(height / spacing)) + 2;
    const int cols2 = cols_ * 2;
    const int rows2 = rows_ * 2;
    std::mt19937_64 rng(seed);
    const auto uniform = [&rng]() {
      return static_cast<double>(rng() >> 11) / static_cast<double>(1ull << 53);
    };
    coarse_.resize(static_cast<size_t>(cols_) * rows_);
    for (double& v : coarse_) v = uniform();
    fine_.resize(static_cast<size_t>(cols2) * rows2);
    for (double& v : fine_) v = uniform();
    fine_cols_ = cols2;
  }

  double at(double x, double y) const {
    // Fine-dominant mix keeps the spectral power at blob scale instead of
    // letting thresholded low-frequency noise percolate into large regions.
    return (sample(coarse_, cols_, x / spacing_, y / spacing_) +
            2.0 * sample(fine_, fine_cols_, 2.0 * x / spacing_, 2.0 * y / spacing_)) /
           3.0;
  }

 private:
  static double sample(const std::vector<double>& grid, int cols, double u, double v) {
    const int i = static_cast<int>(u);
    const int j = static_cast<int>(v);
    const double fu = smoothstep(u - i);
    const double fv = smoothstep(v - j);
    const auto g = [&](int a, int b) { return grid[static_cast<size_t>(b) * cols + a]; };
    const double top = g(i, j) * (1.0 - fu) + g(i + 1, j) * fu;
    const double bottom = g(i, j + 1) * (1.0 - fu) + g(i + 1, j + 1) * fu;
    return top * (1.0 - fv) + bottom * fv;
  }

  double spacing_;
  int cols_ = 0;
  int rows_ = 0;
  int fine_cols_ = 0;
  std::vector<double> coarse_;
  std::vector<double> fine_;
};

// Random 4x4 binary weave tile.
std::array<bool, 16> random_tile(std::mt19937_64& rng) {
  std::array<bool, 16> tile{};
  for (bool& cell : tile) cell = (rng() & 1ull) != 0;
  return tile;
}

}  // namespace

std::string family_label(MotifFamily family) {
  switch (family) {
    case MotifFamily::Chevron: return "Chevron";
    case MotifFamily::DiagonalTwill: return "DiagonalTwill";
    case MotifFamily::SymmetricDiamond: return "SymmetricDiamond";
    case MotifFamily::RepetitiveTile: return "RepetitiveTile";
    case MotifFamily::NonGeometric: return "NonGeometric";
  }
  throw ParameterError("unknown motif family");
}

MotifFamily parse_family(const std::string& text) {
  const std::string t = normalize_token(text);
  if (t == "chevron") return MotifFamily::Chevron;
  if (t == "diagonaltwill" || t == "twill") return MotifFamily::DiagonalTwill;
  if (t == "symmetricdiamond" || t == "diamond") return MotifFamily::SymmetricDiamond;
  if (t == "repetitivetile" || t == "tile") return MotifFamily::RepetitiveTile;
  if (t == "nongeometric" || t == "noise") return MotifFamily::NonGeometric;
  throw ParameterError("unknown motif family '" + text + "'");
}

void MotifSpec::validate() const {
  if (width < 64 || height < 64) {
    throw ParameterError("motif dimensions must be at least 64x64");
  }
  if (period < 4) throw ParameterError("motif period must be at least 4 px");
  if (contrast <= 0.0 || contrast > 1.0) {
    throw ParameterError("motif contrast must be in (0, 1]");
  }
  if (border_rows < 0) throw ParameterError("border_rows must be >= 0");
}

Image generate_motif(const MotifSpec& spec) {
  spec.validate();
  const float light = static_cast<float>(0.5 + spec.contrast / 2.0);
  const float dark = static_cast<float>(0.5 - spec.contrast / 2.0);
  const int w = spec.width;
  const int h = spec.height;

  // Diagonal families use a cell grid sized so the pattern repeat measured
  // along the crossing 45-degree diagonal equals `period` pixels.
  const double diag_cell = spec.period / (2.0 * std::numbers::sqrt2);

  std::mt19937_64 rng(spec.seed);
  std::array<bool, 16> tile_outer{};
  std::array<bool, 16> tile_center{};
  if (spec.family == MotifFamily::RepetitiveTile) {
    tile_outer = random_tile(rng);
    tile_center = random_tile(rng);
  }
  std::unique_ptr<ValueNoise> noise;
  if (spec.family == MotifFamily::NonGeometric) {
    noise = std::make_unique<ValueNoise>(w, h, static_cast<double>(spec.period), spec.seed);
  }

  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;
  const double tile_cell = spec.period / 4.0;

  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    float* row = out.row(y);
    for (int x = 0; x < w; ++x) {
      bool on = false;
      switch (spec.family) {
        case MotifFamily::Chevron: {
          // Bands fold about the vertical midline.
          const double xa = std::min<double>(x, w - 1 - x);
          on = stripe_cell(static_cast<long long>(std::floor(xa / diag_cell)),
                           static_cast<long long>(std::floor(y / diag_cell)), 4, 1);
          break;
        }
        case MotifFamily::DiagonalTwill:
          on = stripe_cell(static_cast<long long>(std::floor(x / diag_cell)),
                           static_cast<long long>(std::floor(y / diag_cell)), 4, 2);
          break;
        case MotifFamily::SymmetricDiamond: {
          const double dx = std::abs(x - cx);
          const double dy = std::abs(y - cy);
          on = stripe_cell(static_cast<long long>(std::floor(dx / diag_cell)),
                           static_cast<long long>(std::floor(dy / diag_cell)), 3, 2);
          break;
        }
        case MotifFamily::RepetitiveTile: {
          const bool in_center = std::abs(x - cx) < w / 4.0 && std::abs(y - cy) < h / 4.0;
          const auto& tile = in_center ? tile_center : tile_outer;
          const int a = positive_mod(static_cast<long long>(std::floor(x / tile_cell)), 4);
          const int b = positive_mod(static_cast<long long>(std::floor(y / tile_cell)), 4);
          on = tile[static_cast<size_t>(b) * 4 + a];
          break;
        }
        case MotifFamily::NonGeometric:
          // Above-median cut keeps the on-phase as isolated blobs of roughly
          // the lattice spacing rather than one percolating region.
          on = noise->at(x, y) >= 0.62;
          break;
      }
      row[x] = on ? light : dark;
    }
  }

  // Outer frame of alternating twill, border_rows strips of 4 px.
  const int border = spec.border_rows * 4;
  if (border > 0) {
    for (int y = 0; y < h; ++y) {
      float* row = out.row(y);
      for (int x = 0; x < w; ++x) {
        if (x >= border && x < w - border && y >= border && y < h - border) continue;
        row[x] = ((x / 4 + y / 4) % 2 == 0) ? light : dark;
      }
    }
  }
  return out;
}

std::vector<std::pair<std::string, MotifSpec>> default_benchmark_classes() {
  std::vector<std::pair<std::string, MotifSpec>> classes;
  const auto make = [](MotifFamily family, uint64_t seed, int period, double contrast) {
    MotifSpec spec;
    spec.family = family;
    spec.seed = seed;
    spec.period = period;
    spec.contrast = contrast;
    return spec;
  };
  // Periods keep the texture predominantly fine-scale, like the weave of a
  // physical mat: coarse enough to stay under a few thousand features, fine
  // enough that a sigma-8 blur erases it. The noise classes run at reduced
  // contrast so their blurred residue drops below the detection threshold.
  classes.emplace_back("chevron", make(MotifFamily::Chevron, 1, 32, 0.8));
  classes.emplace_back("diagonal_twill", make(MotifFamily::DiagonalTwill, 2, 16, 0.8));
  classes.emplace_back("symmetric_diamond", make(MotifFamily::SymmetricDiamond, 3, 32, 0.8));
  classes.emplace_back("repetitive_tile_a", make(MotifFamily::RepetitiveTile, 4, 32, 0.8));
  classes.emplace_back("repetitive_tile_b", make(MotifFamily::RepetitiveTile, 5, 32, 0.8));
  classes.emplace_back("non_geometric_a", make(MotifFamily::NonGeometric, 6, 12, 0.42));
  classes.emplace_back("non_geometric_b", make(MotifFamily::NonGeometric, 7, 12, 0.42));
  return classes;
}

nlohmann::json motif_spec_to_json(const MotifSpec& spec) {
  return nlohmann::json{{"family", family_label(spec.family)},
                        {"width", spec.width},
                        {"height", spec.height},
                        {"period", spec.period},
                        {"contrast", spec.contrast},
                        {"borderRows", spec.border_rows},
                        {"seed", spec.seed}};
}

MotifSpec motif_spec_from_json(const nlohmann::json& j) {
  MotifSpec spec;
  spec.family = parse_family(j.at("family").get<std::string>());
  spec.width = j.value("width", spec.width);
  spec.height = j.value("height", spec.height);
  spec.period = j.value("period", spec.period);
  spec.contrast = j.value("contrast", spec.contrast);
  spec.border_rows = j.value("borderRows", spec.border_rows);
  spec.seed = j.value("seed", spec.seed);
  spec.validate();
  return spec;
}

}  // namespace siftbench
