// Python bindings for the core operations: synthesis, SIFT extraction,
// matching, deformation and the benchmark runner. Images cross the boundary
// as (H, W) float arrays in [0, 1].

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "siftbench/bench.hpp"
#include "siftbench/deform.hpp"
#include "siftbench/error.hpp"
#include "siftbench/image_io.hpp"
#include "siftbench/matching.hpp"
#include "siftbench/sift.hpp"
#include "siftbench/synth.hpp"

namespace py = pybind11;
using namespace siftbench;

namespace {

Image image_from_array(const py::array_t<float, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 2) {
    throw DimensionError("expected a 2-D (H, W) array");
  }
  const int h = static_cast<int>(arr.shape(0));
  const int w = static_cast<int>(arr.shape(1));
  std::vector<float> samples(static_cast<size_t>(w) * h);
  std::copy(arr.data(), arr.data() + samples.size(), samples.begin());
  return Image::from_samples(w, h, std::move(samples));
}

py::array_t<float> image_to_array(const Image& img) {
  return py::array_t<float>({img.height(), img.width()}, img.samples().data());
}

Homography homography_from_array(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.size() != 9) {
    throw DimensionError("expected 9 homography coefficients");
  }
  std::array<double, 9> h;
  std::copy(arr.data(), arr.data() + 9, h.begin());
  return Homography::from_array(h);
}

py::array_t<double> homography_to_array(const Homography& H) {
  return py::array_t<double>({3, 3}, H.h.data());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "SIFT feature toolkit and deformation-robustness benchmark";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  static py::exception<Error> base_error(m, "SiftbenchError");
  py::register_exception<SizeError>(m, "SizeError", base_error.ptr());
  py::register_exception<CodecError>(m, "CodecError", base_error.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", base_error.ptr());
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base_error.ptr());
  py::register_exception<DegenerateGeometryError>(m, "DegenerateGeometryError",
                                                  base_error.ptr());
  py::register_exception<IoError>(m, "IoError", base_error.ptr());
  py::register_exception<DataError>(m, "DataError", base_error.ptr());

  py::class_<SiftParams>(m, "SiftParams")
      .def(py::init<>())
      .def_readwrite("intervals_per_octave", &SiftParams::intervals_per_octave)
      .def_readwrite("base_sigma", &SiftParams::base_sigma)
      .def_readwrite("assumed_camera_sigma", &SiftParams::assumed_camera_sigma)
      .def_readwrite("upsample_first_octave", &SiftParams::upsample_first_octave)
      .def_readwrite("contrast_threshold", &SiftParams::contrast_threshold)
      .def_readwrite("edge_ratio_threshold", &SiftParams::edge_ratio_threshold)
      .def_readwrite("orientation_bins", &SiftParams::orientation_bins)
      .def_readwrite("orientation_peak_ratio", &SiftParams::orientation_peak_ratio)
      .def_readwrite("descriptor_grid_width", &SiftParams::descriptor_grid_width)
      .def_readwrite("descriptor_orientation_bins", &SiftParams::descriptor_orientation_bins)
      .def_readwrite("descriptor_clip", &SiftParams::descriptor_clip)
      .def_readwrite("max_refine_iterations", &SiftParams::max_refine_iterations);

  py::class_<Keypoint>(m, "Keypoint")
      .def(py::init<>())
      .def_readwrite("x", &Keypoint::x)
      .def_readwrite("y", &Keypoint::y)
      .def_readwrite("sigma", &Keypoint::sigma)
      .def_readwrite("orientation", &Keypoint::orientation)
      .def_readwrite("response", &Keypoint::response)
      .def_readwrite("octave", &Keypoint::octave)
      .def_readwrite("layer", &Keypoint::layer)
      .def("__repr__", [](const Keypoint& kp) {
        return "Keypoint(x=" + std::to_string(kp.x) + ", y=" + std::to_string(kp.y) +
               ", sigma=" + std::to_string(kp.sigma) + ")";
      });

  py::class_<Feature>(m, "Feature")
      .def(py::init<>())
      .def_readwrite("keypoint", &Feature::keypoint)
      .def_property(
          "descriptor",
          [](const Feature& f) {
            // A plain ssize_t (or braced scalar) shape selects an array_t
            // overload that leaves the strides empty; spell the shape out.
            const std::vector<py::ssize_t> shape{
                static_cast<py::ssize_t>(f.descriptor.size())};
            return py::array_t<float>(shape, f.descriptor.data());
          },
          [](Feature& f, const py::array_t<float, py::array::c_style | py::array::forcecast>& arr) {
            f.descriptor.assign(arr.data(), arr.data() + arr.size());
          });

  py::class_<Match>(m, "Match")
      .def(py::init<>())
      .def_readwrite("source_index", &Match::source_index)
      .def_readwrite("target_index", &Match::target_index)
      .def_readwrite("distance", &Match::distance);

  py::class_<VerifiedMatches>(m, "VerifiedMatches")
      .def_property_readonly("homography",
                             [](const VerifiedMatches& v) { return homography_to_array(v.homography); })
      .def_readonly("inliers", &VerifiedMatches::inliers)
      .def_readonly("inlier_threshold", &VerifiedMatches::inlier_threshold)
      .def_readonly("seed", &VerifiedMatches::seed);

  // image-core
  m.def("to_grayscale", [](const py::array_t<float, py::array::c_style | py::array::forcecast>& r,
                           const py::array_t<float, py::array::c_style | py::array::forcecast>& g,
                           const py::array_t<float, py::array::c_style | py::array::forcecast>& b) {
    return image_to_array(to_grayscale(image_from_array(r), image_from_array(g),
                                       image_from_array(b)));
  });
  m.def("resize_bilinear",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& img, int w, int h) {
          return image_to_array(resize_bilinear(image_from_array(img), w, h));
        },
        py::arg("image"), py::arg("width"), py::arg("height"));
  m.def("gaussian_blur",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& img, double sigma) {
          return image_to_array(gaussian_blur(image_from_array(img), sigma));
        },
        py::arg("image"), py::arg("sigma"));
  m.def("jpeg_roundtrip",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& img, int quality) {
          return image_to_array(jpeg_roundtrip(image_from_array(img), quality));
        },
        py::arg("image"), py::arg("quality"));
  m.def("warp_homography",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& img,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& H) {
          return image_to_array(warp_homography(image_from_array(img), homography_from_array(H)));
        },
        py::arg("image"), py::arg("homography"));
  m.def("read_image",
        [](const std::filesystem::path& path) { return image_to_array(read_image(path)); });
  m.def("write_png", [](const py::array_t<float, py::array::c_style | py::array::forcecast>& img,
                        const std::filesystem::path& path) {
    write_png(image_from_array(img), path);
  });
  m.def("write_jpeg", [](const py::array_t<float, py::array::c_style | py::array::forcecast>& img,
                         const std::filesystem::path& path,
                         int quality) { write_jpeg(image_from_array(img), path, quality); },
        py::arg("image"), py::arg("path"), py::arg("quality") = 95);

  // sift
  m.def("extract",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& img,
           const SiftParams& params) { return extract_features(image_from_array(img), params); },
        py::arg("image"), py::arg("params") = SiftParams{});
  m.def("features_to_json",
        [](const std::vector<Feature>& features, const SiftParams& params) {
          return features_to_json(features, params).dump();
        },
        py::arg("features"), py::arg("params") = SiftParams{});
  m.def("features_from_json", [](const std::string& text) {
    return features_from_json(nlohmann::json::parse(text));
  });

  // matching
  m.def("match_features",
        [](const std::vector<Feature>& source, const std::vector<Feature>& target,
           double threshold, bool ratio_test, double ratio) {
          MatchOptions options;
          options.threshold = threshold;
          options.ratio_test = ratio_test;
          options.ratio = ratio;
          return match_features(source, target, options);
        },
        py::arg("source"), py::arg("target"), py::arg("threshold") = 0.8,
        py::arg("ratio_test") = false, py::arg("ratio") = 0.8);
  m.def("ransac_homography",
        [](const std::vector<Match>& matches, const std::vector<Keypoint>& source,
           const std::vector<Keypoint>& target, int iterations, double inlier_threshold,
           uint64_t seed) {
          RansacOptions options;
          options.iterations = iterations;
          options.inlier_threshold = inlier_threshold;
          options.seed = seed;
          return ransac_homography(matches, source, target, options);
        },
        py::arg("matches"), py::arg("source_keypoints"), py::arg("target_keypoints"),
        py::arg("iterations") = 1000, py::arg("inlier_threshold") = 3.0, py::arg("seed") = 0);
  m.def("keypoints_of", &keypoints_of);

  // deform
  m.def("schedule", [](const std::string& kind, int level) {
    const DeformationSpec spec = schedule(parse_kind(kind), level);
    return deformation_to_json(spec, Homography::identity()).dump();
  });
  m.def("apply_deformation",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& img,
           const std::string& kind, int level) {
          const DeformedImage out =
              apply_deformation(image_from_array(img), schedule(parse_kind(kind), level));
          return py::make_tuple(image_to_array(out.image), homography_to_array(out.ground_truth));
        },
        py::arg("image"), py::arg("kind"), py::arg("level"));
  m.def("ground_truth_viewpoint", [](double tilt_deg, int width, int height) {
    return homography_to_array(ground_truth_viewpoint(tilt_deg, width, height));
  });

  // synth
  m.def("generate_motif",
        [](const std::string& family, int width, int height, int period, double contrast,
           int border_rows, uint64_t seed) {
          MotifSpec spec;
          spec.family = parse_family(family);
          spec.width = width;
          spec.height = height;
          spec.period = period;
          spec.contrast = contrast;
          spec.border_rows = border_rows;
          spec.seed = seed;
          return image_to_array(generate_motif(spec));
        },
        py::arg("family"), py::arg("width") = 800, py::arg("height") = 355,
        py::arg("period") = 32, py::arg("contrast") = 0.8, py::arg("border_rows") = 2,
        py::arg("seed") = 0);

  // bench
  m.def("default_synth_config", [] { return suite_config_to_json(default_synth_config()).dump(); });
  m.def("run_suite_json", [](const std::string& config_json) {
    const SuiteConfig config = suite_config_from_json(nlohmann::json::parse(config_json));
    const auto records = run_suite(config);
    nlohmann::json rows = nlohmann::json::array();
    for (const BenchmarkRecord& rec : records) {
      nlohmann::json row{{"class", rec.class_name},
                         {"kind", kind_label(rec.kind)},
                         {"level", rec.level},
                         {"threshold", rec.threshold},
                         {"templateFeatures", rec.template_features},
                         {"queryFeatures", rec.query_features},
                         {"positiveMatches", rec.positive_matches},
                         {"retainedPct", rec.retained_pct},
                         {"seed", rec.seed}};
      if (rec.ransac_inliers) row["ransacInliers"] = *rec.ransac_inliers;
      rows.push_back(std::move(row));
    }
    return rows.dump();
  });
  m.def("render_matches",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& left,
           const py::array_t<float, py::array::c_style | py::array::forcecast>& right,
           const std::vector<Match>& matches, const std::vector<Keypoint>& left_keypoints,
           const std::vector<Keypoint>& right_keypoints) {
          return image_to_array(render_matches(image_from_array(left), image_from_array(right),
                                               matches, left_keypoints, right_keypoints));
        });

#ifdef SIFTBENCH_VERSION
  m.attr("__version__") = SIFTBENCH_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
