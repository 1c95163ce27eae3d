// Command-line front end: detect, match, deform, synth, bench, report.
// Exit codes: 0 success, 1 usage error, 2 input/data error.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "siftbench/bench.hpp"
#include "siftbench/deform.hpp"
#include "siftbench/error.hpp"
#include "siftbench/image_io.hpp"
#include "siftbench/matching.hpp"
#include "siftbench/sift.hpp"
#include "siftbench/synth.hpp"

namespace {

using siftbench::Image;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw siftbench::IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw siftbench::IoError("write failed on '" + path.string() + "'");
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw siftbench::IoError("cannot read '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw siftbench::IoError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

int run_detect(const std::string& input, const std::string& out_path) {
  const Image img = siftbench::read_image(input);
  const siftbench::SiftParams params;
  const auto features = siftbench::extract_features(img, params);
  write_text(out_path, siftbench::features_to_json(features, params).dump(2) + "\n");
  std::cout << "features: " << features.size() << "\n";
  return 0;
}

int run_match(const std::string& source_path, const std::string& target_path,
              double threshold, bool ratio_test, bool use_ransac, uint64_t seed,
              const std::string& viz_path, const std::string& out_path) {
  const Image source = siftbench::read_image(source_path);
  const Image target = siftbench::read_image(target_path);
  const siftbench::SiftParams params;
  const auto source_features = siftbench::extract_features(source, params);
  const auto target_features = siftbench::extract_features(target, params);
  if (source_features.empty()) {
    throw siftbench::DataError("no features detected in '" + source_path + "'");
  }

  siftbench::MatchOptions options;
  options.threshold = threshold;
  options.ratio_test = ratio_test;
  const auto matches = siftbench::match_features(source_features, target_features, options);
  const double retained = 100.0 * matches.size() / source_features.size();

  std::printf("matches: %zu\n", matches.size());
  std::printf("retained: %.2f%%\n", retained);

  std::optional<siftbench::VerifiedMatches> verified;
  if (use_ransac) {
    siftbench::RansacOptions ropts;
    ropts.seed = seed;
    verified = siftbench::ransac_homography(matches, siftbench::keypoints_of(source_features),
                                            siftbench::keypoints_of(target_features), ropts);
    std::printf("inliers: %zu\n", verified->inliers.size());
  }

  if (!viz_path.empty()) {
    const Image composite = siftbench::render_matches(
        source, target, matches, siftbench::keypoints_of(source_features),
        siftbench::keypoints_of(target_features));
    siftbench::write_png(composite, viz_path);
  }
  if (!out_path.empty()) {
    const nlohmann::json j = verified
                                 ? siftbench::verified_to_json(matches, *verified)
                                 : siftbench::matches_to_json(matches);
    write_text(out_path, j.dump(2) + "\n");
  }
  return 0;
}

int run_deform(const std::string& input, const std::string& kind_text, int level,
               const std::string& out_path, const std::string& gt_path) {
  const Image img = siftbench::read_image(input);
  const siftbench::DeformationKind kind = siftbench::parse_kind(kind_text);
  const siftbench::DeformationSpec spec = siftbench::schedule(kind, level);
  const siftbench::DeformedImage result = siftbench::apply_deformation(img, spec);
  siftbench::write_image(result.image, out_path);
  if (!gt_path.empty()) {
    write_text(gt_path,
               siftbench::deformation_to_json(spec, result.ground_truth).dump(2) + "\n");
  }
  return 0;
}

int run_synth(const std::string& family, const std::string& size, uint64_t seed,
              int period, double contrast, int border_rows, const std::string& out_path,
              const std::string& spec_path) {
  siftbench::MotifSpec spec;
  spec.family = siftbench::parse_family(family);
  spec.seed = seed;
  spec.period = period;
  spec.contrast = contrast;
  spec.border_rows = border_rows;
  if (!size.empty()) {
    const auto sep = size.find('x');
    if (sep == std::string::npos) {
      throw CLI::ValidationError("--size", "expected WIDTHxHEIGHT, e.g. 800x355");
    }
    try {
      spec.width = std::stoi(size.substr(0, sep));
      spec.height = std::stoi(size.substr(sep + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--size", "expected WIDTHxHEIGHT, e.g. 800x355");
    }
  }
  const Image img = siftbench::generate_motif(spec);
  siftbench::write_image(img, out_path);
  if (!spec_path.empty()) {
    write_text(spec_path, siftbench::motif_spec_to_json(spec).dump(2) + "\n");
  }
  return 0;
}

int run_bench(const std::string& config_path, const std::string& out_path,
              const std::string& report_path, const std::string& images_dir,
              const std::string& viz_dir, int jobs, std::optional<uint64_t> seed,
              bool quiet) {
  siftbench::SuiteConfig config = config_path == "default-synth"
                                      ? siftbench::default_synth_config()
                                      : siftbench::suite_config_from_json(read_json(config_path));
  if (!out_path.empty()) config.outputs.csv = out_path;
  if (!report_path.empty()) config.outputs.report = report_path;
  if (!images_dir.empty()) config.outputs.images_dir = images_dir;
  if (!viz_dir.empty()) config.outputs.viz_dir = viz_dir;
  if (jobs > 0) config.jobs = jobs;
  if (seed) config.seed = *seed;
  if (!config.outputs.csv) {
    throw CLI::ValidationError("--out", "no CSV destination in config or flags");
  }

  const auto log = [&](const std::string& message) {
    if (!quiet) std::cerr << message << "\n";
  };
  const auto records = siftbench::run_suite(config, log);
  if (records.empty()) {
    throw siftbench::DataError("benchmark produced no records (all classes degenerate?)");
  }
  siftbench::write_report_csv(records, *config.outputs.csv);
  if (config.outputs.report) {
    siftbench::write_report_markdown(records, *config.outputs.report);
  }
  std::cout << "records: " << records.size() << "\n";
  std::cout << "csv: " << config.outputs.csv->string() << "\n";
  if (config.outputs.report) {
    std::cout << "report: " << config.outputs.report->string() << "\n";
  }
  return 0;
}

int run_report(const std::string& csv_path, const std::string& kind_text, int level,
               double threshold) {
  const auto records = siftbench::read_report_csv(csv_path);
  const double mean =
      siftbench::aggregate(records, siftbench::parse_kind(kind_text), threshold, level);
  std::printf("mean retained: %.2f%%\n", mean);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SIFT feature toolkit and deformation-robustness benchmark"};
  app.require_subcommand(1);

  // detect
  auto* detect = app.add_subcommand("detect", "Extract SIFT features into JSON");
  std::string detect_input, detect_out;
  detect->add_option("image", detect_input, "Input PNG/JPEG")->required();
  detect->add_option("--out", detect_out, "Output feature JSON")->required();

  // match
  auto* match = app.add_subcommand("match", "Match features between two images");
  std::string match_a, match_b, match_viz, match_out;
  double match_threshold = 0.8;
  bool match_ratio = false, match_ransac = false;
  uint64_t match_seed = 0;
  match->add_option("source", match_a, "Template image")->required();
  match->add_option("target", match_b, "Query image")->required();
  match->add_option("--threshold", match_threshold, "Distance cutoff (default 0.8)")
      ->check(CLI::PositiveNumber);
  match->add_flag("--ratio-test", match_ratio, "Nearest/second-nearest ratio filter");
  match->add_flag("--ransac", match_ransac, "RANSAC homography verification");
  match->add_option("--seed", match_seed, "RANSAC seed (default 0)");
  match->add_option("--viz", match_viz, "Write a match composite PNG");
  match->add_option("--out", match_out, "Write matches as JSON");

  // deform
  auto* deform = app.add_subcommand("deform", "Apply a scheduled deformation");
  std::string deform_input, deform_kind, deform_out, deform_gt;
  int deform_level = 1;
  deform->add_option("image", deform_input, "Input PNG/JPEG")->required();
  deform
      ->add_option("--kind", deform_kind,
                   "blur | compression | light | zoom_rotation | viewpoint")
      ->required();
  deform->add_option("--level", deform_level, "Intensity level 1..5")
      ->required()
      ->check(CLI::Range(1, 5));
  deform->add_option("--out", deform_out, "Output image (.png/.jpg)")->required();
  deform->add_option("--gt", deform_gt, "Sidecar JSON with params and homography");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a procedural motif image");
  std::string synth_family, synth_size, synth_out, synth_spec;
  uint64_t synth_seed = 0;
  int synth_period = 32, synth_border = 2;
  double synth_contrast = 0.8;
  synth
      ->add_option("--family", synth_family,
                   "chevron | diagonal_twill | symmetric_diamond | repetitive_tile | "
                   "non_geometric")
      ->required();
  synth->add_option("--size", synth_size, "WIDTHxHEIGHT (default 800x355)");
  synth->add_option("--seed", synth_seed, "Pattern seed (default 0)");
  synth->add_option("--period", synth_period, "Pattern repeat in px (default 32)");
  synth->add_option("--contrast", synth_contrast, "Two-tone contrast (default 0.8)");
  synth->add_option("--border-rows", synth_border, "Twill frame rows (default 2)");
  synth->add_option("--out", synth_out, "Output image (.png/.jpg)")->required();
  synth->add_option("--spec-json", synth_spec, "Sidecar JSON with the motif spec");

  // bench
  auto* bench = app.add_subcommand("bench", "Run the deformation benchmark suite");
  std::string bench_config, bench_out, bench_report, bench_images, bench_viz;
  int bench_jobs = 0;
  bool bench_quiet = false;
  std::optional<uint64_t> bench_seed;
  bench
      ->add_option("--config", bench_config,
                   "Suite config JSON, or 'default-synth' for the bundled 7x5x5 run")
      ->required();
  bench->add_option("--out", bench_out, "CSV destination (overrides config)");
  bench->add_option("--report", bench_report, "Markdown report destination");
  bench->add_option("--images-dir", bench_images, "Directory for deformed PNGs");
  bench->add_option("--viz-dir", bench_viz, "Directory for match composites");
  bench->add_option("--jobs", bench_jobs, "Worker thread cap")->check(CLI::PositiveNumber);
  bench->add_option("--seed", [&bench_seed](const std::vector<std::string>& vals) {
    bench_seed = std::stoull(vals[0]);
    return true;
  }, "Suite seed (overrides config)");
  bench->add_flag("--quiet", bench_quiet, "Suppress progress on stderr");

  // report
  auto* report = app.add_subcommand("report", "Aggregate a benchmark CSV");
  std::string report_csv, report_kind;
  int report_level = 5;
  double report_threshold = 0.8;
  report->add_option("csv", report_csv, "Benchmark CSV")->required();
  report->add_option("--kind", report_kind, "Deformation kind")->required();
  report->add_option("--level", report_level, "Level 1..5")
      ->required()
      ->check(CLI::Range(1, 5));
  report->add_option("--threshold", report_threshold, "Threshold")
      ->required()
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (app.got_subcommand(detect)) return run_detect(detect_input, detect_out);
    if (app.got_subcommand(match)) {
      return run_match(match_a, match_b, match_threshold, match_ratio, match_ransac,
                       match_seed, match_viz, match_out);
    }
    if (app.got_subcommand(deform)) {
      return run_deform(deform_input, deform_kind, deform_level, deform_out, deform_gt);
    }
    if (app.got_subcommand(synth)) {
      return run_synth(synth_family, synth_size, synth_seed, synth_period,
                       synth_contrast, synth_border, synth_out, synth_spec);
    }
    if (app.got_subcommand(bench)) {
      return run_bench(bench_config, bench_out, bench_report, bench_images, bench_viz,
                       bench_jobs, bench_seed, bench_quiet);
    }
    if (app.got_subcommand(report)) {
      return run_report(report_csv, report_kind, report_level, report_threshold);
    }
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const siftbench::ParameterError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const siftbench::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
