#include "siftbench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>
#include <thread>

#include "siftbench/error.hpp"
#include "siftbench/image_io.hpp"

namespace siftbench {

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_pct(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

uint64_t fnv1a(uint64_t state, const void* data, size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < size; ++i) {
    state ^= bytes[i];
    state *= 1099511628211ull;
  }
  return state;
}

// Per-cell RANSAC seed, derived from (suite seed, class, kind, level) so
// reruns are exact.
uint64_t derive_cell_seed(uint64_t suite_seed, const std::string& class_name,
                          DeformationKind kind, int level) {
  uint64_t state = 14695981039346656037ull;
  state = fnv1a(state, &suite_seed, sizeof(suite_seed));
  state = fnv1a(state, class_name.data(), class_name.size());
  const int kind_id = static_cast<int>(kind);
  state = fnv1a(state, &kind_id, sizeof(kind_id));
  state = fnv1a(state, &level, sizeof(level));
  return state;
}

Image load_class_image(const ClassSource& source) {
  if (source.path) {
    try {
      return read_image(*source.path);
    } catch (const Error& e) {
      throw IoError("class '" + source.name + "': " + e.what());
    }
  }
  if (source.motif) {
    return generate_motif(*source.motif);
  }
  throw ParameterError("class '" + source.name + "' has neither path nor motif");
}

BenchmarkRecord make_record(const std::string& class_name, const DeformationSpec& spec,
                            double threshold, int template_features, int query_features,
                            int positive_matches, std::optional<int> ransac_inliers,
                            uint64_t seed) {
  BenchmarkRecord rec;
  rec.class_name = class_name;
  rec.kind = spec.kind;
  rec.level = spec.level;
  rec.threshold = threshold;
  rec.template_features = template_features;
  rec.query_features = query_features;
  rec.positive_matches = positive_matches;
  rec.retained_pct = 100.0 * positive_matches / template_features;
  rec.ransac_inliers = ransac_inliers;
  rec.seed = seed;
  return rec;
}

void draw_line(Image& img, double x0, double y0, double x1, double y1, float value) {
  int ix0 = static_cast<int>(std::lround(x0));
  int iy0 = static_cast<int>(std::lround(y0));
  const int ix1 = static_cast<int>(std::lround(x1));
  const int iy1 = static_cast<int>(std::lround(y1));
  const int dx = std::abs(ix1 - ix0);
  const int dy = -std::abs(iy1 - iy0);
  const int sx = ix0 < ix1 ? 1 : -1;
  const int sy = iy0 < iy1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (ix0 >= 0 && ix0 < img.width() && iy0 >= 0 && iy0 < img.height()) {
      img.set(ix0, iy0, value);
    }
    if (ix0 == ix1 && iy0 == iy1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      ix0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      iy0 += sy;
    }
  }
}

void draw_circle(Image& img, double cx, double cy, double radius, float value) {
  const int steps = std::max(8, static_cast<int>(std::ceil(radius * 8)));
  for (int i = 0; i < steps; ++i) {
    const double a = 2.0 * std::numbers::pi * i / steps;
    const int x = static_cast<int>(std::lround(cx + radius * std::cos(a)));
    const int y = static_cast<int>(std::lround(cy + radius * std::sin(a)));
    if (x >= 0 && x < img.width() && y >= 0 && y < img.height()) {
      img.set(x, y, value);
    }
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") != std::string::npos) {
    throw DataError("class name '" + s + "' contains CSV delimiter characters");
  }
  return s;
}

}  // namespace

void SuiteConfig::validate() const {
  if (classes.empty()) throw ParameterError("suite config needs at least one class");
  if (kinds.empty()) throw ParameterError("suite config needs at least one kind");
  if (levels.empty()) throw ParameterError("suite config needs at least one level");
  if (thresholds.empty()) throw ParameterError("suite config needs at least one threshold");
  for (int level : levels) {
    if (level < 1 || level > 5) throw ParameterError("levels must be in 1..5");
  }
  for (size_t i = 0; i + 1 < thresholds.size(); ++i) {
    if (thresholds[i] > thresholds[i + 1]) {
      throw ParameterError("thresholds must be sorted ascending");
    }
  }
  for (double t : thresholds) {
    if (t <= 0.0) throw ParameterError("thresholds must be positive");
  }
  sift.validate();
  if (jobs < 0) throw ParameterError("jobs must be >= 0");
}

SuiteConfig default_synth_config() {
  SuiteConfig config;
  for (auto& [name, spec] : default_benchmark_classes()) {
    config.classes.push_back(ClassSource{name, std::nullopt, spec});
  }
  config.outputs.csv = "bench.csv";
  config.outputs.images_dir = "bench_images";
  return config;
}

BenchmarkRecord run_cell(const Image& template_image, const std::string& class_name,
                         const DeformationSpec& spec, double threshold,
                         const SiftParams& params,
                         std::optional<uint64_t> ransac_seed) {
  const std::vector<Feature> template_features = extract_features(template_image, params);
  if (template_features.empty()) {
    throw DataError("degenerate cell: class '" + class_name +
                    "' produced no template features");
  }
  const DeformedImage deformed = apply_deformation(template_image, spec);
  const std::vector<Feature> query_features = extract_features(deformed.image, params);
  const std::vector<Match> matches =
      match_features(template_features, query_features, threshold);

  std::optional<int> inliers;
  if (ransac_seed && matches.size() >= 4) {
    RansacOptions options;
    options.seed = *ransac_seed;
    const VerifiedMatches verified =
        ransac_homography(matches, keypoints_of(template_features),
                          keypoints_of(query_features), options);
    inliers = static_cast<int>(verified.inliers.size());
  }
  return make_record(class_name, spec, threshold,
                     static_cast<int>(template_features.size()),
                     static_cast<int>(query_features.size()),
                     static_cast<int>(matches.size()), inliers,
                     ransac_seed.value_or(0));
}

std::vector<BenchmarkRecord> run_suite(
    const SuiteConfig& config, const std::function<void(const std::string&)>& log) {
  config.validate();
  std::mutex log_mutex;
  const auto emit = [&](const std::string& message) {
    if (log) {
      std::lock_guard lock(log_mutex);
      log(message);
    }
  };

  // Templates and their features, one extraction per class.
  const size_t n_classes = config.classes.size();
  std::vector<Image> templates(n_classes);
  std::vector<std::vector<Feature>> template_features(n_classes);
  std::vector<std::vector<Keypoint>> template_keypoints(n_classes);
  std::vector<bool> degenerate(n_classes, false);
  for (size_t c = 0; c < n_classes; ++c) {
    templates[c] = load_class_image(config.classes[c]);
    template_features[c] = extract_features(templates[c], config.sift);
    if (template_features[c].empty()) {
      degenerate[c] = true;
      emit("degenerate class '" + config.classes[c].name + "': no template features");
    } else if (config.outputs.viz_dir || config.ransac_enabled) {
      template_keypoints[c] = keypoints_of(template_features[c]);
    }
  }

  if (config.outputs.images_dir) {
    std::filesystem::create_directories(*config.outputs.images_dir);
  }
  if (config.outputs.viz_dir) {
    std::filesystem::create_directories(*config.outputs.viz_dir);
  }

  struct PairItem {
    size_t class_idx;
    size_t kind_idx;
    size_t level_idx;
  };
  std::vector<PairItem> items;
  for (size_t c = 0; c < n_classes; ++c) {
    if (degenerate[c]) continue;
    for (size_t k = 0; k < config.kinds.size(); ++k) {
      for (size_t l = 0; l < config.levels.size(); ++l) {
        items.push_back(PairItem{c, k, l});
      }
    }
  }

  std::vector<std::vector<BenchmarkRecord>> results(items.size());
  std::vector<std::exception_ptr> failures(items.size());
  std::atomic<size_t> cursor{0};

  const auto evaluate = [&](const PairItem& item) {
    const ClassSource& cls = config.classes[item.class_idx];
    const DeformationKind kind = config.kinds[item.kind_idx];
    const int level = config.levels[item.level_idx];
    const DeformationSpec spec = schedule(kind, level);
    const uint64_t cell_seed = derive_cell_seed(config.seed, cls.name, kind, level);
    const std::string stem = cls.name + "_" + kind_label(kind) + "-" + std::to_string(level);

    const DeformedImage deformed = apply_deformation(templates[item.class_idx], spec);
    if (config.outputs.images_dir) {
      write_png(deformed.image, *config.outputs.images_dir / (stem + ".png"));
    }
    // Identity deformations reproduce the template bit-exactly; extraction is
    // deterministic, so reuse its features instead of recomputing them.
    const std::vector<Feature> query_features =
        deformed.image == templates[item.class_idx]
            ? template_features[item.class_idx]
            : extract_features(deformed.image, config.sift);
    const std::vector<NearestNeighbor> table =
        nearest_neighbors(template_features[item.class_idx], query_features);

    std::vector<Keypoint> query_keypoints;
    if (config.outputs.viz_dir || config.ransac_enabled) {
      query_keypoints = keypoints_of(query_features);
    }
    const std::vector<Keypoint>& src_keypoints = template_keypoints[item.class_idx];

    std::vector<BenchmarkRecord> cell_records;
    for (double threshold : config.thresholds) {
      MatchOptions options;
      options.threshold = threshold;
      const std::vector<Match> matches = filter_matches(table, options);
      std::optional<int> inliers;
      if (config.ransac_enabled && matches.size() >= 4) {
        RansacOptions ropts;
        ropts.seed = cell_seed;
        const VerifiedMatches verified =
            ransac_homography(matches, src_keypoints, query_keypoints, ropts);
        inliers = static_cast<int>(verified.inliers.size());
      }
      cell_records.push_back(make_record(
          cls.name, spec, threshold,
          static_cast<int>(template_features[item.class_idx].size()),
          static_cast<int>(query_features.size()), static_cast<int>(matches.size()),
          inliers, cell_seed));
      if (config.outputs.viz_dir) {
        const Image composite =
            render_matches(templates[item.class_idx], deformed.image, matches,
                           src_keypoints, query_keypoints);
        write_png(composite, *config.outputs.viz_dir /
                                 (stem + "_t" + format_double(threshold) + ".png"));
      }
    }
    emit(stem + ": " + std::to_string(query_features.size()) + " query features");
    return cell_records;
  };

  const auto worker = [&] {
    while (true) {
      const size_t i = cursor.fetch_add(1);
      if (i >= items.size()) break;
      try {
        results[i] = evaluate(items[i]);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  unsigned jobs = config.jobs > 0 ? static_cast<unsigned>(config.jobs)
                                  : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, std::max<size_t>(items.size(), 1));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t + 1 < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<BenchmarkRecord> records;
  records.reserve(items.size() * config.thresholds.size());
  for (auto& cell : results) {
    for (auto& rec : cell) records.push_back(std::move(rec));
  }
  return records;
}

double aggregate(const std::vector<BenchmarkRecord>& records, DeformationKind kind,
                 double threshold, int level) {
  double sum = 0.0;
  int count = 0;
  for (const BenchmarkRecord& rec : records) {
    if (rec.kind == kind && rec.level == level && rec.threshold == threshold) {
      sum += rec.retained_pct;
      ++count;
    }
  }
  if (count == 0) {
    throw DataError("aggregate: no records match kind=" + kind_label(kind) +
                    " level=" + std::to_string(level) +
                    " threshold=" + format_double(threshold));
  }
  return sum / count;
}

Image render_matches(const Image& left, const Image& right,
                     const std::vector<Match>& matches,
                     const std::vector<Keypoint>& left_keypoints,
                     const std::vector<Keypoint>& right_keypoints) {
  const int width = left.width() + right.width();
  const int height = std::max(left.height(), right.height());
  Image out(width, height, 0.0f);
  for (int y = 0; y < left.height(); ++y) {
    const float* src = left.row(y);
    float* dst = out.row(y);
    std::copy(src, src + left.width(), dst);
  }
  for (int y = 0; y < right.height(); ++y) {
    const float* src = right.row(y);
    float* dst = out.row(y) + left.width();
    std::copy(src, src + right.width(), dst);
  }

  const double offset = left.width();
  for (const Match& m : matches) {
    if (m.source_index < 0 || m.source_index >= static_cast<int>(left_keypoints.size()) ||
        m.target_index < 0 || m.target_index >= static_cast<int>(right_keypoints.size())) {
      throw ParameterError("render_matches: match indices outside the keypoint lists");
    }
    const Keypoint& a = left_keypoints[m.source_index];
    const Keypoint& b = right_keypoints[m.target_index];
    draw_circle(out, a.x, a.y, std::max(2.0, 2.0 * a.sigma), 1.0f);
    draw_circle(out, b.x + offset, b.y, std::max(2.0, 2.0 * b.sigma), 1.0f);
    draw_line(out, a.x, a.y, b.x + offset, b.y, 1.0f);
  }
  return out;
}

std::string record_label(const BenchmarkRecord& record) {
  return kind_label(record.kind) + "-" + std::to_string(record.level) + "_sift " +
         format_double(record.threshold);
}

void write_report_csv(const std::vector<BenchmarkRecord>& records,
                      const std::filesystem::path& path) {
  if (records.empty()) throw DataError("write_report_csv: no records");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "class,kind,level,threshold,template_features,query_features,"
         "positive_matches,retained_pct,ransac_inliers,seed\n";
  for (const BenchmarkRecord& rec : records) {
    out << csv_field(rec.class_name) << ',' << kind_label(rec.kind) << ','
        << rec.level << ',' << format_double(rec.threshold) << ','
        << rec.template_features << ',' << rec.query_features << ','
        << rec.positive_matches << ',' << format_double(rec.retained_pct) << ',';
    if (rec.ransac_inliers) out << *rec.ransac_inliers;
    out << ',' << rec.seed << '\n';
  }
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

std::vector<BenchmarkRecord> read_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty CSV '" + path.string() + "'");

  const auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    fields.push_back(cur);
    return fields;
  };

  const auto parse_double = [&](const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw DataError("bad numeric field '" + s + "' in '" + path.string() + "'");
    }
    return v;
  };
  const auto parse_ll = [&](const std::string& s) {
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw DataError("bad integer field '" + s + "' in '" + path.string() + "'");
    }
    return v;
  };
  const auto parse_u64 = [&](const std::string& s) {
    uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw DataError("bad integer field '" + s + "' in '" + path.string() + "'");
    }
    return v;
  };

  std::vector<BenchmarkRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line);
    if (fields.size() != 10) {
      throw DataError("expected 10 CSV fields, got " + std::to_string(fields.size()));
    }
    BenchmarkRecord rec;
    rec.class_name = fields[0];
    rec.kind = parse_kind(fields[1]);
    rec.level = static_cast<int>(parse_ll(fields[2]));
    rec.threshold = parse_double(fields[3]);
    rec.template_features = static_cast<int>(parse_ll(fields[4]));
    rec.query_features = static_cast<int>(parse_ll(fields[5]));
    rec.positive_matches = static_cast<int>(parse_ll(fields[6]));
    rec.retained_pct = parse_double(fields[7]);
    if (!fields[8].empty()) rec.ransac_inliers = static_cast<int>(parse_ll(fields[8]));
    rec.seed = parse_u64(fields[9]);
    records.push_back(std::move(rec));
  }
  return records;
}

void write_report_markdown(const std::vector<BenchmarkRecord>& records,
                           const std::filesystem::path& path) {
  if (records.empty()) throw DataError("write_report_markdown: no records");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");

  // Group by class in first-appearance order.
  std::vector<std::string> class_order;
  std::map<std::string, std::vector<const BenchmarkRecord*>> grouped;
  for (const BenchmarkRecord& rec : records) {
    auto [it, inserted] = grouped.try_emplace(rec.class_name);
    if (inserted) class_order.push_back(rec.class_name);
    it->second.push_back(&rec);
  }

  out << "# Retained positive matches\n";
  for (const std::string& name : class_order) {
    out << "\n## " << name << "\n\n";
    out << "| Test | % of retained positive matches |\n";
    out << "| --- | --- |\n";
    for (const BenchmarkRecord* rec : grouped[name]) {
      out << "| " << record_label(*rec) << " | " << format_pct(rec->retained_pct)
          << "% |\n";
    }
  }
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

nlohmann::json suite_config_to_json(const SuiteConfig& config) {
  nlohmann::json classes = nlohmann::json::array();
  for (const ClassSource& cls : config.classes) {
    nlohmann::json entry{{"name", cls.name}};
    if (cls.path) entry["path"] = cls.path->string();
    if (cls.motif) entry["motif"] = motif_spec_to_json(*cls.motif);
    classes.push_back(std::move(entry));
  }
  nlohmann::json kinds = nlohmann::json::array();
  for (DeformationKind kind : config.kinds) kinds.push_back(kind_label(kind));

  nlohmann::json outputs;
  if (config.outputs.csv) outputs["csv"] = config.outputs.csv->string();
  if (config.outputs.report) outputs["report"] = config.outputs.report->string();
  if (config.outputs.images_dir) outputs["imagesDir"] = config.outputs.images_dir->string();
  if (config.outputs.viz_dir) outputs["vizDir"] = config.outputs.viz_dir->string();

  return nlohmann::json{{"classes", std::move(classes)},
                        {"kinds", std::move(kinds)},
                        {"levels", config.levels},
                        {"thresholds", config.thresholds},
                        {"siftParams", sift_params_to_json(config.sift)},
                        {"ransac", {{"enabled", config.ransac_enabled}, {"seed", config.seed}}},
                        {"jobs", config.jobs},
                        {"outputs", std::move(outputs)}};
}

SuiteConfig suite_config_from_json(const nlohmann::json& j) {
  SuiteConfig config;
  config.classes.clear();
  for (const auto& entry : j.at("classes")) {
    ClassSource cls;
    cls.name = entry.at("name").get<std::string>();
    if (entry.contains("path")) cls.path = entry.at("path").get<std::string>();
    if (entry.contains("motif")) cls.motif = motif_spec_from_json(entry.at("motif"));
    config.classes.push_back(std::move(cls));
  }
  if (j.contains("kinds")) {
    config.kinds.clear();
    for (const auto& kind : j.at("kinds")) {
      config.kinds.push_back(parse_kind(kind.get<std::string>()));
    }
  }
  if (j.contains("levels")) config.levels = j.at("levels").get<std::vector<int>>();
  if (j.contains("thresholds")) {
    config.thresholds = j.at("thresholds").get<std::vector<double>>();
  }
  if (j.contains("siftParams")) config.sift = sift_params_from_json(j.at("siftParams"));
  if (j.contains("ransac")) {
    const auto& ransac = j.at("ransac");
    config.ransac_enabled = ransac.value("enabled", false);
    config.seed = ransac.value("seed", static_cast<uint64_t>(0));
  }
  config.jobs = j.value("jobs", 0);
  if (j.contains("outputs")) {
    const auto& outputs = j.at("outputs");
    if (outputs.contains("csv")) config.outputs.csv = outputs.at("csv").get<std::string>();
    if (outputs.contains("report")) {
      config.outputs.report = outputs.at("report").get<std::string>();
    }
    if (outputs.contains("imagesDir")) {
      config.outputs.images_dir = outputs.at("imagesDir").get<std::string>();
    }
    if (outputs.contains("vizDir")) {
      config.outputs.viz_dir = outputs.at("vizDir").get<std::string>();
    }
  }
  config.validate();
  return config;
}

}  // namespace siftbench
