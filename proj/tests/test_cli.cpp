// End-to-end tests of the command-line tool: exit codes, printed output,
// and file side effects. The binary path comes from the build system.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CommandResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

CommandResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "cli_output.txt";
  const std::string cmd = std::string(SIFTBENCH_CLI_PATH) + " " + args + " > " +
                          log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CommandResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream buffer;
  buffer << in.rdbuf();
  result.output = buffer.str();
  return result;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("siftbench_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("cli workflows") {
  TempDir tmp;
  const fs::path motif = tmp.path / "motif.png";

  SUBCASE("synth then detect") {
    auto r = run_cli("synth --family chevron --size 128x128 --seed 1 --out " +
                         motif.string() + " --spec-json " + (tmp.path / "spec.json").string(),
                     tmp.path);
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(motif));
    REQUIRE(fs::exists(tmp.path / "spec.json"));

    const fs::path features = tmp.path / "features.json";
    r = run_cli("detect " + motif.string() + " --out " + features.string(), tmp.path);
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(features));
    std::ifstream in(features);
    const nlohmann::json j = nlohmann::json::parse(in);
    CHECK(j.at("features").size() > 0);
    CHECK(j.at("features").at(0).at("descriptor").size() == 128);
  }

  SUBCASE("self match prints a 100 percent retention") {
    auto r = run_cli("synth --family repetitive_tile --size 128x128 --seed 4 --out " +
                         motif.string(),
                     tmp.path);
    REQUIRE(r.exit_code == 0);
    r = run_cli("match " + motif.string() + " " + motif.string() + " --threshold 0.2",
                tmp.path);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("retained: 100.00%") != std::string::npos);
  }

  SUBCASE("match with ransac and visualization") {
    auto r = run_cli("synth --family repetitive_tile --size 128x128 --seed 4 --out " +
                         motif.string(),
                     tmp.path);
    REQUIRE(r.exit_code == 0);
    const fs::path deformed = tmp.path / "deformed.png";
    r = run_cli("deform " + motif.string() + " --kind zoom_rotation --level 2 --out " +
                    deformed.string() + " --gt " + (tmp.path / "gt.json").string(),
                tmp.path);
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(deformed));
    std::ifstream gt_in(tmp.path / "gt.json");
    const nlohmann::json gt = nlohmann::json::parse(gt_in);
    CHECK(gt.at("H").size() == 9);
    CHECK(gt.at("kind") == "Zoom_Rotation");

    const fs::path viz = tmp.path / "viz.png";
    r = run_cli("match " + motif.string() + " " + deformed.string() +
                    " --threshold 0.8 --ransac --seed 11 --viz " + viz.string() +
                    " --out " + (tmp.path / "matches.json").string(),
                tmp.path);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("inliers:") != std::string::npos);
    CHECK(fs::exists(viz));
    std::ifstream m_in(tmp.path / "matches.json");
    const nlohmann::json matches = nlohmann::json::parse(m_in);
    CHECK(matches.contains("H"));
    CHECK(matches.at("seed") == 11);
  }

  SUBCASE("deform level out of range is a usage error") {
    auto r = run_cli("synth --family chevron --size 128x128 --out " + motif.string(),
                     tmp.path);
    REQUIRE(r.exit_code == 0);
    r = run_cli("deform " + motif.string() + " --kind blur --level 9 --out " +
                    (tmp.path / "x.png").string(),
                tmp.path);
    CHECK(r.exit_code == 1);
  }

  SUBCASE("missing input file is an input error") {
    auto r = run_cli("detect /nonexistent/nope.png --out " + (tmp.path / "f.json").string(),
                     tmp.path);
    CHECK(r.exit_code == 2);
  }

  SUBCASE("unknown flag is a usage error") {
    auto r = run_cli("synth --family chevron --frobnicate --out " + motif.string(),
                     tmp.path);
    CHECK(r.exit_code == 1);
  }

  SUBCASE("bench and report on a small config") {
    nlohmann::json config{
        {"classes", nlohmann::json::array(
                        {{{"name", "tile"},
                          {"motif",
                           {{"family", "RepetitiveTile"},
                            {"width", 128},
                            {"height", 128},
                            {"seed", 4}}}}})},
        {"kinds", {"Blur", "Light"}},
        {"levels", {1, 2}},
        {"thresholds", {0.2, 0.8}},
    };
    const fs::path config_path = tmp.path / "config.json";
    std::ofstream(config_path) << config.dump(2);

    const fs::path csv = tmp.path / "r.csv";
    const fs::path md = tmp.path / "r.md";
    auto r = run_cli("bench --config " + config_path.string() + " --out " + csv.string() +
                         " --report " + md.string() + " --quiet",
                     tmp.path);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("records: 8") != std::string::npos);
    REQUIRE(fs::exists(csv));
    REQUIRE(fs::exists(md));

    std::ifstream csv_in(csv);
    size_t lines = 0;
    for (std::string line; std::getline(csv_in, line);) {
      if (!line.empty()) ++lines;
    }
    CHECK(lines == 9);  // header + 8 records

    r = run_cli("report " + csv.string() + " --kind blur --level 1 --threshold 0.2",
                tmp.path);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("mean retained: 100.00%") != std::string::npos);

    // Aggregating a kind that was never run is a data error.
    r = run_cli("report " + csv.string() + " --kind viewpoint --level 1 --threshold 0.2",
                tmp.path);
    CHECK(r.exit_code == 2);
  }

  SUBCASE("byte-identical outputs for identical invocations") {
    const fs::path a = tmp.path / "a.png";
    const fs::path b = tmp.path / "b.png";
    auto r = run_cli("synth --family non_geometric --size 128x128 --seed 9 --out " +
                         a.string(),
                     tmp.path);
    REQUIRE(r.exit_code == 0);
    r = run_cli("synth --family non_geometric --size 128x128 --seed 9 --out " + b.string(),
                tmp.path);
    REQUIRE(r.exit_code == 0);
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
  }
}
