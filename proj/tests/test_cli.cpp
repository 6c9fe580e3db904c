// End-to-end tests that drive the installed CLI binary (path injected via
// the MAG_CLI_BIN compile definition) through temp directories.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

RunResult run_cli(const fs::path& dir, const std::string& args) {
  const fs::path out_path = dir / "stdout.txt";
  const fs::path err_path = dir / "stderr.txt";
  const std::string command = std::string(MAG_CLI_BIN) + " " + args + " > " +
                              out_path.string() + " 2> " + err_path.string();
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) {
    path = fs::current_path() / ("cli_test_" + name);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

constexpr const char* kPredCsv =
    "patient_id,patch_id,prob\n"
    "p1,a,0.9\n"
    "p1,b,0.8\n"
    "p2,a,0.1\n"
    "p2,b,0.2\n"
    "p3,a,0.95\n";

constexpr const char* kLabelCsv =
    "patient_id,label\n"
    "p1,MSIMUT\n"
    "p2,MSS\n"
    "p3,MSIMUT\n";

}  // namespace

TEST_CASE("validate summarizes a clean cohort", "[cli]") {
  TempDir dir("validate_ok");
  spit(dir.path / "pred.csv", kPredCsv);
  spit(dir.path / "labels.csv", kLabelCsv);
  const auto result = run_cli(
      dir.path, "validate " + (dir.path / "pred.csv").string() + " " +
                    (dir.path / "labels.csv").string());
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("patients:           3") != std::string::npos);
  CHECK(result.out.find("patches:            5") != std::string::npos);
  CHECK(result.out.find("MSIMUT patients:    2") != std::string::npos);
}

TEST_CASE("validate rejects an out-of-range probability with its line", "[cli]") {
  TempDir dir("validate_bad");
  spit(dir.path / "pred.csv", "patient_id,patch_id,prob\np1,a,1.5\n");
  spit(dir.path / "labels.csv", kLabelCsv);
  const auto result = run_cli(
      dir.path, "validate " + (dir.path / "pred.csv").string() + " " +
                    (dir.path / "labels.csv").string());
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("line 2") != std::string::npos);
}

TEST_CASE("validate enforces strict labels when asked", "[cli]") {
  TempDir dir("validate_strict");
  spit(dir.path / "pred.csv", kPredCsv);
  spit(dir.path / "labels.csv", "patient_id,label\np1,MSIMUT\np2,MSS\n");
  const std::string base = "validate " + (dir.path / "pred.csv").string() + " " +
                           (dir.path / "labels.csv").string();
  CHECK(run_cli(dir.path, base).exit_code == 0);

  const auto strict = run_cli(dir.path, base + " --strict-labels");
  CHECK(strict.exit_code == 2);
  CHECK(strict.err.find("p3") != std::string::npos);
}

TEST_CASE("featurize emits the documented header and 9 significant digits",
          "[cli]") {
  TempDir dir("featurize");
  spit(dir.path / "pred.csv",
       "patient_id,patch_id,prob\np1,a,0.05\np1,b,0.15\np1,c,0.95\np1,d,0.97\n"
       "p2,a,0.333333333333\np2,b,0.333333333333\np2,c,0.5\n");
  spit(dir.path / "labels.csv", "patient_id,label\np1,MSIMUT\np2,MSS\n");
  const auto result = run_cli(
      dir.path, "featurize " + (dir.path / "pred.csv").string() + " " +
                    (dir.path / "labels.csv").string());
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("patient_id,label,b0,b1,b2,b3,b4,b5,b6,b7,b8,b9\n") == 0);
  CHECK(result.out.find("p1,MSIMUT,0.25,0.25,0,0,0,0,0,0,0,0.5") !=
        std::string::npos);
  // 2/3 printed with 9 significant digits
  CHECK(result.out.find("0.666666667") != std::string::npos);
}

TEST_CASE("synth is byte-deterministic and feeds the pipeline", "[cli]") {
  TempDir dir("synth");
  const std::string p1 = (dir.path / "a_pred.csv").string();
  const std::string l1 = (dir.path / "a_lab.csv").string();
  const std::string p2 = (dir.path / "b_pred.csv").string();
  const std::string l2 = (dir.path / "b_lab.csv").string();
  const std::string flags = " --scenario separable --seed 9";
  CHECK(run_cli(dir.path, "synth" + flags + " --out-predictions " + p1 +
                              " --out-labels " + l1)
            .exit_code == 0);
  CHECK(run_cli(dir.path, "synth" + flags + " --out-predictions " + p2 +
                              " --out-labels " + l2)
            .exit_code == 0);
  CHECK(slurp(p1) == slurp(p2));
  CHECK(slurp(l1) == slurp(l2));
  CHECK(slurp(p1).rfind("patient_id,patch_id,prob\n", 0) == 0);
  CHECK(slurp(l1).rfind("patient_id,label\n", 0) == 0);

  const auto validate = run_cli(dir.path, "validate " + p1 + " " + l1);
  CHECK(validate.exit_code == 0);
  CHECK(validate.out.find("patients:           80") != std::string::npos);
}

TEST_CASE("train/compare round trip on a separable cohort", "[cli]") {
  TempDir dir("train_compare");
  const std::string pred = (dir.path / "pred.csv").string();
  const std::string lab = (dir.path / "lab.csv").string();
  const std::string model = (dir.path / "model.json").string();
  const std::string manifest = (dir.path / "split.csv").string();
  REQUIRE(run_cli(dir.path, "synth --scenario separable --seed 4 "
                            "--out-predictions " + pred + " --out-labels " + lab)
              .exit_code == 0);

  const auto train = run_cli(dir.path, "train " + pred + " " + lab +
                                           " --seed 4 --out " + model +
                                           " --manifest-out " + manifest);
  CHECK(train.exit_code == 0);
  CHECK(train.err.find("validation BACC 1") != std::string::npos);
  const auto summary = nlohmann::json::parse(train.out);
  CHECK(summary.at("validation_bacc") == 1.0);

  // byte-identical rerun
  const std::string model2 = (dir.path / "model2.json").string();
  const std::string manifest2 = (dir.path / "split2.csv").string();
  REQUIRE(run_cli(dir.path, "train " + pred + " " + lab + " --seed 4 --out " +
                                model2 + " --manifest-out " + manifest2)
              .exit_code == 0);
  CHECK(slurp(model) == slurp(model2));
  CHECK(slurp(manifest) == slurp(manifest2));

  const auto compare = run_cli(dir.path, "compare " + pred + " " + lab +
                                             " --model " + model +
                                             " --manifest " + manifest);
  CHECK(compare.exit_code == 0);
  const auto report = nlohmann::json::parse(compare.out);
  for (const auto& method : {"counting", "averaging", "mag"}) {
    CHECK(report.at("methods").at(method).at("f1") == 1.0);
    CHECK(report.at("methods").at(method).at("bacc") == 1.0);
  }
  CHECK(compare.err.find("BACC") != std::string::npos);

  // the manifest split sizes follow the 50/20/30 default
  std::size_t trains = 0;
  std::size_t vals = 0;
  std::size_t tests = 0;
  std::istringstream lines(slurp(manifest));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "patient_id,split");
  while (std::getline(lines, line)) {
    if (line.ends_with(",train")) ++trains;
    if (line.ends_with(",val")) ++vals;
    if (line.ends_with(",test")) ++tests;
  }
  CHECK(trains == 40);
  CHECK(vals == 16);
  CHECK(tests == 24);
}

TEST_CASE("predict labels patients with the trained model", "[cli]") {
  TempDir dir("predict");
  const std::string pred = (dir.path / "pred.csv").string();
  const std::string lab = (dir.path / "lab.csv").string();
  const std::string model = (dir.path / "model.json").string();
  REQUIRE(run_cli(dir.path, "synth --scenario separable --seed 5 "
                            "--out-predictions " + pred + " --out-labels " + lab)
              .exit_code == 0);
  REQUIRE(run_cli(dir.path, "train " + pred + " " + lab + " --seed 5 --out " +
                                model)
              .exit_code == 0);

  const auto result = run_cli(dir.path, "predict " + pred + " --model " + model);
  CHECK(result.exit_code == 0);
  CHECK(result.out.rfind("patient_id,decision_value,predicted_label\n", 0) == 0);
  std::istringstream lines(result.out);
  std::string line;
  std::getline(lines, line);
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    if (line.rfind("msi_", 0) == 0) CHECK(line.ends_with(",MSIMUT"));
    if (line.rfind("mss_", 0) == 0) CHECK(line.ends_with(",MSS"));
  }
  CHECK(rows == 80);
}

TEST_CASE("train exits 3 on a single-class cohort", "[cli]") {
  TempDir dir("train_single");
  spit(dir.path / "pred.csv",
       "patient_id,patch_id,prob\np1,a,0.9\np2,a,0.8\np3,a,0.7\np4,a,0.6\n");
  spit(dir.path / "labels.csv",
       "patient_id,label\np1,MSIMUT\np2,MSIMUT\np3,MSIMUT\np4,MSIMUT\n");
  const auto result = run_cli(
      dir.path, "train " + (dir.path / "pred.csv").string() + " " +
                    (dir.path / "labels.csv").string() + " --out " +
                    (dir.path / "m.json").string());
  CHECK(result.exit_code == 3);
}

TEST_CASE("compare exits 2 when the manifest names an unknown patient", "[cli]") {
  TempDir dir("compare_missing");
  const std::string pred = (dir.path / "pred.csv").string();
  const std::string lab = (dir.path / "lab.csv").string();
  const std::string model = (dir.path / "model.json").string();
  const std::string manifest = (dir.path / "split.csv").string();
  REQUIRE(run_cli(dir.path, "synth --scenario separable --seed 6 "
                            "--out-predictions " + pred + " --out-labels " + lab)
              .exit_code == 0);
  REQUIRE(run_cli(dir.path, "train " + pred + " " + lab + " --seed 6 --out " +
                                model + " --manifest-out " + manifest)
              .exit_code == 0);

  std::string manifest_text = slurp(manifest);
  manifest_text += "ghost,test\n";
  spit(dir.path / "bad_split.csv", manifest_text);
  const auto result = run_cli(dir.path, "compare " + pred + " " + lab +
                                            " --model " + model + " --manifest " +
                                            (dir.path / "bad_split.csv").string());
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("ghost") != std::string::npos);
}

TEST_CASE("compare exits 3 when the test split is single-class", "[cli]") {
  TempDir dir("compare_one_class");
  const std::string pred = (dir.path / "pred.csv").string();
  const std::string lab = (dir.path / "lab.csv").string();
  const std::string model = (dir.path / "model.json").string();
  REQUIRE(run_cli(dir.path, "synth --scenario separable --seed 8 "
                            "--out-predictions " + pred + " --out-labels " + lab)
              .exit_code == 0);
  REQUIRE(run_cli(dir.path, "train " + pred + " " + lab + " --seed 8 --out " +
                                model)
              .exit_code == 0);
  spit(dir.path / "one_class.csv",
       "patient_id,split\nmss_0001,test\nmss_0002,test\n");
  const auto result = run_cli(dir.path, "compare " + pred + " " + lab +
                                            " --model " + model + " --manifest " +
                                            (dir.path / "one_class.csv").string());
  CHECK(result.exit_code == 3);
}

TEST_CASE("train honors custom ratios and grids", "[cli]") {
  TempDir dir("train_flags");
  const std::string pred = (dir.path / "pred.csv").string();
  const std::string lab = (dir.path / "lab.csv").string();
  const std::string model = (dir.path / "model.json").string();
  const std::string manifest = (dir.path / "split.csv").string();
  REQUIRE(run_cli(dir.path, "synth --scenario separable --seed 3 "
                            "--out-predictions " + pred + " --out-labels " + lab)
              .exit_code == 0);
  const auto train = run_cli(
      dir.path, "train " + pred + " " + lab +
                    " --seed 3 --ratios 0.6,0.2,0.2 --grid-c 2 --grid-gamma 0.5"
                    " --kernel rbf --out " + model + " --manifest-out " + manifest);
  REQUIRE(train.exit_code == 0);
  const auto summary = nlohmann::json::parse(train.out);
  CHECK(summary.at("kernel") == "rbf");
  CHECK(summary.at("c") == 2.0);
  CHECK(summary.at("gamma") == 0.5);

  // 0.6/0.2/0.2 over 40 per class
  std::size_t trains = 0;
  std::istringstream lines(slurp(manifest));
  std::string line;
  while (std::getline(lines, line)) {
    if (line.ends_with(",train")) ++trains;
  }
  CHECK(trains == 48);

  const auto bad = run_cli(dir.path, "train " + pred + " " + lab +
                                         " --ratios 0.5,0.5 --out " + model);
  CHECK(bad.exit_code == 2);
}

TEST_CASE("equal-mean pipeline shows the histogram advantage end to end",
          "[cli]") {
  TempDir dir("equal_mean");
  const std::string pred = (dir.path / "pred.csv").string();
  const std::string lab = (dir.path / "lab.csv").string();
  const std::string model = (dir.path / "model.json").string();
  const std::string manifest = (dir.path / "split.csv").string();
  REQUIRE(run_cli(dir.path, "synth --scenario equal-mean --seed 1 "
                            "--out-predictions " + pred + " --out-labels " + lab)
              .exit_code == 0);
  REQUIRE(run_cli(dir.path, "train " + pred + " " + lab + " --seed 1 --out " +
                                model + " --manifest-out " + manifest)
              .exit_code == 0);
  const auto result = run_cli(dir.path, "compare " + pred + " " + lab +
                                            " --model " + model + " --manifest " +
                                            manifest);
  REQUIRE(result.exit_code == 0);
  const auto report = nlohmann::json::parse(result.out);
  const double mag_bacc = report.at("methods").at("mag").at("bacc");
  const double avg_bacc = report.at("methods").at("averaging").at("bacc");
  CHECK(mag_bacc - avg_bacc >= 0.3);
}

TEST_CASE("unknown flags exit with the input-error code", "[cli]") {
  TempDir dir("usage");
  CHECK(run_cli(dir.path, "validate --no-such-flag a b").exit_code == 2);
  CHECK(run_cli(dir.path, "--help").exit_code == 0);
}
