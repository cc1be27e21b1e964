#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eazy/cli.hpp"
#include "eazy/harness.hpp"
#include "eazy/synthetic.hpp"

using namespace eazy;
namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static fs::path dir = [] {
    auto d = fs::temp_directory_path() / "eazy_harness_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string fixture_csv(std::string_view spec, std::uint64_t seed, const std::string& stem) {
  auto path = (workdir() / (stem + ".csv")).string();
  save_dataset_file(generate_synthetic(builtin_synthetic_spec(spec), seed), path);
  return path;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig fast_config(const std::string& train, const std::string& test,
                             Method method) {
  ExperimentConfig config;
  config.train_path = train;
  config.test_path = test;
  config.method = method;
  config.repeats = 2;
  config.master_seed = 7;
  if (method == Method::EaZy) config.params["k"] = "3";
  if (method == Method::AdaBoost) config.params["n_rounds"] = "5";
  if (method == Method::RandomForest) config.params["n_trees"] = "5";
  if (method == Method::RSM || method == Method::Bagging) config.params["n_members"] = "3";
  return config;
}

bool reports_equal(const ExperimentReport& a, const ExperimentReport& b) {
  if (a.per_repeat.size() != b.per_repeat.size()) return false;
  for (std::size_t i = 0; i < a.per_repeat.size(); ++i) {
    const auto& ra = a.per_repeat[i];
    const auto& rb = b.per_repeat[i];
    if (ra.seed != rb.seed) return false;
    if (ra.evaluation.accuracy != rb.evaluation.accuracy) return false;
    if (ra.evaluation.apcer != rb.evaluation.apcer) return false;
    if (ra.cluster_count != rb.cluster_count) return false;
  }
  return a.mean_accuracy == b.mean_accuracy && a.mean_apcer == b.mean_apcer &&
         a.mean_cluster_count == b.mean_cluster_count;
}

}  // namespace

TEST_CASE("run_experiment: repeats=1 means equal the single run") {
  auto train = fixture_csv("three-blobs", 1, "t1_train");
  auto test = fixture_csv("three-blobs-shift", 2, "t1_test");
  auto config = fast_config(train, test, Method::AdaBoost);
  config.repeats = 1;
  auto report = run_experiment(config);
  REQUIRE(report.per_repeat.size() == 1);
  CHECK(report.mean_accuracy == report.per_repeat[0].evaluation.accuracy);
  CHECK(report.mean_apcer == report.per_repeat[0].evaluation.apcer);
}

TEST_CASE("run_experiment: identical config reproduces identical reports") {
  auto train = fixture_csv("three-blobs", 3, "t2_train");
  auto test = fixture_csv("three-blobs-shift", 4, "t2_test");
  auto config = fast_config(train, test, Method::EaZy);
  auto a = run_experiment(config);
  auto b = run_experiment(config);
  CHECK(reports_equal(a, b));
}

TEST_CASE("run_experiment: means reproduce from per-repeat values") {
  auto train = fixture_csv("three-blobs", 5, "t3_train");
  auto test = fixture_csv("three-blobs-shift", 6, "t3_test");
  auto config = fast_config(train, test, Method::EaZy);
  config.repeats = 10;
  auto report = run_experiment(config);
  REQUIRE(report.per_repeat.size() == 10);
  double acc = 0.0;
  for (const auto& r : report.per_repeat) acc += r.evaluation.accuracy;
  CHECK(std::abs(report.mean_accuracy - acc / 10.0) <= 1e-12);
  REQUIRE(report.mean_cluster_count.has_value());
  double clusters = 0.0;
  for (const auto& r : report.per_repeat)
    clusters += static_cast<double>(*r.cluster_count);
  CHECK(std::abs(*report.mean_cluster_count - clusters / 10.0) <= 1e-12);
}

TEST_CASE("run_experiment: frozen split makes seed-free methods identical per repeat") {
  auto train = fixture_csv("three-blobs", 7, "t4_train");
  auto test = fixture_csv("three-blobs-shift", 8, "t4_test");
  auto config = fast_config(train, test, Method::AdaBoost);
  config.repeats = 3;
  config.redraw_split_per_repeat = false;
  auto report = run_experiment(config);
  for (const auto& r : report.per_repeat)
    CHECK(r.evaluation.accuracy == report.per_repeat[0].evaluation.accuracy);
}

TEST_CASE("run_experiment: dimension mismatch between train and test") {
  auto train = fixture_csv("three-blobs", 9, "t5_train");
  SyntheticSpec spec;
  spec.name = "d3";
  spec.blobs = {{{0.0, 0.0, 0.0}, 1.0, 30, 0.5, 0.5}};
  auto d3 = (workdir() / "t5_test.csv").string();
  save_dataset_file(generate_synthetic(spec, 1), d3);
  auto config = fast_config(train, d3, Method::AdaBoost);
  CHECK_THROWS_AS(run_experiment(config), DataError);
}

TEST_CASE("run_matrix: 1x1 matches run_experiment") {
  auto train = fixture_csv("three-blobs", 10, "m1_train");
  auto test = fixture_csv("three-blobs-shift", 11, "m1_test");

  MatrixConfig matrix;
  matrix.pairs = {{train, test}};
  matrix.methods = {Method::Bagging};
  matrix.params[Method::Bagging]["n_members"] = "3";
  matrix.repeats = 2;
  matrix.master_seed = 7;
  matrix.threads = 1;
  auto result = run_matrix(matrix);
  REQUIRE(result.cells.size() == 1);
  REQUIRE(result.cells[0].report.has_value());
  CHECK_FALSE(result.any_failed);

  auto standalone = run_experiment(fast_config(train, test, Method::Bagging));
  CHECK(reports_equal(*result.cells[0].report, standalone));
}

TEST_CASE("run_matrix: every cell matches its standalone experiment") {
  auto train_a = fixture_csv("three-blobs", 12, "m2_train_a");
  auto test_a = fixture_csv("three-blobs-shift", 13, "m2_test_a");
  auto train_b = fixture_csv("two-blobs", 14, "m2_train_b");
  auto test_b = fixture_csv("two-blobs", 15, "m2_test_b");

  MatrixConfig matrix;
  matrix.pairs = {{train_a, test_a}, {train_b, test_b}};
  matrix.methods = {Method::AdaBoost, Method::RandomForest};
  matrix.params[Method::AdaBoost]["n_rounds"] = "5";
  matrix.params[Method::RandomForest]["n_trees"] = "5";
  matrix.repeats = 2;
  matrix.master_seed = 7;
  matrix.threads = 1;
  auto result = run_matrix(matrix);
  REQUIRE(result.cells.size() == 4);

  std::size_t index = 0;
  for (const auto& pair : matrix.pairs) {
    for (Method method : matrix.methods) {
      REQUIRE(result.cells[index].report.has_value());
      auto standalone = run_experiment(fast_config(pair.first, pair.second, method));
      CHECK(reports_equal(*result.cells[index].report, standalone));
      ++index;
    }
  }
}

TEST_CASE("run_matrix: a failing cell does not poison the rest") {
  auto train = fixture_csv("three-blobs", 16, "m3_train");
  auto test = fixture_csv("three-blobs-shift", 17, "m3_test");
  SyntheticSpec spec;
  spec.name = "d3";
  spec.blobs = {{{0.0, 0.0, 0.0}, 1.0, 30, 0.5, 0.5}};
  auto bad = (workdir() / "m3_bad.csv").string();
  save_dataset_file(generate_synthetic(spec, 2), bad);

  MatrixConfig matrix;
  matrix.pairs = {{train, test}, {train, bad}};
  matrix.methods = {Method::AdaBoost, Method::Bagging};
  matrix.params[Method::AdaBoost]["n_rounds"] = "5";
  matrix.params[Method::Bagging]["n_members"] = "3";
  matrix.repeats = 1;
  matrix.threads = 1;
  auto result = run_matrix(matrix);
  REQUIRE(result.cells.size() == 4);
  CHECK(result.any_failed);
  CHECK(result.cells[0].report.has_value());
  CHECK(result.cells[1].report.has_value());
  CHECK_FALSE(result.cells[2].report.has_value());
  CHECK_FALSE(result.cells[3].report.has_value());
  CHECK(result.cells[2].error.find("dimension") != std::string::npos);
}

TEST_CASE("run_matrix: schedule-invariant across thread counts") {
  auto train = fixture_csv("three-blobs", 18, "m4_train");
  auto test = fixture_csv("three-blobs-shift", 19, "m4_test");
  auto train2 = fixture_csv("two-blobs", 20, "m4_train2");

  MatrixConfig matrix;
  matrix.pairs = {{train, test}, {train2, train2}};
  matrix.methods = {Method::AdaBoost, Method::RandomForest};
  matrix.params[Method::AdaBoost]["n_rounds"] = "5";
  matrix.params[Method::RandomForest]["n_trees"] = "5";
  matrix.repeats = 2;
  matrix.master_seed = 3;

  matrix.threads = 1;
  auto serial = emit_report(run_matrix(matrix), ReportFormat::Csv);
  matrix.threads = 4;
  auto parallel = emit_report(run_matrix(matrix), ReportFormat::Csv);
  CHECK(serial == parallel);
}

TEST_CASE("emit_report: csv layout and determinism") {
  auto train = fixture_csv("three-blobs", 21, "e1_train");
  auto test = fixture_csv("three-blobs-shift", 22, "e1_test");
  MatrixConfig matrix;
  matrix.pairs = {{train, test}};
  matrix.methods = {Method::EaZy};
  matrix.params[Method::EaZy]["k"] = "3";
  matrix.repeats = 2;
  matrix.threads = 1;
  auto result = run_matrix(matrix);
  auto a = emit_report(result, ReportFormat::Csv);
  auto b = emit_report(result, ReportFormat::Csv);
  CHECK(a == b);
  CHECK(a.rfind("train,test,method,acc_mean,apcer_mean,clusters_mean,repeats\n", 0) == 0);
  CHECK(a.find("e1_train,e1_test,eazy,") != std::string::npos);
}

TEST_CASE("emit_report: eazy markdown cell carries the rounded cluster count") {
  MatrixResult result;
  result.methods = {Method::EaZy};
  result.pair_count = 1;
  MatrixCell cell;
  cell.method = Method::EaZy;
  ExperimentReport report;
  report.train_name = "Bio";
  report.test_name = "Ital2013";
  report.method = Method::EaZy;
  report.repeats = 10;
  report.mean_accuracy = 0.954;
  report.mean_apcer = 0.06;
  report.mean_cluster_count = 11.0;
  cell.report = report;
  result.cells.push_back(cell);

  auto markdown = emit_report(result, ReportFormat::Markdown);
  CHECK(markdown.find("95.40(11)") != std::string::npos);
  CHECK(markdown.find("| Bio-Ital2013 |") != std::string::npos);
  CHECK(markdown.find("0.06") != std::string::npos);
}

TEST_CASE("matrix config: parse and validation") {
  std::istringstream good(
      "# benchmark\n"
      "pair = a.csv b.csv\n"
      "pair = c.csv d.csv\n"
      "method = eazy\n"
      "method = rf\n"
      "repeats = 4\n"
      "master_seed = 11\n"
      "validation_fraction = 0.25\n"
      "redraw_split_per_repeat = false\n"
      "standardize = true\n"
      "threads = 2\n"
      "param.eazy.k = 3\n"
      "param.rf.n_trees = 7\n");
  auto config = parse_matrix_config(good, "/base");
  CHECK(config.pairs.size() == 2);
  CHECK(config.pairs[0].first == "/base/a.csv");
  CHECK(config.methods.size() == 2);
  CHECK(config.repeats == 4);
  CHECK(config.master_seed == 11);
  CHECK(config.validation_fraction == 0.25);
  CHECK_FALSE(config.redraw_split_per_repeat);
  CHECK(config.threads == 2);
  CHECK(config.params[Method::EaZy]["k"] == "3");
  CHECK(config.params[Method::RandomForest]["n_trees"] == "7");

  std::istringstream unknown("pair = a b\nmethod = eazy\nbogus = 1\n");
  CHECK_THROWS_AS(parse_matrix_config(unknown, ""), FormatError);
  std::istringstream no_pairs("method = eazy\n");
  CHECK_THROWS_AS(parse_matrix_config(no_pairs, ""), FormatError);
  std::istringstream bad_pair("pair = only_one\nmethod = eazy\n");
  CHECK_THROWS_AS(parse_matrix_config(bad_pair, ""), FormatError);
}

TEST_CASE("train_method: unknown parameter is rejected") {
  auto train = generate_synthetic(builtin_synthetic_spec("two-blobs"), 50);
  MethodParams params{{"bogus", "1"}};
  CHECK_THROWS_AS(
      train_method(train, Method::Bagging, params, 0.2, true, 1, 2, nullptr), DataError);
}

TEST_CASE("cli: synth -> train -> predict -> eval happy path") {
  auto data_path = (workdir() / "cli_data.csv").string();
  auto model_path = (workdir() / "cli_model.json").string();
  auto out_path = (workdir() / "cli_pred.csv").string();

  CHECK(cli_main({"synth", "--spec", "two-blobs", "--seed", "5", "--out", data_path}) == 0);
  CHECK(fs::exists(data_path));
  CHECK(cli_main({"train", "--method", "eazy", "--train", data_path, "--model-out",
                  model_path, "--seed", "3", "--param", "k=2"}) == 0);
  CHECK(fs::exists(model_path));
  CHECK(cli_main({"predict", "--model", model_path, "--data", data_path, "--out",
                  out_path}) == 0);
  auto predictions = read_file(out_path);
  CHECK(predictions.rfind("prediction\n", 0) == 0);
  CHECK(std::count(predictions.begin(), predictions.end(), '\n') == 201);
  CHECK(cli_main({"eval", "--model", model_path, "--data", data_path}) == 0);
}

TEST_CASE("cli: usage and data errors map to exit codes") {
  CHECK(cli_main({"train", "--method", "eazy"}) == 1);          // missing required flags
  CHECK(cli_main({"bogus-subcommand"}) == 1);
  auto missing = (workdir() / "missing.csv").string();
  auto model_path = (workdir() / "cli_err_model.json").string();
  CHECK(cli_main({"train", "--method", "eazy", "--train", missing, "--model-out",
                  model_path}) == 2);
  CHECK(cli_main({"synth", "--spec", "no-such-spec", "--seed", "1", "--out",
                  (workdir() / "x.csv").string()}) == 2);
}

TEST_CASE("cli: bench reruns emit byte-identical reports") {
  auto train = fixture_csv("three-blobs", 23, "b1_train");
  auto test = fixture_csv("three-blobs-shift", 24, "b1_test");
  auto matrix_path = (workdir() / "b1_matrix.conf").string();
  {
    std::ofstream conf(matrix_path);
    conf << "pair = b1_train.csv b1_test.csv\n"
         << "method = eazy\nmethod = adaboost\n"
         << "repeats = 2\nmaster_seed = 5\n"
         << "param.eazy.k = 3\nparam.adaboost.n_rounds = 5\n";
  }
  auto out_a = (workdir() / "b1_report_a.csv").string();
  auto out_b = (workdir() / "b1_report_b.csv").string();
  CHECK(cli_main({"bench", "--matrix", matrix_path, "--out", out_a}) == 0);
  CHECK(cli_main({"bench", "--matrix", matrix_path, "--out", out_b}) == 0);
  CHECK(read_file(out_a) == read_file(out_b));

  auto out_md = (workdir() / "b1_report.md").string();
  CHECK(cli_main({"bench", "--matrix", matrix_path, "--out", out_md, "--format",
                  "markdown"}) == 0);
  auto markdown = read_file(out_md);
  CHECK(markdown.find("| Dataset |") != std::string::npos);
  CHECK(markdown.find("EaZy Acc.") != std::string::npos);
}
