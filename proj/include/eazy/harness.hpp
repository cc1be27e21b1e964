#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eazy/baselines.hpp"
#include "eazy/ensemble.hpp"
#include "eazy/metrics.hpp"
#include "eazy/model_io.hpp"

namespace eazy {

enum class Method { EaZy, RSM, Bagging, AdaBoost, RandomForest };

Method parse_method_token(const std::string& token);
const char* method_token(Method m);
const char* method_display_name(Method m);  // paper-style column headers

// Free-form per-method parameters (name -> value strings, validated when
// the method config is built). Unknown names are rejected.
using MethodParams = std::map<std::string, std::string>;

struct ExperimentConfig {
  std::string train_path;
  std::string test_path;
  Method method = Method::EaZy;
  MethodParams params;
  std::size_t repeats = 10;
  std::uint64_t master_seed = 0;
  double validation_fraction = 0.2;
  bool redraw_split_per_repeat = true;
  bool standardize = true;
};

struct RepeatResult {
  EvaluationResult evaluation;
  std::optional<std::size_t> cluster_count;  // EaZy only
  std::uint64_t seed = 0;
};

struct ExperimentReport {
  std::string train_name;
  std::string test_name;
  Method method = Method::EaZy;
  std::size_t repeats = 0;
  std::vector<RepeatResult> per_repeat;
  // Arithmetic means over the repeats, fixed left-to-right summation.
  double mean_accuracy = 0.0;
  std::optional<double> mean_apcer;
  std::optional<double> mean_cluster_count;
};

// Trains one model the way one experiment repeat does: split off the
// validation fraction (driven by split_seed), fit the standardizer on the
// training part, train the method (driven by train_seed). Returned model
// carries the standardizer and predicts raw features.
AnyModel train_method(const LabeledDataset& train_file_data, Method method,
                      const MethodParams& params, double validation_fraction,
                      bool standardize, std::uint64_t split_seed, std::uint64_t train_seed,
                      std::optional<std::size_t>* cluster_count = nullptr);

// One (train, test, method) experiment: repeats r = 0..n-1 derive
// seed_r = derive_seed(master_seed, r); the validation split is re-drawn
// per repeat when the flag is set (otherwise every repeat reuses repeat 0's
// split); results are averaged in repeat order.
ExperimentReport run_experiment_on(const LabeledDataset& train, const LabeledDataset& test,
                                   const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config);

struct MatrixConfig {
  std::vector<std::pair<std::string, std::string>> pairs;  // (train, test) paths
  std::vector<Method> methods;
  std::map<Method, MethodParams> params;
  std::size_t repeats = 10;
  std::uint64_t master_seed = 0;
  double validation_fraction = 0.2;
  bool redraw_split_per_repeat = true;
  bool standardize = true;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct MatrixCell {
  std::string train_path;
  std::string test_path;
  Method method = Method::EaZy;
  std::optional<ExperimentReport> report;
  std::string error;  // nonempty when the cell failed
};

struct MatrixResult {
  std::vector<MatrixCell> cells;  // row-major: pairs outer, methods inner
  std::vector<Method> methods;
  std::size_t pair_count = 0;
  bool any_failed = false;
};

// Every (pair, method) cell runs as an independent experiment; a failing
// cell records its error without aborting the rest. Cells may execute on
// `threads` workers; the result is identical at any parallelism level.
MatrixResult run_matrix(const MatrixConfig& config);

// Flat key=value config for `bench`; '#' comments, blank lines ignored.
// Keys: pair (repeatable: "<train> <test>"), method (repeatable), repeats,
// master_seed, validation_fraction, redraw_split_per_repeat, standardize,
// threads, param.<method>.<name>. Relative paths resolve against base_dir.
MatrixConfig parse_matrix_config(std::istream& in, const std::string& base_dir = "");
MatrixConfig load_matrix_config(const std::string& path);

enum class ReportFormat { Csv, Markdown };

ReportFormat parse_report_format(const std::string& token);

// Deterministic report bytes. CSV: one row per cell under the header
// train,test,method,acc_mean,apcer_mean,clusters_mean,repeats (accuracy as
// a percentage, APCER as a fraction, both 2 decimals; failed cells leave
// the metric columns empty). Markdown: paper-shaped table, one row per
// dataset pair, Acc./APCER column pair per method, EaZy accuracy cells as
// "NN.NN(k)" with k the rounded mean cluster count, plus an Average row.
std::string emit_report(const MatrixResult& result, ReportFormat format);

}  // namespace eazy
