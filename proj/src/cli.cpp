#include "eazy/cli.hpp"

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "eazy/harness.hpp"
#include "eazy/synthetic.hpp"

namespace eazy {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

MethodParams parse_cli_params(const std::vector<std::string>& raw) {
  MethodParams params;
  for (const auto& entry : raw) {
    std::size_t eq = entry.find('=');
    if (eq == std::string::npos || eq == 0)
      throw CLI::ValidationError("--param", "expected name=value, got '" + entry + "'");
    params[entry.substr(0, eq)] = entry.substr(eq + 1);
  }
  return params;
}

int run_train(const std::string& method_token, const std::string& train_path,
              const std::string& model_out, std::uint64_t seed, double val_fraction,
              bool no_standardize, const std::vector<std::string>& raw_params) {
  Method method = parse_method_token(method_token);
  auto params = parse_cli_params(raw_params);
  auto data = load_dataset_file(train_path);
  std::optional<std::size_t> clusters;
  auto model = train_method(data, method, params, val_fraction, !no_standardize,
                            derive_seed(seed, 0), derive_seed(seed, 1), &clusters);
  save_model_file(model, model_out);
  std::cout << "trained " << method_token << " on " << data.name() << " (" << data.size()
            << " rows, d=" << data.dim() << ")";
  if (clusters) std::cout << ", clusters=" << *clusters;
  std::cout << ", model written to " << model_out << "\n";
  return kExitOk;
}

int run_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path) {
  auto model = load_model_file(model_path);
  auto data = load_dataset_file(data_path);
  auto predictions = model.predict_batch(data);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw DataError("cannot open output file '" + out_path + "'");
  out << "prediction\n";
  for (Label l : predictions) out << label_token(l) << '\n';
  out.flush();
  if (!out) throw DataError("failed writing predictions to '" + out_path + "'");
  return kExitOk;
}

int run_eval(const std::string& model_path, const std::string& data_path) {
  auto model = load_model_file(model_path);
  auto data = load_dataset_file(data_path);
  auto result = evaluate(model.predict_batch(data), data.labels());
  std::cout << "dataset: " << data.name() << " (" << data.size() << " rows)\n"
            << "method: " << model.method_token() << "\n"
            << "accuracy: " << result.accuracy << "\n"
            << "apcer: ";
  if (result.apcer)
    std::cout << *result.apcer << "\n";
  else
    std::cout << "n/a (no attack rows)\n";
  std::cout << "counts: true_bonafide=" << result.true_bonafide
            << " false_bonafide=" << result.false_bonafide
            << " true_attack=" << result.true_attack
            << " false_attack=" << result.false_attack << "\n";
  return kExitOk;
}

int run_bench(const std::string& matrix_path, const std::string& out_path,
              const std::string& format_token, int threads_override) {
  auto config = load_matrix_config(matrix_path);
  if (threads_override >= 0) config.threads = static_cast<unsigned>(threads_override);
  auto format = parse_report_format(format_token);
  auto result = run_matrix(config);
  std::string report = emit_report(result, format);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw DataError("cannot open report file '" + out_path + "'");
  out << report;
  out.flush();
  if (!out) throw DataError("failed writing report to '" + out_path + "'");
  if (result.any_failed) {
    for (const auto& cell : result.cells)
      if (!cell.error.empty())
        std::cerr << "cell " << cell.train_path << " -> " << cell.test_path << " ["
                  << method_token(cell.method) << "] failed: " << cell.error << "\n";
    std::cerr << "bench finished with failed cells; report written to " << out_path << "\n";
    return kExitData;
  }
  std::cout << "report written to " << out_path << " (" << result.cells.size()
            << " cells)\n";
  return kExitOk;
}

int run_synth(const std::string& spec_name, std::uint64_t seed, const std::string& out_path) {
  auto spec = builtin_synthetic_spec(spec_name);
  auto dataset = generate_synthetic(spec, seed);
  save_dataset_file(dataset, out_path);
  std::cout << "wrote " << dataset.size() << " rows (d=" << dataset.dim() << ") to "
            << out_path << "\n";
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"EaZy learning: adaptive cluster-weighted ensembles for liveness detection"};
  app.require_subcommand(1);

  std::string method = "eazy", train_path, model_out;
  std::uint64_t seed = 0;
  double val_fraction = 0.2;
  bool no_standardize = false;
  std::vector<std::string> raw_params;
  auto* train = app.add_subcommand("train", "Train a model and write a model file");
  train->add_option("--method", method, "eazy|rsm|bagging|adaboost|rf")
      ->check(CLI::IsMember({"eazy", "rsm", "bagging", "adaboost", "rf"}));
  train->add_option("--train", train_path, "Training dataset CSV")->required();
  train->add_option("--model-out", model_out, "Output model file")->required();
  train->add_option("--seed", seed, "Master seed (default 0)");
  train->add_option("--val-fraction", val_fraction, "Validation hold-out fraction")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  train->add_flag("--no-standardize", no_standardize, "Skip feature standardization");
  train->add_option("--param", raw_params, "Method parameter name=value (repeatable)");

  std::string model_path, data_path, out_path;
  auto* predict = app.add_subcommand("predict", "Predict labels for a dataset");
  predict->add_option("--model", model_path, "Model file")->required();
  predict->add_option("--data", data_path, "Dataset CSV")->required();
  predict->add_option("--out", out_path, "Output prediction file")->required();

  std::string eval_model, eval_data;
  auto* eval = app.add_subcommand("eval", "Evaluate a model on a labeled dataset");
  eval->add_option("--model", eval_model, "Model file")->required();
  eval->add_option("--data", eval_data, "Dataset CSV")->required();

  std::string matrix_path, report_out, format = "csv";
  int threads_override = -1;
  auto* bench = app.add_subcommand("bench", "Run a benchmark matrix and emit a report");
  bench->add_option("--matrix", matrix_path, "Matrix config file")->required();
  bench->add_option("--out", report_out, "Report output file")->required();
  bench->add_option("--format", format, "csv|markdown");
  bench->add_option("--threads", threads_override, "Worker threads (overrides config)");

  std::string spec_name, synth_out;
  std::uint64_t synth_seed = 0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset CSV");
  synth->add_option("--spec", spec_name, "single-blob|two-blobs|three-blobs|three-blobs-shift|xor")
      ->required();
  synth->add_option("--seed", synth_seed, "Generator seed (default 0)");
  synth->add_option("--out", synth_out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed())
      return run_train(method, train_path, model_out, seed, val_fraction, no_standardize,
                       raw_params);
    if (predict->parsed()) return run_predict(model_path, data_path, out_path);
    if (eval->parsed()) return run_eval(eval_model, eval_data);
    if (bench->parsed()) return run_bench(matrix_path, report_out, format, threads_override);
    if (synth->parsed()) return run_synth(spec_name, synth_seed, synth_out);
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("eazy");
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace eazy
