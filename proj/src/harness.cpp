#include "eazy/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace eazy {

Method parse_method_token(const std::string& token) {
  if (token == "eazy") return Method::EaZy;
  if (token == "rsm") return Method::RSM;
  if (token == "bagging") return Method::Bagging;
  if (token == "adaboost") return Method::AdaBoost;
  if (token == "rf" || token == "randomforest") return Method::RandomForest;
  throw DataError("unknown method '" + token + "'");
}

const char* method_token(Method m) {
  switch (m) {
    case Method::EaZy: return "eazy";
    case Method::RSM: return "rsm";
    case Method::Bagging: return "bagging";
    case Method::AdaBoost: return "adaboost";
    case Method::RandomForest: return "rf";
  }
  return "?";
}

const char* method_display_name(Method m) {
  switch (m) {
    case Method::EaZy: return "EaZy";
    case Method::RSM: return "RSM(SMO)";
    case Method::Bagging: return "Bagging(SMO)";
    case Method::AdaBoost: return "AdaBoost";
    case Method::RandomForest: return "RF";
  }
  return "?";
}

namespace {

class ParamReader {
 public:
  explicit ParamReader(const MethodParams& params) : params_(params) {}

  template <typename T>
  T get(const std::string& name, T fallback) {
    seen_.insert(name);
    auto it = params_.find(name);
    if (it == params_.end()) return fallback;
    T value{};
    std::istringstream ss(it->second);
    ss >> value;
    if (ss.fail() || !ss.eof())
      throw DataError("invalid value '" + it->second + "' for parameter '" + name + "'");
    return value;
  }

  std::string get_string(const std::string& name, std::string fallback) {
    seen_.insert(name);
    auto it = params_.find(name);
    return it == params_.end() ? std::move(fallback) : it->second;
  }

  void finish(const std::string& method) const {
    for (const auto& [name, value] : params_)
      if (!seen_.count(name))
        throw DataError("unknown parameter '" + name + "' for method " + method);
  }

 private:
  const MethodParams& params_;
  std::set<std::string> seen_;
};

LearnerConfig learner_config_from(ParamReader& reader) {
  LearnerConfig learner;
  auto kind = reader.get_string("learner", "svm");
  if (kind == "svm")
    learner.kind = LearnerKind::LinearSVM;
  else if (kind == "cart")
    learner.kind = LearnerKind::Tree;
  else if (kind == "stump")
    learner.kind = LearnerKind::Stump;
  else if (kind == "constant")
    learner.kind = LearnerKind::Constant;
  else
    throw DataError("unknown base learner '" + kind + "'");
  learner.smo.C = reader.get("C", learner.smo.C);
  learner.smo.tol = reader.get("svm_tol", learner.smo.tol);
  learner.smo.max_passes = reader.get("max_passes", learner.smo.max_passes);
  learner.cart.max_depth = reader.get("max_depth", learner.cart.max_depth);
  learner.cart.min_leaf = reader.get("min_leaf", learner.cart.min_leaf);
  return learner;
}

EazyConfig eazy_config_from(const MethodParams& params, bool standardize) {
  ParamReader reader(params);
  EazyConfig config;
  config.standardize = standardize;
  config.learner = learner_config_from(reader);
  auto k = reader.get_string("k", "auto");
  if (k != "auto") {
    std::size_t forced = 0;
    auto [p, ec] = std::from_chars(k.data(), k.data() + k.size(), forced);
    if (ec != std::errc() || p != k.data() + k.size() || forced < 1)
      throw DataError("invalid value '" + k + "' for parameter 'k'");
    config.clustering.forced_k = forced;
  }
  config.clustering.select.k_max = reader.get<std::size_t>("k_max", 0);
  config.clustering.select.folds = reader.get<std::size_t>("folds", 10);
  config.clustering.partition.min_cluster_size =
      reader.get<std::size_t>("min_cluster", 5);
  config.clustering.select.em = config.clustering.em;
  reader.finish("eazy");
  return config;
}

}  // namespace

AnyModel train_method(const LabeledDataset& train_file_data, Method method,
                      const MethodParams& params, double validation_fraction,
                      bool standardize, std::uint64_t split_seed, std::uint64_t train_seed,
                      std::optional<std::size_t>* cluster_count) {
  auto split = stratified_split(train_file_data, validation_fraction, split_seed);
  AnyModel model;
  if (cluster_count) cluster_count->reset();

  if (method == Method::EaZy) {
    auto config = eazy_config_from(params, standardize);
    auto ensemble = eazy_train(split.train, split.validation, config, train_seed);
    if (cluster_count) *cluster_count = ensemble.cluster_count;
    model.model = std::move(ensemble);
    return model;
  }

  // Baselines train on the post-split training part so every method sees
  // the same data; the hold-out only feeds EaZy's weighting.
  Standardizer standardizer = standardize ? Standardizer::fit(split.train)
                                          : Standardizer::identity(split.train.dim());
  LabeledDataset std_train = standardizer.apply(split.train);
  BaselineEnsemble ensemble;
  ParamReader reader(params);
  switch (method) {
    case Method::RSM: {
      RsmConfig config;
      config.n_members = reader.get("n_members", config.n_members);
      config.subspace_fraction = reader.get("subspace_fraction", config.subspace_fraction);
      config.base = learner_config_from(reader);
      reader.finish("rsm");
      ensemble = rsm_train(std_train, config, train_seed);
      break;
    }
    case Method::Bagging: {
      BaggingConfig config;
      config.n_members = reader.get("n_members", config.n_members);
      config.base = learner_config_from(reader);
      reader.finish("bagging");
      ensemble = bagging_train(std_train, config, train_seed);
      break;
    }
    case Method::AdaBoost: {
      AdaBoostConfig config;
      config.n_rounds = reader.get("n_rounds", config.n_rounds);
      reader.finish("adaboost");
      ensemble = adaboost_train(std_train, config, train_seed);
      break;
    }
    case Method::RandomForest: {
      RfConfig config;
      config.n_trees = reader.get("n_trees", config.n_trees);
      config.max_depth = reader.get("max_depth", config.max_depth);
      config.min_leaf = reader.get("min_leaf", config.min_leaf);
      reader.finish("rf");
      ensemble = rf_train(std_train, config, train_seed);
      break;
    }
    case Method::EaZy: break;  // handled above
  }
  ensemble.standardizer = std::move(standardizer);
  model.model = std::move(ensemble);
  return model;
}

namespace {

std::optional<double> mean_of(const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (!v) continue;
    sum += *v;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

ExperimentReport run_experiment_on(const LabeledDataset& train, const LabeledDataset& test,
                                   const ExperimentConfig& config) {
  if (config.repeats < 1) throw DataError("run_experiment: repeats must be >= 1");
  if (train.dim() != test.dim())
    throw DataError("run_experiment: train dimension " + std::to_string(train.dim()) +
                    " != test dimension " + std::to_string(test.dim()));

  ExperimentReport report;
  report.train_name = train.name();
  report.test_name = test.name();
  report.method = config.method;
  report.repeats = config.repeats;

  for (std::size_t r = 0; r < config.repeats; ++r) {
    const std::uint64_t seed_r = derive_seed(config.master_seed, r);
    // Frozen-split mode reuses repeat 0's split stream; the method seed
    // still varies per repeat.
    const std::uint64_t split_source =
        config.redraw_split_per_repeat ? seed_r : derive_seed(config.master_seed, 0);
    RepeatResult result;
    result.seed = seed_r;
    std::optional<std::size_t> clusters;
    auto model = train_method(train, config.method, config.params,
                              config.validation_fraction, config.standardize,
                              derive_seed(split_source, 0), derive_seed(seed_r, 1),
                              &clusters);
    result.cluster_count = clusters;
    result.evaluation = evaluate(model.predict_batch(test), test.labels());
    report.per_repeat.push_back(std::move(result));
  }

  double acc_sum = 0.0;
  std::vector<std::optional<double>> apcers;
  std::vector<std::optional<double>> clusters;
  for (const auto& r : report.per_repeat) {
    acc_sum += r.evaluation.accuracy;
    apcers.push_back(r.evaluation.apcer);
    clusters.push_back(r.cluster_count
                           ? std::optional<double>(static_cast<double>(*r.cluster_count))
                           : std::nullopt);
  }
  report.mean_accuracy = acc_sum / static_cast<double>(report.per_repeat.size());
  report.mean_apcer = mean_of(apcers);
  report.mean_cluster_count = mean_of(clusters);
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  auto train = load_dataset_file(config.train_path);
  auto test = load_dataset_file(config.test_path);
  return run_experiment_on(train, test, config);
}

MatrixResult run_matrix(const MatrixConfig& config) {
  if (config.pairs.empty()) throw DataError("matrix config needs >= 1 pair");
  if (config.methods.empty()) throw DataError("matrix config needs >= 1 method");

  MatrixResult result;
  result.methods = config.methods;
  result.pair_count = config.pairs.size();

  // Load every distinct path once; cells share the datasets read-only.
  std::map<std::string, LabeledDataset> datasets;
  std::map<std::string, std::string> load_errors;
  for (const auto& [train_path, test_path] : config.pairs) {
    for (const auto& path : {train_path, test_path}) {
      if (datasets.count(path) || load_errors.count(path)) continue;
      try {
        datasets.emplace(path, load_dataset_file(path));
      } catch (const std::exception& e) {
        load_errors.emplace(path, e.what());
      }
    }
  }

  for (const auto& [train_path, test_path] : config.pairs) {
    for (Method method : config.methods) {
      MatrixCell cell;
      cell.train_path = train_path;
      cell.test_path = test_path;
      cell.method = method;
      result.cells.push_back(std::move(cell));
    }
  }

  auto run_cell = [&](MatrixCell& cell) {
    try {
      if (auto it = load_errors.find(cell.train_path); it != load_errors.end())
        throw DataError(it->second);
      if (auto it = load_errors.find(cell.test_path); it != load_errors.end())
        throw DataError(it->second);
      ExperimentConfig experiment;
      experiment.train_path = cell.train_path;
      experiment.test_path = cell.test_path;
      experiment.method = cell.method;
      if (auto it = config.params.find(cell.method); it != config.params.end())
        experiment.params = it->second;
      experiment.repeats = config.repeats;
      experiment.master_seed = config.master_seed;
      experiment.validation_fraction = config.validation_fraction;
      experiment.redraw_split_per_repeat = config.redraw_split_per_repeat;
      experiment.standardize = config.standardize;
      cell.report = run_experiment_on(datasets.at(cell.train_path),
                                      datasets.at(cell.test_path), experiment);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  };

  unsigned threads = config.threads > 0 ? config.threads
                                        : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(result.cells.size()));
  if (threads <= 1) {
    for (auto& cell : result.cells) run_cell(cell);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        while (true) {
          std::size_t i = next.fetch_add(1);
          if (i >= result.cells.size()) break;
          run_cell(result.cells[i]);
        }
      });
    }
    for (auto& w : workers) w.join();
  }

  for (const auto& cell : result.cells)
    if (!cell.error.empty()) result.any_failed = true;
  return result;
}

}  // namespace eazy
