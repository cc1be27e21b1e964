#include "eazy/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace eazy {

namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "eazy-model";
constexpr int kVersion = 1;

json standardizer_to_json(const Standardizer& s) {
  return json{{"means", s.means()}, {"scales", s.scales()}};
}

Standardizer standardizer_from_json(const json& j) {
  return Standardizer::from_parameters(j.at("means").get<std::vector<double>>(),
                                       j.at("scales").get<std::vector<double>>());
}

json classifier_to_json(const TrainedClassifier& c) {
  json j;
  j["dim"] = c.dim;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearSVMModel>) {
          j["kind"] = "linear_svm";
          j["weights"] = m.weights;
          j["bias"] = m.bias;
          j["dual_coefficients"] = m.dual_coefficients;
          j["C"] = m.C;
          j["tol"] = m.tol;
        } else if constexpr (std::is_same_v<T, TreeModel>) {
          j["kind"] = "tree";
          json nodes = json::array();
          for (const auto& n : m.nodes)
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.count_bonafide,
                             n.count_attack});
          j["nodes"] = std::move(nodes);
        } else if constexpr (std::is_same_v<T, StumpModel>) {
          j["kind"] = "stump";
          j["feature"] = m.feature;
          j["threshold"] = m.threshold;
          j["polarity"] = m.polarity;
          j["weighted_error"] = m.weighted_error;
        } else {
          j["kind"] = "constant";
          j["label"] = label_token(m.label);
        }
      },
      c.model);
  return j;
}

TrainedClassifier classifier_from_json(const json& j) {
  TrainedClassifier c;
  c.dim = j.at("dim").get<std::size_t>();
  auto kind = j.at("kind").get<std::string>();
  if (kind == "linear_svm") {
    LinearSVMModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.dual_coefficients = j.at("dual_coefficients").get<std::vector<double>>();
    m.C = j.at("C").get<double>();
    m.tol = j.at("tol").get<double>();
    c.model = std::move(m);
  } else if (kind == "tree") {
    TreeModel m;
    m.dim = c.dim;
    for (const auto& nj : j.at("nodes")) {
      TreeNode n;
      n.feature = nj.at(0).get<int>();
      n.threshold = nj.at(1).get<double>();
      n.left = nj.at(2).get<int>();
      n.right = nj.at(3).get<int>();
      n.count_bonafide = nj.at(4).get<std::size_t>();
      n.count_attack = nj.at(5).get<std::size_t>();
      m.nodes.push_back(n);
    }
    if (m.nodes.empty()) throw FormatError("tree model with no nodes");
    c.model = std::move(m);
  } else if (kind == "stump") {
    StumpModel m;
    m.feature = j.at("feature").get<std::size_t>();
    m.threshold = j.at("threshold").get<double>();
    m.polarity = j.at("polarity").get<int>();
    m.weighted_error = j.at("weighted_error").get<double>();
    c.model = m;
  } else if (kind == "constant") {
    c.model = ConstantModel{parse_label_token(j.at("label").get<std::string>())};
  } else {
    throw FormatError("unknown classifier kind '" + kind + "'");
  }
  return c;
}

json gmm_to_json(const GaussianMixtureModel& g) {
  return json{{"k", g.k},
              {"dim", g.dim},
              {"mixing_weights", g.mixing_weights},
              {"means", g.means},
              {"variances", g.variances}};
}

GaussianMixtureModel gmm_from_json(const json& j) {
  GaussianMixtureModel g;
  g.k = j.at("k").get<std::size_t>();
  g.dim = j.at("dim").get<std::size_t>();
  g.mixing_weights = j.at("mixing_weights").get<std::vector<double>>();
  g.means = j.at("means").get<std::vector<double>>();
  g.variances = j.at("variances").get<std::vector<double>>();
  if (g.mixing_weights.size() != g.k || g.means.size() != g.k * g.dim ||
      g.variances.size() != g.k * g.dim)
    throw FormatError("gmm payload size mismatch");
  return g;
}

json eazy_to_json(const EazyEnsemble& e) {
  json j;
  j["kind"] = "eazy";
  j["standardizer"] = standardizer_to_json(e.standardizer);
  j["weights"] = e.weights;
  j["validation_accuracies"] = e.validation_accuracies;
  j["cluster_count"] = e.cluster_count;
  j["gmm"] = gmm_to_json(e.gmm);
  j["partition"] = e.training_partition.clusters;
  json classifiers = json::array();
  for (const auto& c : e.classifiers) classifiers.push_back(classifier_to_json(c));
  j["classifiers"] = std::move(classifiers);
  return j;
}

EazyEnsemble eazy_from_json(const json& j) {
  EazyEnsemble e;
  e.standardizer = standardizer_from_json(j.at("standardizer"));
  e.weights = j.at("weights").get<std::vector<double>>();
  e.validation_accuracies = j.at("validation_accuracies").get<std::vector<double>>();
  e.cluster_count = j.at("cluster_count").get<std::size_t>();
  e.gmm = gmm_from_json(j.at("gmm"));
  e.training_partition.clusters =
      j.at("partition").get<std::vector<std::vector<std::size_t>>>();
  for (const auto& cj : j.at("classifiers")) e.classifiers.push_back(classifier_from_json(cj));
  if (e.classifiers.empty() || e.classifiers.size() != e.weights.size())
    throw FormatError("ensemble payload size mismatch");
  return e;
}

BaselineMethod method_from_token(const std::string& token) {
  if (token == "rsm") return BaselineMethod::RSM;
  if (token == "bagging") return BaselineMethod::Bagging;
  if (token == "adaboost") return BaselineMethod::AdaBoost;
  if (token == "rf") return BaselineMethod::RandomForest;
  throw FormatError("unknown baseline method '" + token + "'");
}

json baseline_to_json(const BaselineEnsemble& e) {
  json j;
  j["kind"] = "baseline";
  j["method"] = baseline_method_token(e.method);
  j["standardizer"] = standardizer_to_json(e.standardizer);
  j["feature_subsets"] = e.feature_subsets;
  j["member_weights"] = e.member_weights;
  json members = json::array();
  for (const auto& m : e.members) members.push_back(classifier_to_json(m));
  j["members"] = std::move(members);
  return j;
}

BaselineEnsemble baseline_from_json(const json& j) {
  BaselineEnsemble e;
  e.method = method_from_token(j.at("method").get<std::string>());
  e.standardizer = standardizer_from_json(j.at("standardizer"));
  e.feature_subsets = j.at("feature_subsets").get<std::vector<std::vector<std::size_t>>>();
  e.member_weights = j.at("member_weights").get<std::vector<double>>();
  for (const auto& mj : j.at("members")) e.members.push_back(classifier_from_json(mj));
  if (e.members.empty()) throw FormatError("baseline payload with no members");
  return e;
}

}  // namespace

Label AnyModel::predict(std::span<const double> x) const {
  if (std::holds_alternative<EazyEnsemble>(model))
    return weighted_vote_predict(std::get<EazyEnsemble>(model), x);
  return baseline_predict(std::get<BaselineEnsemble>(model), x);
}

std::vector<Label> AnyModel::predict_batch(const LabeledDataset& data) const {
  if (std::holds_alternative<EazyEnsemble>(model))
    return eazy::predict_batch(std::get<EazyEnsemble>(model), data);
  return baseline_predict_batch(std::get<BaselineEnsemble>(model), data);
}

std::string AnyModel::method_token() const {
  if (std::holds_alternative<EazyEnsemble>(model)) return "eazy";
  return baseline_method_token(std::get<BaselineEnsemble>(model).method);
}

std::size_t AnyModel::dim() const {
  if (std::holds_alternative<EazyEnsemble>(model))
    return std::get<EazyEnsemble>(model).standardizer.dim();
  return std::get<BaselineEnsemble>(model).standardizer.dim();
}

void save_model(const AnyModel& model, std::ostream& out) {
  if (std::holds_alternative<EazyEnsemble>(model.model))
    save_model(std::get<EazyEnsemble>(model.model), out);
  else
    save_model(std::get<BaselineEnsemble>(model.model), out);
}

namespace {

void write_container(json payload, std::ostream& out) {
  json j;
  j["format"] = kFormatTag;
  j["version"] = kVersion;
  j["model"] = std::move(payload);
  out << j.dump() << '\n';
}

}  // namespace

void save_model(const EazyEnsemble& ensemble, std::ostream& out) {
  write_container(eazy_to_json(ensemble), out);
}

void save_model(const BaselineEnsemble& ensemble, std::ostream& out) {
  write_container(baseline_to_json(ensemble), out);
}

AnyModel load_model(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError(std::string("corrupt model payload: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormatTag)
      throw FormatError("not an eazy model file");
    int version = j.at("version").get<int>();
    if (version != kVersion)
      throw VersionError("unsupported model version " + std::to_string(version) +
                         " (expected " + std::to_string(kVersion) + ")");
    const json& payload = j.at("model");
    AnyModel model;
    if (payload.at("kind").get<std::string>() == "eazy")
      model.model = eazy_from_json(payload);
    else
      model.model = baseline_from_json(payload);
    return model;
  } catch (const json::exception& e) {
    throw FormatError(std::string("corrupt model payload: ") + e.what());
  }
}

void save_model_file(const AnyModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open model file '" + path + "' for writing");
  save_model(model, out);
  out.flush();
  if (!out) throw DataError("failed writing model file '" + path + "'");
}

AnyModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path + "'");
  return load_model(in);
}

}  // namespace eazy
