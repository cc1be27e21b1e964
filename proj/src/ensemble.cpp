#include "eazy/ensemble.hpp"

#include <cmath>
#include <numeric>

namespace eazy {

std::uint64_t eazy_select_k_seed(std::uint64_t seed) { return derive_seed(seed, 1); }
std::uint64_t eazy_em_seed(std::uint64_t seed) { return derive_seed(seed, 2); }
std::uint64_t eazy_cluster_learner_seed(std::uint64_t seed, std::size_t cluster_index) {
  return derive_seed(seed, 16 + cluster_index);
}

std::vector<double> compute_weights(std::span<const double> accuracies) {
  if (accuracies.empty()) throw DataError("compute_weights: empty accuracy vector");
  double sum = 0.0;
  for (double a : accuracies) {
    if (!(a >= 0.0 && a <= 1.0))
      throw DataError("compute_weights: accuracy outside [0,1]");
    sum += a;
  }
  std::vector<double> weights(accuracies.size());
  if (sum == 0.0) {
    std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(accuracies.size()));
    return weights;
  }
  for (std::size_t i = 0; i < accuracies.size(); ++i) weights[i] = accuracies[i] / sum;
  return weights;
}

EazyEnsemble eazy_train(const LabeledDataset& train, const LabeledDataset& validation,
                        const EazyConfig& config, std::uint64_t seed) {
  if (train.empty() || validation.empty())
    throw DataError("eazy_train: train and validation must be nonempty");
  if (train.dim() != validation.dim())
    throw DataError("eazy_train: train/validation dimension mismatch");
  if (!train.has_both_classes())
    throw DataError("eazy_train: training data must contain both classes");

  EazyEnsemble ensemble;
  ensemble.standardizer = config.standardize ? Standardizer::fit(train)
                                             : Standardizer::identity(train.dim());
  LabeledDataset std_train = ensemble.standardizer.apply(train);
  LabeledDataset std_validation = ensemble.standardizer.apply(validation);

  std::size_t k;
  if (config.clustering.forced_k) {
    k = *config.clustering.forced_k;
    if (k < 1 || k > std_train.size())
      throw DataError("eazy_train: forced k must lie in [1, |train|]");
  } else {
    k = select_k(std_train, eazy_select_k_seed(seed), config.clustering.select);
  }

  ensemble.gmm = em_fit(std_train, k, eazy_em_seed(seed), config.clustering.em);
  ensemble.training_partition =
      assign_clusters(ensemble.gmm, std_train, config.clustering.partition);
  ensemble.cluster_count = ensemble.training_partition.clusters.size();

  ensemble.classifiers.reserve(ensemble.cluster_count);
  ensemble.validation_accuracies.reserve(ensemble.cluster_count);
  for (std::size_t c = 0; c < ensemble.cluster_count; ++c) {
    const auto& rows = ensemble.training_partition.clusters[c];
    auto cluster_data = std_train.subset(rows, train.name() + "-c" + std::to_string(c));
    auto classifier =
        train_learner(cluster_data, config.learner, eazy_cluster_learner_seed(seed, c));
    ensemble.validation_accuracies.push_back(accuracy_on(classifier, std_validation));
    ensemble.classifiers.push_back(std::move(classifier));
  }
  ensemble.weights = compute_weights(ensemble.validation_accuracies);
  return ensemble;
}

Label weighted_vote_predict(const EazyEnsemble& ensemble, std::span<const double> x) {
  if (x.size() != ensemble.standardizer.dim())
    throw DataError("weighted_vote_predict: dimension mismatch: model " +
                    std::to_string(ensemble.standardizer.dim()) + ", input " +
                    std::to_string(x.size()));
  auto z = ensemble.standardizer.apply_row(x);
  double attack_score = 0.0;
  double bonafide_score = 0.0;
  for (std::size_t i = 0; i < ensemble.classifiers.size(); ++i) {
    if (predict(ensemble.classifiers[i], z) == Label::Attack)
      attack_score += ensemble.weights[i];
    else
      bonafide_score += ensemble.weights[i];
  }
  return attack_score >= bonafide_score ? Label::Attack : Label::BonaFide;
}

std::vector<Label> predict_batch(const EazyEnsemble& ensemble, const LabeledDataset& data) {
  if (data.dim() != ensemble.standardizer.dim())
    throw DataError("predict_batch: dimension mismatch");
  std::vector<Label> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    out.push_back(weighted_vote_predict(ensemble, data.row(i)));
  return out;
}

}  // namespace eazy
