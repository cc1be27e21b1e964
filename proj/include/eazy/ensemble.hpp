#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eazy/dataset.hpp"
#include "eazy/gmm.hpp"
#include "eazy/learners.hpp"

namespace eazy {

// The trained ensemble: one base classifier per training cluster, weighted
// by validation accuracy (normalized to sum to 1). The fitted mixture,
// standardizer and training partition are retained for provenance and
// prediction-time preprocessing.
struct EazyEnsemble {
  std::vector<TrainedClassifier> classifiers;
  std::vector<double> weights;
  std::vector<double> validation_accuracies;
  std::size_t cluster_count = 0;
  GaussianMixtureModel gmm;
  Standardizer standardizer;
  Partition training_partition;
};

struct ClusteringConfig {
  // Fixed component count; bypasses select_k. k = 1 collapses the ensemble
  // to the plain eager learner.
  std::optional<std::size_t> forced_k;
  SelectKConfig select;
  EmConfig em;
  PartitionConfig partition;
};

struct EazyConfig {
  LearnerConfig learner;
  ClusteringConfig clustering;
  bool standardize = true;
};

// Seed stream layout inside eazy_train, exposed so callers can reproduce
// individual stages (e.g. train the bare base learner with the exact seed
// cluster i would have received).
std::uint64_t eazy_select_k_seed(std::uint64_t seed);
std::uint64_t eazy_em_seed(std::uint64_t seed);
std::uint64_t eazy_cluster_learner_seed(std::uint64_t seed, std::size_t cluster_index);

// Full training pipeline: standardize (fit on train only), pick the
// component count, fit the mixture, partition the training rows, train one
// classifier per cluster (constant for single-class clusters), measure each
// classifier on the full validation set, normalize the accuracies into
// voting weights.
EazyEnsemble eazy_train(const LabeledDataset& train, const LabeledDataset& validation,
                        const EazyConfig& config, std::uint64_t seed);

// W_i = A_i / sum_j A_j; exact uniform weights when every accuracy is zero.
std::vector<double> compute_weights(std::span<const double> accuracies);

// Weighted majority vote over the two labels; exact score ties resolve to
// Attack. The stored standardizer is applied to the query first.
Label weighted_vote_predict(const EazyEnsemble& ensemble, std::span<const double> x);

std::vector<Label> predict_batch(const EazyEnsemble& ensemble, const LabeledDataset& data);

}  // namespace eazy
