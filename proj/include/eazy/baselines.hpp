#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eazy/dataset.hpp"
#include "eazy/learners.hpp"

namespace eazy {

enum class BaselineMethod { RSM, Bagging, AdaBoost, RandomForest };

const char* baseline_method_token(BaselineMethod m);

// One of the four conventional comparison ensembles. feature_subsets is
// populated per member for RSM; member_weights holds the per-round vote
// weights for AdaBoost. The standardizer is applied to queries before
// voting; trainers install the identity, the experiment harness replaces it
// with the transform fitted on the training split.
struct BaselineEnsemble {
  BaselineMethod method = BaselineMethod::Bagging;
  std::vector<TrainedClassifier> members;
  std::vector<std::vector<std::size_t>> feature_subsets;  // RSM only
  std::vector<double> member_weights;                     // AdaBoost only
  Standardizer standardizer;
};

struct RsmConfig {
  std::size_t n_members = 10;
  double subspace_fraction = 0.5;
  LearnerConfig base;  // SMO by default
};

struct BaggingConfig {
  std::size_t n_members = 10;
  LearnerConfig base;  // SMO by default
  // Replaces every bootstrap draw with the full training set; degenerate
  // configuration used to check that one member equals the bare learner.
  bool identity_bootstrap = false;
};

struct AdaBoostConfig {
  std::size_t n_rounds = 50;
};

struct RfConfig {
  std::size_t n_trees = 100;
  int max_depth = 16;
  int min_leaf = 1;
  bool identity_bootstrap = false;
};

// One bootstrap draw: n row indices sampled uniformly with replacement.
std::vector<std::size_t> bootstrap_sample(std::size_t n, std::mt19937_64& rng);

// Each member trains on a seeded uniform feature subset (without
// replacement) of size ceil(subspace_fraction * d); queries are projected
// onto the member's subset.
BaselineEnsemble rsm_train(const LabeledDataset& train, const RsmConfig& config,
                           std::uint64_t seed);

// Each member trains on a seeded bootstrap of |train| draws with
// replacement; a single-class bootstrap is redrawn up to 10 times, after
// which the member degrades to a constant classifier.
BaselineEnsemble bagging_train(const LabeledDataset& train, const BaggingConfig& config,
                               std::uint64_t seed);

// Discrete two-class AdaBoost over decision stumps: per round the stump
// minimizes the current weighted error e_t, receives vote weight
// beta_t = 0.5 ln((1-e_t)/e_t) (e_t clamped to [1e-10, 0.5-1e-10]), and the
// row weights are multiplicatively updated and renormalized. Stops early
// when e_t <= 1e-10.
BaselineEnsemble adaboost_train(const LabeledDataset& train, const AdaBoostConfig& config,
                                std::uint64_t seed);

// Bootstrapped CART trees with ceil(sqrt(d)) candidate features per split.
BaselineEnsemble rf_train(const LabeledDataset& train, const RfConfig& config,
                          std::uint64_t seed);

// RSM/Bagging/RF: unweighted majority vote, ties to Attack. AdaBoost: sign
// of the beta-weighted sum, zero to Attack.
Label baseline_predict(const BaselineEnsemble& ensemble, std::span<const double> x);

std::vector<Label> baseline_predict_batch(const BaselineEnsemble& ensemble,
                                          const LabeledDataset& data);

// Per-round weighted errors recovered from the stored AdaBoost vote
// weights (e_t = 1 / (1 + exp(2 beta_t))).
std::vector<double> adaboost_round_errors(const BaselineEnsemble& ensemble);

}  // namespace eazy
