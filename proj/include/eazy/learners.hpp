#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "eazy/dataset.hpp"

namespace eazy {

// Soft-margin linear SVM in primal form w.x + b, trained by SMO on the
// dual. Sign encoding: Attack = +1, BonaFide = -1; decision value 0 reads
// as Attack.
struct LinearSVMModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> dual_coefficients;  // alpha per training row, in [0, C]
  double C = 1.0;
  double tol = 1e-3;

  double decision_value(std::span<const double> x) const;
};

// Axis-aligned binary split tree. feature < 0 marks a leaf; rows with
// x[feature] < threshold go left. Leaves keep their training label counts.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::size_t count_bonafide = 0;
  std::size_t count_attack = 0;
};

struct TreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t dim = 0;

  std::size_t depth() const;
  std::size_t min_leaf_count() const;
};

// Depth-1 threshold rule. polarity +1: x[feature] >= threshold -> Attack;
// polarity -1 inverts.
struct StumpModel {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;
  double weighted_error = 0.0;  // weighted misclassification on the fit data
};

struct ConstantModel {
  Label label = Label::Attack;
};

enum class LearnerKind { LinearSVM, Tree, Stump, Constant };

// One base hypothesis: maps a feature vector of the training dimension to a
// label. Total and deterministic over finite inputs.
struct TrainedClassifier {
  std::variant<LinearSVMModel, TreeModel, StumpModel, ConstantModel> model;
  std::size_t dim = 0;

  LearnerKind kind() const { return static_cast<LearnerKind>(model.index()); }
};

struct SmoConfig {
  double C = 1.0;
  double tol = 1e-3;
  int max_passes = 10;              // consecutive quiet sweeps before stopping
  long max_pair_updates = 100000;
};

// Sequential minimal optimization over the soft-margin linear SVM dual.
// Deterministic given seed (the seed drives second-coordinate selection
// among equal candidates and the fallback scan offsets). Throws DataError
// on single-class data; train a constant classifier for those instead.
LinearSVMModel smo_train(const LabeledDataset& data, const SmoConfig& config,
                         std::uint64_t seed);

struct CartConfig {
  int max_depth = 16;
  int min_leaf = 1;
  // When set, each split scores a seeded random subset of
  // ceil(feature_subsample * d) features (random-forest style).
  std::optional<double> feature_subsample;
};

// Candidate features scored per split: ceil(fraction * dim), clamped to
// [1, dim].
std::size_t split_candidate_count(double fraction, std::size_t dim);

// Greedy Gini-impurity CART over midpoint thresholds of sorted feature
// values. Equal-gain ties break toward the lowest feature index, then the
// lowest threshold.
TreeModel cart_train(const LabeledDataset& data, const CartConfig& config,
                     std::uint64_t seed);

// Exhaustive weighted-error minimization over (feature, threshold,
// polarity). Thresholds are the midpoints of consecutive distinct values
// plus one below-minimum sentinel per feature. Weighted error is always
// <= 0.5 (the polarity flip guarantees it).
StumpModel stump_train(const LabeledDataset& data, std::span<const double> row_weights);

// Majority label; ties resolve to Attack.
ConstantModel constant_train(const LabeledDataset& data);

Label predict(const TrainedClassifier& classifier, std::span<const double> x);
double accuracy_on(const TrainedClassifier& classifier, const LabeledDataset& data);

// Base-learner choice shared by the ensembles; single-class data routes to
// constant_train regardless of kind.
struct LearnerConfig {
  LearnerKind kind = LearnerKind::LinearSVM;
  SmoConfig smo;
  CartConfig cart;
};

TrainedClassifier train_learner(const LabeledDataset& data, const LearnerConfig& config,
                                std::uint64_t seed);

}  // namespace eazy
