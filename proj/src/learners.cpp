#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "eazy/learners.hpp"

namespace eazy {

StumpModel stump_train(const LabeledDataset& data, std::span<const double> row_weights) {
  if (data.empty()) throw DataError("stump_train: empty dataset");
  if (row_weights.size() != data.size())
    throw DataError("stump_train: weight count does not match row count");
  double total = 0.0;
  for (double w : row_weights) {
    if (w < 0.0 || !std::isfinite(w)) throw DataError("stump_train: weights must be >= 0");
    total += w;
  }
  if (total <= 0.0) throw DataError("stump_train: weights must not all be zero");

  const std::size_t n = data.size();
  StumpModel best;
  double best_error = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, std::size_t>> column(n);

  for (std::size_t f = 0; f < data.dim(); ++f) {
    for (std::size_t i = 0; i < n; ++i) column[i] = {data.row(i)[f], i};
    std::sort(column.begin(), column.end());

    // Weighted attack mass on the >= side of the threshold. Sweep from the
    // below-minimum sentinel upward, moving rows to the < side.
    double attack_ge = 0.0, bonafide_ge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (data.label(column[i].second) == Label::Attack)
        attack_ge += row_weights[column[i].second];
      else
        bonafide_ge += row_weights[column[i].second];
    }
    double attack_lt = 0.0, bonafide_lt = 0.0;

    auto consider = [&](double threshold) {
      // polarity +1 predicts Attack on the >= side: errors are bona fide
      // mass on >= plus attack mass on <.
      double err_pos = (bonafide_ge + attack_lt) / total;
      double err_neg = 1.0 - err_pos;
      for (int polarity : {+1, -1}) {
        double err = polarity > 0 ? err_pos : err_neg;
        if (err < best_error - 1e-15) {
          best_error = err;
          best.feature = f;
          best.threshold = threshold;
          best.polarity = polarity;
        }
      }
    };

    consider(column.front().first - 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      double w = row_weights[column[i].second];
      if (data.label(column[i].second) == Label::Attack) {
        attack_ge -= w;
        attack_lt += w;
      } else {
        bonafide_ge -= w;
        bonafide_lt += w;
      }
      if (i + 1 < n && column[i].first != column[i + 1].first)
        consider(column[i].first + 0.5 * (column[i + 1].first - column[i].first));
    }
  }
  best.weighted_error = best_error;
  return best;
}

ConstantModel constant_train(const LabeledDataset& data) {
  if (data.empty()) throw DataError("constant_train: empty dataset");
  std::size_t attack = data.count(Label::Attack);
  std::size_t bonafide = data.size() - attack;
  return ConstantModel{attack >= bonafide ? Label::Attack : Label::BonaFide};
}

namespace {

Label tree_predict(const TreeModel& tree, std::span<const double> x) {
  if (x.size() != tree.dim)
    throw DataError("tree dimension mismatch: model " + std::to_string(tree.dim) +
                    ", input " + std::to_string(x.size()));
  int node = 0;
  while (tree.nodes[node].feature >= 0) {
    const auto& n = tree.nodes[node];
    node = x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
  }
  const auto& leaf = tree.nodes[node];
  return leaf.count_attack >= leaf.count_bonafide ? Label::Attack : Label::BonaFide;
}

Label stump_predict(const StumpModel& stump, std::span<const double> x) {
  if (stump.feature >= x.size()) throw DataError("stump dimension mismatch");
  bool ge = x[stump.feature] >= stump.threshold;
  bool attack = stump.polarity > 0 ? ge : !ge;
  return attack ? Label::Attack : Label::BonaFide;
}

}  // namespace

Label predict(const TrainedClassifier& classifier, std::span<const double> x) {
  if (x.size() != classifier.dim)
    throw DataError("classifier dimension mismatch: model " +
                    std::to_string(classifier.dim) + ", input " +
                    std::to_string(x.size()));
  for (double v : x)
    if (!std::isfinite(v)) throw DataError("non-finite feature value in query");
  return std::visit(
      [&](const auto& m) -> Label {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearSVMModel>)
          return label_from_sign(m.decision_value(x));
        else if constexpr (std::is_same_v<T, TreeModel>)
          return tree_predict(m, x);
        else if constexpr (std::is_same_v<T, StumpModel>)
          return stump_predict(m, x);
        else
          return m.label;
      },
      classifier.model);
}

double accuracy_on(const TrainedClassifier& classifier, const LabeledDataset& data) {
  if (data.empty()) throw DataError("accuracy_on: empty dataset");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    correct += predict(classifier, data.row(i)) == data.label(i);
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

TrainedClassifier train_learner(const LabeledDataset& data, const LearnerConfig& config,
                                std::uint64_t seed) {
  TrainedClassifier out;
  out.dim = data.dim();
  if (!data.has_both_classes() || config.kind == LearnerKind::Constant) {
    out.model = constant_train(data);
    return out;
  }
  switch (config.kind) {
    case LearnerKind::LinearSVM:
      out.model = smo_train(data, config.smo, seed);
      break;
    case LearnerKind::Tree:
      out.model = cart_train(data, config.cart, seed);
      break;
    case LearnerKind::Stump: {
      std::vector<double> uniform(data.size(), 1.0 / static_cast<double>(data.size()));
      out.model = stump_train(data, uniform);
      break;
    }
    case LearnerKind::Constant:
      break;  // handled above
  }
  return out;
}

}  // namespace eazy
