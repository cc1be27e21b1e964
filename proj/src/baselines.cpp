#include "eazy/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace eazy {

const char* baseline_method_token(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::RSM: return "rsm";
    case BaselineMethod::Bagging: return "bagging";
    case BaselineMethod::AdaBoost: return "adaboost";
    case BaselineMethod::RandomForest: return "rf";
  }
  return "?";
}

namespace {

std::vector<std::size_t> draw_feature_subset(std::size_t dim, std::size_t count,
                                             std::mt19937_64& rng) {
  std::vector<std::size_t> all(dim);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t j = 0; j < count; ++j) {
    std::size_t pick = j + rng() % (all.size() - j);
    std::swap(all[j], all[pick]);
  }
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

std::vector<std::size_t> bootstrap_sample(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> rows(n);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (auto& r : rows) r = pick(rng);
  return rows;
}

BaselineEnsemble rsm_train(const LabeledDataset& train, const RsmConfig& config,
                           std::uint64_t seed) {
  if (train.empty()) throw DataError("rsm_train: empty dataset");
  if (config.n_members < 1) throw DataError("rsm_train: n_members must be >= 1");
  if (!(config.subspace_fraction > 0.0 && config.subspace_fraction <= 1.0))
    throw DataError("rsm_train: subspace_fraction must lie in (0,1]");
  auto subset_size = split_candidate_count(config.subspace_fraction, train.dim());

  BaselineEnsemble ensemble;
  ensemble.method = BaselineMethod::RSM;
  ensemble.standardizer = Standardizer::identity(train.dim());
  for (std::size_t m = 0; m < config.n_members; ++m) {
    auto rng = make_rng(derive_seed(seed, m));
    auto subset = draw_feature_subset(train.dim(), subset_size, rng);
    auto projected = train.project(subset, train.name() + "-m" + std::to_string(m));
    ensemble.members.push_back(train_learner(projected, config.base, derive_seed(seed, 1000 + m)));
    ensemble.feature_subsets.push_back(std::move(subset));
  }
  return ensemble;
}

BaselineEnsemble bagging_train(const LabeledDataset& train, const BaggingConfig& config,
                               std::uint64_t seed) {
  if (train.empty()) throw DataError("bagging_train: empty dataset");
  if (config.n_members < 1) throw DataError("bagging_train: n_members must be >= 1");

  BaselineEnsemble ensemble;
  ensemble.method = BaselineMethod::Bagging;
  ensemble.standardizer = Standardizer::identity(train.dim());
  std::vector<std::size_t> identity(train.size());
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  for (std::size_t m = 0; m < config.n_members; ++m) {
    auto rng = make_rng(derive_seed(seed, m));
    std::vector<std::size_t> rows;
    if (config.identity_bootstrap) {
      rows = identity;
    } else {
      rows = bootstrap_sample(train.size(), rng);
      for (int attempt = 0; attempt < 10; ++attempt) {
        auto sample = train.subset(rows, train.name());
        if (sample.has_both_classes()) break;
        rows = bootstrap_sample(train.size(), rng);
      }
    }
    auto sample = train.subset(rows, train.name() + "-m" + std::to_string(m));
    // Still single-class after the redraw budget: train_learner degrades to
    // a constant member.
    ensemble.members.push_back(train_learner(sample, config.base, derive_seed(seed, 1000 + m)));
  }
  return ensemble;
}

BaselineEnsemble adaboost_train(const LabeledDataset& train, const AdaBoostConfig& config,
                                std::uint64_t seed) {
  (void)seed;  // stump search is exhaustive and deterministic
  if (train.empty()) throw DataError("adaboost_train: empty dataset");
  if (config.n_rounds < 1) throw DataError("adaboost_train: n_rounds must be >= 1");
  const std::size_t n = train.size();
  constexpr double kErrorClamp = 1e-10;

  BaselineEnsemble ensemble;
  ensemble.method = BaselineMethod::AdaBoost;
  ensemble.standardizer = Standardizer::identity(train.dim());
  std::vector<double> row_weights(n, 1.0 / static_cast<double>(n));

  for (std::size_t t = 0; t < config.n_rounds; ++t) {
    auto stump = stump_train(train, row_weights);
    double raw_error = stump.weighted_error;
    double error = std::clamp(raw_error, kErrorClamp, 0.5 - kErrorClamp);
    double beta = 0.5 * std::log((1.0 - error) / error);

    TrainedClassifier member;
    member.dim = train.dim();
    member.model = stump;
    ensemble.members.push_back(std::move(member));
    ensemble.member_weights.push_back(beta);
    if (raw_error <= kErrorClamp) break;

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      bool correct = predict(ensemble.members.back(), train.row(i)) == train.label(i);
      row_weights[i] *= std::exp(correct ? -beta : beta);
      sum += row_weights[i];
    }
    for (double& w : row_weights) w /= sum;
  }
  return ensemble;
}

BaselineEnsemble rf_train(const LabeledDataset& train, const RfConfig& config,
                          std::uint64_t seed) {
  if (train.empty()) throw DataError("rf_train: empty dataset");
  if (config.n_trees < 1) throw DataError("rf_train: n_trees must be >= 1");
  auto d = static_cast<double>(train.dim());
  CartConfig cart;
  cart.max_depth = config.max_depth;
  cart.min_leaf = config.min_leaf;
  cart.feature_subsample = std::ceil(std::sqrt(d)) / d;

  BaselineEnsemble ensemble;
  ensemble.method = BaselineMethod::RandomForest;
  ensemble.standardizer = Standardizer::identity(train.dim());
  std::vector<std::size_t> identity(train.size());
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  for (std::size_t m = 0; m < config.n_trees; ++m) {
    auto rng = make_rng(derive_seed(seed, m));
    auto rows = config.identity_bootstrap ? identity : bootstrap_sample(train.size(), rng);
    auto sample = train.subset(rows, train.name() + "-t" + std::to_string(m));
    TrainedClassifier member;
    member.dim = train.dim();
    member.model = cart_train(sample, cart, derive_seed(seed, 1000 + m));
    ensemble.members.push_back(std::move(member));
  }
  return ensemble;
}

Label baseline_predict(const BaselineEnsemble& ensemble, std::span<const double> x) {
  if (x.size() != ensemble.standardizer.dim())
    throw DataError("baseline_predict: dimension mismatch: model " +
                    std::to_string(ensemble.standardizer.dim()) + ", input " +
                    std::to_string(x.size()));
  auto z = ensemble.standardizer.apply_row(x);

  if (ensemble.method == BaselineMethod::AdaBoost) {
    double score = 0.0;
    for (std::size_t m = 0; m < ensemble.members.size(); ++m)
      score += ensemble.member_weights[m] * label_sign(predict(ensemble.members[m], z));
    return label_from_sign(score);
  }

  std::size_t attack_votes = 0;
  for (std::size_t m = 0; m < ensemble.members.size(); ++m) {
    Label vote;
    if (ensemble.method == BaselineMethod::RSM) {
      const auto& subset = ensemble.feature_subsets[m];
      std::vector<double> projected(subset.size());
      for (std::size_t j = 0; j < subset.size(); ++j) projected[j] = z[subset[j]];
      vote = predict(ensemble.members[m], projected);
    } else {
      vote = predict(ensemble.members[m], z);
    }
    attack_votes += vote == Label::Attack;
  }
  return 2 * attack_votes >= ensemble.members.size() ? Label::Attack : Label::BonaFide;
}

std::vector<Label> baseline_predict_batch(const BaselineEnsemble& ensemble,
                                          const LabeledDataset& data) {
  std::vector<Label> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    out.push_back(baseline_predict(ensemble, data.row(i)));
  return out;
}

std::vector<double> adaboost_round_errors(const BaselineEnsemble& ensemble) {
  std::vector<double> errors;
  errors.reserve(ensemble.member_weights.size());
  for (double beta : ensemble.member_weights)
    errors.push_back(1.0 / (1.0 + std::exp(2.0 * beta)));
  return errors;
}

}  // namespace eazy
