#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "eazy/baselines.hpp"
#include "eazy/model_io.hpp"
#include "eazy/synthetic.hpp"

using namespace eazy;

namespace {

LabeledDataset blobs(std::string_view name, std::uint64_t seed) {
  return generate_synthetic(builtin_synthetic_spec(name), seed);
}

LabeledDataset interleaved_1d(std::size_t n) {
  // Alternating labels along one axis: every stump stays weak but better
  // than chance, so boosting keeps making progress without early-stopping.
  LabeledDataset d("interleaved", 1);
  for (std::size_t i = 0; i < n; ++i)
    d.add_row(std::vector<double>{static_cast<double>(i)},
              i % 2 == 0 ? Label::Attack : Label::BonaFide);
  return d;
}

BaselineEnsemble constant_members(BaselineMethod method,
                                  const std::vector<Label>& votes) {
  BaselineEnsemble e;
  e.method = method;
  e.standardizer = Standardizer::identity(1);
  for (Label l : votes) {
    TrainedClassifier c;
    c.dim = 1;
    c.model = ConstantModel{l};
    e.members.push_back(c);
    if (method == BaselineMethod::RSM) e.feature_subsets.push_back({0});
  }
  return e;
}

}  // namespace

TEST_CASE("rsm: full-fraction single member equals a lone svm") {
  auto d = blobs("two-blobs", 4);
  RsmConfig config;
  config.n_members = 1;
  config.subspace_fraction = 1.0;
  std::uint64_t seed = 31;
  auto ensemble = rsm_train(d, config, seed);
  REQUIRE(ensemble.members.size() == 1);
  REQUIRE(ensemble.feature_subsets[0].size() == d.dim());

  auto lone = train_learner(d, config.base, derive_seed(seed, 1000));
  auto probe = blobs("two-blobs", 90);
  for (std::size_t i = 0; i < probe.size(); ++i)
    CHECK(baseline_predict(ensemble, probe.row(i)) == predict(lone, probe.row(i)));
}

TEST_CASE("rsm: subset sizes follow the ceil formula") {
  SyntheticSpec spec;
  spec.name = "d10";
  BlobSpec blob;
  blob.mean = std::vector<double>(10, 0.0);
  blob.sigma = 1.0;
  blob.count = 60;
  blob.bonafide_fraction = 0.5;
  blob.attack_fraction = 0.5;
  spec.blobs = {blob};
  auto d = generate_synthetic(spec, 8);

  RsmConfig config;
  config.n_members = 6;
  config.subspace_fraction = 0.5;
  auto ensemble = rsm_train(d, config, 3);
  for (const auto& subset : ensemble.feature_subsets) {
    CHECK(subset.size() == 5);
    std::set<std::size_t> unique(subset.begin(), subset.end());
    CHECK(unique.size() == subset.size());  // without replacement
    for (std::size_t f : subset) CHECK(f < 10);
  }
}

TEST_CASE("rsm: distinct seeds draw distinct subset collections") {
  auto d = blobs("three-blobs", 12);
  RsmConfig config;
  config.n_members = 4;
  std::set<std::string> collections;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto ensemble = rsm_train(d, config, seed);
    std::ostringstream key;
    for (const auto& subset : ensemble.feature_subsets) {
      for (std::size_t f : subset) key << f << ',';
      key << ';';
    }
    collections.insert(key.str());
  }
  CHECK(collections.size() >= 19);
}

TEST_CASE("bagging: identity bootstrap with one member equals a lone svm") {
  auto d = blobs("two-blobs", 21);
  BaggingConfig config;
  config.n_members = 1;
  config.identity_bootstrap = true;
  std::uint64_t seed = 77;
  auto ensemble = bagging_train(d, config, seed);
  auto lone = train_learner(d, config.base, derive_seed(seed, 1000));
  auto probe = blobs("two-blobs", 91);
  for (std::size_t i = 0; i < probe.size(); ++i)
    CHECK(baseline_predict(ensemble, probe.row(i)) == predict(lone, probe.row(i)));
}

TEST_CASE("bagging: bootstrap unique-row fraction approaches 1 - 1/e") {
  double mean_unique = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto rng = make_rng(seed);
    auto rows = bootstrap_sample(1000, rng);
    CHECK(rows.size() == 1000);
    std::set<std::size_t> unique(rows.begin(), rows.end());
    mean_unique += static_cast<double>(unique.size()) / 1000.0;
  }
  mean_unique /= 50.0;
  CHECK(mean_unique > 0.60);
  CHECK(mean_unique < 0.66);
}

TEST_CASE("bagging: deterministic in seed") {
  auto d = blobs("three-blobs", 14);
  BaggingConfig config;
  config.n_members = 3;
  auto a = bagging_train(d, config, 5);
  auto b = bagging_train(d, config, 5);
  auto probe = blobs("three-blobs-shift", 15);
  for (std::size_t i = 0; i < probe.size(); ++i)
    CHECK(baseline_predict(a, probe.row(i)) == baseline_predict(b, probe.row(i)));
}

TEST_CASE("adaboost: separable data stops after one perfect round") {
  LabeledDataset d("sep", 1);
  for (int i = 0; i < 10; ++i)
    d.add_row(std::vector<double>{static_cast<double>(i)},
              i < 5 ? Label::BonaFide : Label::Attack);
  AdaBoostConfig config;
  config.n_rounds = 20;
  auto ensemble = adaboost_train(d, config, 0);
  CHECK(ensemble.members.size() == 1);
  auto errors = adaboost_round_errors(ensemble);
  CHECK(errors[0] <= 1e-9);
  for (std::size_t i = 0; i < d.size(); ++i)
    CHECK(baseline_predict(ensemble, d.row(i)) == d.label(i));
}

TEST_CASE("adaboost: recomputed row weights stay a simplex and betas stay positive") {
  auto d = interleaved_1d(20);
  AdaBoostConfig config;
  config.n_rounds = 15;
  auto ensemble = adaboost_train(d, config, 0);
  REQUIRE(ensemble.members.size() == config.n_rounds);

  // Replay the weight evolution from the returned members.
  std::vector<double> w(d.size(), 1.0 / static_cast<double>(d.size()));
  for (std::size_t t = 0; t < ensemble.members.size(); ++t) {
    double err = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (predict(ensemble.members[t], d.row(i)) != d.label(i)) err += w[i];
    double beta = ensemble.member_weights[t];
    CHECK(beta >= 0.0);
    CHECK(beta == doctest::Approx(0.5 * std::log((1.0 - err) / err)).epsilon(1e-9));

    double sum = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      bool correct = predict(ensemble.members[t], d.row(i)) == d.label(i);
      w[i] *= std::exp(correct ? -beta : beta);
      sum += w[i];
    }
    for (auto& v : w) v /= sum;
    double check_sum = 0.0;
    for (double v : w) check_sum += v;
    CHECK(std::abs(check_sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("adaboost: exponential-loss bound strictly decreases on the weak fixture") {
  auto d = interleaved_1d(20);
  AdaBoostConfig config;
  config.n_rounds = 20;
  auto ensemble = adaboost_train(d, config, 0);
  REQUIRE(ensemble.members.size() == 20);
  auto errors = adaboost_round_errors(ensemble);
  double bound = 1.0;
  for (double e : errors) {
    CHECK(e > 0.0);
    CHECK(e < 0.5);
    double next = bound * 2.0 * std::sqrt(e * (1.0 - e));
    CHECK(next < bound);
    bound = next;
  }
}

TEST_CASE("rf: identity bootstrap with one tree equals its own cart") {
  auto d = blobs("xor", 5);
  RfConfig config;
  config.n_trees = 1;
  config.identity_bootstrap = true;
  std::uint64_t seed = 13;
  auto ensemble = rf_train(d, config, seed);

  CartConfig cart;
  cart.max_depth = config.max_depth;
  cart.min_leaf = config.min_leaf;
  cart.feature_subsample = std::ceil(std::sqrt(2.0)) / 2.0;
  auto tree = cart_train(d, cart, derive_seed(seed, 1000));
  TrainedClassifier lone;
  lone.dim = d.dim();
  lone.model = tree;
  auto probe = blobs("xor", 55);
  for (std::size_t i = 0; i < probe.size(); ++i)
    CHECK(baseline_predict(ensemble, probe.row(i)) == predict(lone, probe.row(i)));
}

TEST_CASE("rf: forest training accuracy at least matches a single tree on noisy blobs") {
  double forest_total = 0.0, tree_total = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SyntheticSpec spec;
    spec.name = "noisy";
    spec.blobs = {{{0.0, 0.0}, 2.5, 80, 0.8, 0.2}, {{3.0, 1.0}, 2.5, 80, 0.2, 0.8}};
    auto d = generate_synthetic(spec, seed);

    RfConfig forest_config;
    forest_config.n_trees = 25;
    forest_config.max_depth = 4;
    auto forest = rf_train(d, forest_config, seed);
    auto forest_predictions = baseline_predict_batch(forest, d);
    std::size_t forest_correct = 0;
    for (std::size_t i = 0; i < d.size(); ++i)
      forest_correct += forest_predictions[i] == d.label(i);
    forest_total += static_cast<double>(forest_correct) / static_cast<double>(d.size());

    RfConfig single_config = forest_config;
    single_config.n_trees = 1;
    auto single = rf_train(d, single_config, seed);
    auto single_predictions = baseline_predict_batch(single, d);
    std::size_t single_correct = 0;
    for (std::size_t i = 0; i < d.size(); ++i)
      single_correct += single_predictions[i] == d.label(i);
    tree_total += static_cast<double>(single_correct) / static_cast<double>(d.size());
  }
  CHECK(forest_total / 10.0 >= tree_total / 10.0);
}

TEST_CASE("baseline_predict: majority vote and tie rules") {
  auto majority = constant_members(
      BaselineMethod::Bagging, {Label::Attack, Label::Attack, Label::BonaFide});
  CHECK(baseline_predict(majority, std::vector<double>{0.0}) == Label::Attack);

  auto tie = constant_members(
      BaselineMethod::Bagging,
      {Label::Attack, Label::Attack, Label::BonaFide, Label::BonaFide});
  CHECK(baseline_predict(tie, std::vector<double>{0.0}) == Label::Attack);

  auto single = constant_members(BaselineMethod::RSM, {Label::BonaFide});
  CHECK(baseline_predict(single, std::vector<double>{0.0}) == Label::BonaFide);
}

TEST_CASE("baselines: model io round-trips predictions for every method") {
  auto train = blobs("three-blobs", 30);
  auto probe = blobs("three-blobs-shift", 31);

  RsmConfig rsm_config;
  rsm_config.n_members = 3;
  BaggingConfig bagging_config;
  bagging_config.n_members = 3;
  AdaBoostConfig ada_config;
  ada_config.n_rounds = 8;
  RfConfig rf_config;
  rf_config.n_trees = 5;

  std::vector<BaselineEnsemble> ensembles{
      rsm_train(train, rsm_config, 1), bagging_train(train, bagging_config, 2),
      adaboost_train(train, ada_config, 3), rf_train(train, rf_config, 4)};

  for (const auto& ensemble : ensembles) {
    std::stringstream buffer;
    save_model(ensemble, buffer);
    auto loaded = load_model(buffer);
    CHECK(loaded.method_token() == baseline_method_token(ensemble.method));
    for (std::size_t i = 0; i < probe.size(); ++i)
      CHECK(loaded.predict(probe.row(i)) == baseline_predict(ensemble, probe.row(i)));
  }
}

TEST_CASE("baselines: config validation") {
  auto d = blobs("two-blobs", 40);
  RsmConfig rsm_config;
  rsm_config.n_members = 0;
  CHECK_THROWS_AS(rsm_train(d, rsm_config, 1), DataError);
  rsm_config.n_members = 2;
  rsm_config.subspace_fraction = 0.0;
  CHECK_THROWS_AS(rsm_train(d, rsm_config, 1), DataError);
  BaggingConfig bagging_config;
  bagging_config.n_members = 0;
  CHECK_THROWS_AS(bagging_train(d, bagging_config, 1), DataError);
  AdaBoostConfig ada_config;
  ada_config.n_rounds = 0;
  CHECK_THROWS_AS(adaboost_train(d, ada_config, 1), DataError);
  RfConfig rf_config;
  rf_config.n_trees = 0;
  CHECK_THROWS_AS(rf_train(d, rf_config, 1), DataError);
}
