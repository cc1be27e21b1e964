#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "eazy/learners.hpp"

namespace eazy {

double LinearSVMModel::decision_value(std::span<const double> x) const {
  if (x.size() != weights.size())
    throw DataError("svm dimension mismatch: model " + std::to_string(weights.size()) +
                    ", input " + std::to_string(x.size()));
  double s = bias;
  for (std::size_t j = 0; j < x.size(); ++j) s += weights[j] * x[j];
  return s;
}

namespace {

// Platt-style SMO specialized to the linear kernel: the primal weight
// vector is maintained incrementally, so errors cost O(d).
class SmoSolver {
 public:
  SmoSolver(const LabeledDataset& data, const SmoConfig& config, std::uint64_t seed)
      : data_(data),
        config_(config),
        rng_(make_rng(seed)),
        n_(data.size()),
        alphas_(data.size(), 0.0),
        w_(data.dim(), 0.0) {
    y_.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) y_.push_back(label_sign(data.label(i)));
  }

  LinearSVMModel solve() {
    bool examine_all = true;
    int quiet_sweeps = 0;
    while (quiet_sweeps < config_.max_passes && updates_ < config_.max_pair_updates) {
      std::size_t changed = 0;
      for (std::size_t i = 0; i < n_; ++i) {
        if (!examine_all && !is_unbound(alphas_[i])) continue;
        changed += examine(i);
        if (updates_ >= config_.max_pair_updates) break;
      }
      quiet_sweeps = changed == 0 ? quiet_sweeps + 1 : 0;
      examine_all = examine_all ? false : changed == 0;
    }
    LinearSVMModel model;
    model.weights = std::move(w_);
    model.bias = b_;
    model.dual_coefficients = std::move(alphas_);
    model.C = config_.C;
    model.tol = config_.tol;
    return model;
  }

 private:
  bool is_unbound(double a) const { return a > 0.0 && a < config_.C; }

  double decision(std::size_t i) const {
    auto x = data_.row(i);
    double s = b_;
    for (std::size_t j = 0; j < x.size(); ++j) s += w_[j] * x[j];
    return s;
  }

  double error(std::size_t i) const { return decision(i) - y_[i]; }

  double kernel(std::size_t a, std::size_t b) const {
    auto xa = data_.row(a);
    auto xb = data_.row(b);
    double s = 0.0;
    for (std::size_t j = 0; j < xa.size(); ++j) s += xa[j] * xb[j];
    return s;
  }

  std::size_t examine(std::size_t i2) {
    const double C = config_.C;
    const double tol = config_.tol;
    double e2 = error(i2);
    double r2 = e2 * y_[i2];
    if (!((r2 < -tol && alphas_[i2] < C) || (r2 > tol && alphas_[i2] > 0.0))) return 0;

    std::vector<std::size_t> unbound;
    unbound.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i)
      if (is_unbound(alphas_[i])) unbound.push_back(i);

    if (!unbound.empty()) {
      // Second-choice heuristic: the partner maximizing |E1 - E2|; equal
      // candidates are resolved by a seeded draw.
      std::vector<double> errs(unbound.size());
      double best = -1.0;
      for (std::size_t u = 0; u < unbound.size(); ++u) {
        errs[u] = error(unbound[u]);
        best = std::max(best, std::abs(errs[u] - e2));
      }
      std::vector<std::size_t> candidates;
      for (std::size_t u = 0; u < unbound.size(); ++u)
        if (std::abs(errs[u] - e2) >= best) candidates.push_back(unbound[u]);
      std::size_t i1 = candidates[rng_() % candidates.size()];
      if (take_step(i1, i2, e2)) return 1;

      std::size_t offset = rng_() % unbound.size();
      for (std::size_t u = 0; u < unbound.size(); ++u) {
        std::size_t cand = unbound[(u + offset) % unbound.size()];
        if (cand == i1) continue;
        if (take_step(cand, i2, e2)) return 1;
      }
    }
    std::size_t offset = rng_() % n_;
    for (std::size_t u = 0; u < n_; ++u) {
      std::size_t cand = (u + offset) % n_;
      if (take_step(cand, i2, e2)) return 1;
    }
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2, double e2) {
    if (i1 == i2) return false;
    const double C = config_.C;
    double a1 = alphas_[i1];
    double a2 = alphas_[i2];
    double y1 = y_[i1];
    double y2 = y_[i2];
    double e1 = error(i1);
    double s = y1 * y2;

    double low, high;
    if (s > 0.0) {
      low = std::max(0.0, a1 + a2 - C);
      high = std::min(C, a1 + a2);
    } else {
      low = std::max(0.0, a2 - a1);
      high = std::min(C, C + a2 - a1);
    }
    if (low >= high) return false;

    double k11 = kernel(i1, i1);
    double k12 = kernel(i1, i2);
    double k22 = kernel(i2, i2);
    double eta = k11 + k22 - 2.0 * k12;

    double a2_new;
    if (eta > 0.0) {
      a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, low, high);
    } else {
      // Degenerate curvature: evaluate the pair-restricted dual objective
      // (minimization form) at both clip ends.
      double f1 = y1 * (e1 - b_) - a1 * k11 - s * a2 * k12;
      double f2 = y2 * (e2 - b_) - s * a1 * k12 - a2 * k22;
      double l1 = a1 + s * (a2 - low);
      double h1 = a1 + s * (a2 - high);
      double obj_low = l1 * f1 + low * f2 + 0.5 * l1 * l1 * k11 + 0.5 * low * low * k22 +
                       s * low * l1 * k12;
      double obj_high = h1 * f1 + high * f2 + 0.5 * h1 * h1 * k11 +
                        0.5 * high * high * k22 + s * high * h1 * k12;
      if (obj_low < obj_high - 1e-12)
        a2_new = low;
      else if (obj_low > obj_high + 1e-12)
        a2_new = high;
      else
        return false;
    }
    if (std::abs(a2_new - a2) < 1e-10 * (a2_new + a2 + 1e-10)) return false;
    double a1_new = a1 + s * (a2 - a2_new);

    double b1 = b_ - e1 - y1 * (a1_new - a1) * k11 - y2 * (a2_new - a2) * k12;
    double b2 = b_ - e2 - y1 * (a1_new - a1) * k12 - y2 * (a2_new - a2) * k22;
    if (a1_new > 0.0 && a1_new < C)
      b_ = b1;
    else if (a2_new > 0.0 && a2_new < C)
      b_ = b2;
    else
      b_ = 0.5 * (b1 + b2);

    auto x1 = data_.row(i1);
    auto x2 = data_.row(i2);
    for (std::size_t j = 0; j < w_.size(); ++j)
      w_[j] += y1 * (a1_new - a1) * x1[j] + y2 * (a2_new - a2) * x2[j];
    alphas_[i1] = a1_new;
    alphas_[i2] = a2_new;
    ++updates_;
    return true;
  }

  const LabeledDataset& data_;
  SmoConfig config_;
  std::mt19937_64 rng_;
  std::size_t n_;
  std::vector<double> y_;
  std::vector<double> alphas_;
  std::vector<double> w_;
  double b_ = 0.0;
  long updates_ = 0;
};

}  // namespace

LinearSVMModel smo_train(const LabeledDataset& data, const SmoConfig& config,
                         std::uint64_t seed) {
  if (data.empty()) throw DataError("smo_train: empty dataset");
  if (!data.has_both_classes())
    throw DataError("smo_train requires both classes; use constant_train for single-class data");
  if (!(config.C > 0.0)) throw DataError("smo_train: C must be > 0");
  return SmoSolver(data, config, seed).solve();
}

}  // namespace eazy
