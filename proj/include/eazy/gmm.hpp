#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eazy/dataset.hpp"

namespace eazy {

// Diagonal-covariance Gaussian mixture fitted by EM on features only
// (labels never enter the fit). Drives the disjoint training partition.
struct GaussianMixtureModel {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<double> mixing_weights;  // k, >= 0, sums to 1
  std::vector<double> means;           // k*d row-major
  std::vector<double> variances;       // k*d, each >= variance floor (dead components excepted)

  // Per-iteration mean log-likelihood recorded during the fit (first entry
  // is the value under the initial parameters).
  std::vector<double> log_likelihood_trace;

  std::span<const double> component_mean(std::size_t c) const {
    return {means.data() + c * dim, dim};
  }
  std::span<const double> component_variance(std::size_t c) const {
    return {variances.data() + c * dim, dim};
  }

  // log p(x) under the mixture.
  double log_density(std::span<const double> x) const;
  // Component with the largest posterior responsibility for x; ties break
  // toward the lowest component index.
  std::size_t most_responsible(std::span<const double> x) const;
  // log of (unnormalized) per-component joint densities log w_c + log N_c(x).
  void component_log_joint(std::span<const double> x, std::span<double> out) const;
};

// Non-overlapping row-index sets covering a dataset exactly; the training
// partition behind the ensemble.
struct Partition {
  std::vector<std::vector<std::size_t>> clusters;
  std::size_t total_rows() const;
};

struct EmConfig {
  double tol = 1e-6;          // stop when mean log-likelihood gain < tol
  int max_iter = 200;
  double variance_floor = 1e-6;
};

struct SelectKConfig {
  std::size_t k_max = 0;      // 0 = min(25, rows/10)
  std::size_t folds = 10;     // reduced to rows/2 on small data
  double min_gain = 1e-4;     // required held-out mean log-likelihood gain per k
  EmConfig em;
};

struct PartitionConfig {
  std::size_t min_cluster_size = 5;
};

// Standard EM with k-means++ seeding and at most 20 k-means refinement
// iterations before the EM loop. Deterministic given seed. Throws DataError
// if k < 1 or k > |data|, NumericError if the likelihood turns non-finite.
GaussianMixtureModel em_fit(const LabeledDataset& data, std::size_t k,
                            std::uint64_t seed, const EmConfig& config = {});

// Incremental cross-validated component count selection: k grows from 1
// until the held-out mean log-likelihood stops improving by more than
// min_gain per row, returning the last k that improved.
std::size_t select_k(const LabeledDataset& data, std::uint64_t seed,
                     const SelectKConfig& config = {});

// Hard assignment by maximum responsibility followed by small-cluster
// repair: clusters below min_cluster_size are dissolved (smallest first)
// and their rows move to the surviving cluster with the next-highest
// responsibility. The result partitions the row-index set exactly.
Partition assign_clusters(const GaussianMixtureModel& gmm, const LabeledDataset& data,
                          const PartitionConfig& config = {});

}  // namespace eazy
