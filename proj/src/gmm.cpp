#include "eazy/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace eazy {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double c = a[j] - b[j];
    s += c * c;
  }
  return s;
}

// k-means++ seeding followed by at most 20 Lloyd iterations; returns hard
// assignments (k centroids over the data rows).
struct KmeansInit {
  std::vector<std::vector<double>> centroids;
  std::vector<std::size_t> assignment;
};

KmeansInit kmeans_init(const LabeledDataset& data, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  KmeansInit init;
  init.centroids.reserve(k);

  std::uniform_int_distribution<std::size_t> uniform_row(0, n - 1);
  {
    auto first = data.row(uniform_row(rng));
    init.centroids.emplace_back(first.begin(), first.end());
  }
  std::vector<double> dist2(n, 0.0);
  while (init.centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : init.centroids)
        best = std::min(best, squared_distance(data.row(i), c));
      dist2[i] = best;
      total += best;
    }
    std::size_t pick;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += dist2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = uniform_row(rng);  // all points coincide with a centroid
    }
    auto r = data.row(pick);
    init.centroids.emplace_back(r.begin(), r.end());
  }

  init.assignment.assign(n, 0);
  for (int iter = 0; iter < 20; ++iter) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_c = 0;
      for (std::size_t c = 0; c < k; ++c) {
        double d2 = squared_distance(data.row(i), init.centroids[c]);
        if (d2 < best) {
          best = d2;
          best_c = c;
        }
      }
      if (init.assignment[i] != best_c) {
        init.assignment[i] = best_c;
        moved = true;
      }
    }
    if (!moved && iter > 0) break;
    std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto r = data.row(i);
      auto& s = sums[init.assignment[i]];
      for (std::size_t j = 0; j < d; ++j) s[j] += r[j];
      ++counts[init.assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c)
      if (counts[c] > 0)
        for (std::size_t j = 0; j < d; ++j)
          init.centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
  }
  return init;
}

double component_log_density(std::span<const double> x, std::span<const double> mean,
                             std::span<const double> variance) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double c = x[j] - mean[j];
    s += std::log(variance[j]) + c * c / variance[j];
  }
  return -0.5 * (static_cast<double>(x.size()) * kLog2Pi + s);
}

}  // namespace

void GaussianMixtureModel::component_log_joint(std::span<const double> x,
                                               std::span<double> out) const {
  if (x.size() != dim) throw DataError("gmm dimension mismatch");
  for (std::size_t c = 0; c < k; ++c) {
    double lw = mixing_weights[c] > 0.0 ? std::log(mixing_weights[c]) : kNegInf;
    out[c] = lw == kNegInf
                 ? kNegInf
                 : lw + component_log_density(x, component_mean(c), component_variance(c));
  }
}

double GaussianMixtureModel::log_density(std::span<const double> x) const {
  std::vector<double> lj(k);
  component_log_joint(x, lj);
  double m = *std::max_element(lj.begin(), lj.end());
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : lj) s += std::exp(v - m);
  return m + std::log(s);
}

std::size_t GaussianMixtureModel::most_responsible(std::span<const double> x) const {
  std::vector<double> lj(k);
  component_log_joint(x, lj);
  std::size_t best = 0;
  for (std::size_t c = 1; c < k; ++c)
    if (lj[c] > lj[best]) best = c;
  return best;
}

std::size_t Partition::total_rows() const {
  std::size_t total = 0;
  for (const auto& c : clusters) total += c.size();
  return total;
}

GaussianMixtureModel em_fit(const LabeledDataset& data, std::size_t k,
                            std::uint64_t seed, const EmConfig& config) {
  if (k < 1) throw DataError("em_fit needs k >= 1");
  if (k > data.size())
    throw DataError("em_fit needs k <= |data|: k=" + std::to_string(k) + ", rows=" +
                    std::to_string(data.size()));
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  const double floor = config.variance_floor;

  GaussianMixtureModel gmm;
  gmm.k = k;
  gmm.dim = d;
  gmm.mixing_weights.assign(k, 0.0);
  gmm.means.assign(k * d, 0.0);
  gmm.variances.assign(k * d, floor);

  // Initial parameters from the k-means clusters. Empty clusters start with
  // zero weight; they stay dead and are dissolved later by partition repair.
  auto rng = make_rng(seed);
  auto init = kmeans_init(data, k, rng);
  {
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[init.assignment[i]];
    for (std::size_t c = 0; c < k; ++c) {
      gmm.mixing_weights[c] = static_cast<double>(counts[c]) / static_cast<double>(n);
      for (std::size_t j = 0; j < d; ++j) gmm.means[c * d + j] = init.centroids[c][j];
    }
    std::vector<double> ss(k * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto r = data.row(i);
      std::size_t c = init.assignment[i];
      for (std::size_t j = 0; j < d; ++j) {
        double diff = r[j] - gmm.means[c * d + j];
        ss[c * d + j] += diff * diff;
      }
    }
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t j = 0; j < d; ++j)
        gmm.variances[c * d + j] =
            counts[c] > 0 ? std::max(ss[c * d + j] / static_cast<double>(counts[c]), floor)
                          : floor;
  }

  std::vector<double> resp(n * k);
  std::vector<double> lj(k);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < config.max_iter; ++iter) {
    // E step and the per-row mean log-likelihood under current parameters.
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      gmm.component_log_joint(data.row(i), lj);
      double m = *std::max_element(lj.begin(), lj.end());
      double s = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        double e = lj[c] == kNegInf ? 0.0 : std::exp(lj[c] - m);
        resp[i * k + c] = e;
        s += e;
      }
      for (std::size_t c = 0; c < k; ++c) resp[i * k + c] /= s;
      ll += m + std::log(s);
    }
    ll /= static_cast<double>(n);
    if (!std::isfinite(ll))
      throw NumericError("em_fit: non-finite log-likelihood at iteration " +
                         std::to_string(iter));
    gmm.log_likelihood_trace.push_back(ll);
    if (iter > 0 && ll - prev_ll < config.tol) break;
    prev_ll = ll;

    // M step. A component with no responsibility mass keeps its parameters
    // and gets weight zero, which removes it from all later E steps.
    for (std::size_t c = 0; c < k; ++c) {
      double nk = 0.0;
      for (std::size_t i = 0; i < n; ++i) nk += resp[i * k + c];
      if (nk <= 0.0) {
        gmm.mixing_weights[c] = 0.0;
        continue;
      }
      gmm.mixing_weights[c] = nk / static_cast<double>(n);
      for (std::size_t j = 0; j < d; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += resp[i * k + c] * data.row(i)[j];
        gmm.means[c * d + j] = m / nk;
      }
      for (std::size_t j = 0; j < d; ++j) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          double diff = data.row(i)[j] - gmm.means[c * d + j];
          v += resp[i * k + c] * diff * diff;
        }
        gmm.variances[c * d + j] = std::max(v / nk, floor);
      }
    }
    double wsum = std::accumulate(gmm.mixing_weights.begin(), gmm.mixing_weights.end(), 0.0);
    for (double& w : gmm.mixing_weights) w /= wsum;
  }
  return gmm;
}

std::size_t select_k(const LabeledDataset& data, std::uint64_t seed,
                     const SelectKConfig& config) {
  const std::size_t n = data.size();
  std::size_t folds = std::min(config.folds, n / 2);
  if (folds < 2) throw DataError("select_k: dataset too small for cross-validation");
  std::size_t k_max = config.k_max > 0 ? config.k_max
                                       : std::max<std::size_t>(1, std::min<std::size_t>(25, n / 10));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  {
    auto rng = make_rng(derive_seed(seed, 0));
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<std::vector<std::size_t>> fold_rows(folds), fit_rows(folds);
  for (std::size_t i = 0; i < n; ++i) fold_rows[i % folds].push_back(order[i]);
  std::size_t min_fit = n;
  for (std::size_t f = 0; f < folds; ++f) {
    for (std::size_t g = 0; g < folds; ++g)
      if (g != f) fit_rows[f].insert(fit_rows[f].end(), fold_rows[g].begin(), fold_rows[g].end());
    min_fit = std::min(min_fit, fit_rows[f].size());
  }
  k_max = std::min(k_max, min_fit);

  auto heldout_score = [&](std::size_t k) {
    double total_ll = 0.0;
    std::size_t total_rows = 0;
    for (std::size_t f = 0; f < folds; ++f) {
      auto fit = data.subset(fit_rows[f], data.name());
      auto gmm = em_fit(fit, k, derive_seed(seed, 1 + k * folds + f), config.em);
      for (std::size_t i : fold_rows[f]) {
        double ll = gmm.log_density(data.row(i));
        // A held-out point far outside every floored component can underflow
        // to -inf; clamp so one outlier cannot veto the whole fold.
        total_ll += std::max(ll, -1e12);
        ++total_rows;
      }
    }
    return total_ll / static_cast<double>(total_rows);
  };

  double prev = heldout_score(1);
  for (std::size_t k = 2; k <= k_max; ++k) {
    double score = heldout_score(k);
    if (score - prev <= config.min_gain) return k - 1;
    prev = score;
  }
  return k_max;
}

Partition assign_clusters(const GaussianMixtureModel& gmm, const LabeledDataset& data,
                          const PartitionConfig& config) {
  if (gmm.dim != data.dim())
    throw DataError("assign_clusters dimension mismatch: model " + std::to_string(gmm.dim) +
                    ", data " + std::to_string(data.dim()));
  const std::size_t n = data.size();
  const std::size_t k = gmm.k;

  // Per-row component preference order by posterior responsibility
  // (descending; ties toward the lowest component index).
  std::vector<std::vector<std::size_t>> preference(n);
  std::vector<double> lj(k);
  for (std::size_t i = 0; i < n; ++i) {
    gmm.component_log_joint(data.row(i), lj);
    std::vector<std::size_t> ord(k);
    std::iota(ord.begin(), ord.end(), std::size_t{0});
    std::stable_sort(ord.begin(), ord.end(),
                     [&](std::size_t a, std::size_t b) { return lj[a] > lj[b]; });
    preference[i] = std::move(ord);
  }

  std::vector<bool> surviving(k, true);
  std::vector<std::vector<std::size_t>> members(k);
  auto assign_all = [&] {
    for (auto& m : members) m.clear();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c : preference[i]) {
        if (surviving[c]) {
          members[c].push_back(i);
          break;
        }
      }
    }
  };
  assign_all();

  // Dissolve undersized clusters smallest-first until every surviving
  // cluster is viable or only one remains.
  while (true) {
    std::size_t survivors = 0;
    std::size_t worst = k;
    for (std::size_t c = 0; c < k; ++c) {
      if (!surviving[c]) continue;
      ++survivors;
      if (members[c].size() < config.min_cluster_size &&
          (worst == k || members[c].size() < members[worst].size()))
        worst = c;
    }
    if (worst == k || survivors <= 1) break;
    surviving[worst] = false;
    assign_all();
  }

  Partition partition;
  for (std::size_t c = 0; c < k; ++c)
    if (surviving[c] && !members[c].empty()) partition.clusters.push_back(std::move(members[c]));
  return partition;
}

}  // namespace eazy
